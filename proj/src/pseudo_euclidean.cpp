#include "pnmc/pseudo_euclidean.hpp"

#include <cmath>

namespace pnmc {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::degenerate_span: return "degenerate_span";
    case ErrorKind::lightlike_step: return "lightlike_step";
    case ErrorKind::out_of_domain: return "out_of_domain";
    case ErrorKind::not_spacelike: return "not_spacelike";
    case ErrorKind::degenerate_metric: return "degenerate_metric";
    case ErrorKind::not_normal: return "not_normal";
    case ErrorKind::minimal_point: return "minimal_point";
    case ErrorKind::frame_degenerate: return "frame_degenerate";
    case ErrorKind::frame_flip: return "frame_flip";
    case ErrorKind::not_orthogonal: return "not_orthogonal";
    case ErrorKind::not_separable: return "not_separable";
    case ErrorKind::quadrature_failure: return "quadrature_failure";
    case ErrorKind::non_monotone: return "non_monotone";
    case ErrorKind::domain_violation: return "domain_violation";
    case ErrorKind::grid_too_small: return "grid_too_small";
    case ErrorKind::grid_mismatch: return "grid_mismatch";
    case ErrorKind::mu_vanishes: return "mu_vanishes";
    case ErrorKind::drift_exceeded: return "drift_exceeded";
    case ErrorKind::io_error: return "io_error";
    case ErrorKind::config_error: return "config_error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

const char* to_string(CausalCharacter c) {
  switch (c) {
    case CausalCharacter::spacelike: return "spacelike";
    case CausalCharacter::timelike: return "timelike";
    case CausalCharacter::lightlike: return "lightlike";
    case CausalCharacter::zero: return "zero";
  }
  return "unknown";
}

double inner(const Vector4& a, const Vector4& b, Signature s) {
  double sum = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
  return sum + s.diag(3) * a[3] * b[3];
}

double dot(const Vector4& a, const Vector4& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

double euclidean_norm(const Vector4& a) { return std::sqrt(dot(a, a)); }

Vector4 cross3(const Vector4& a, const Vector4& b) {
  Vector4 r;
  r[0] = a[1] * b[2] - a[2] * b[1];
  r[1] = a[2] * b[0] - a[0] * b[2];
  r[2] = a[0] * b[1] - a[1] * b[0];
  r[3] = 0.0;
  return r;
}

double det4(const Vector4& c0, const Vector4& c1, const Vector4& c2, const Vector4& c3) {
  // Expansion by 2x2 minors of the first two columns.
  auto minor2 = [&](int i, int j) { return c0[i] * c1[j] - c0[j] * c1[i]; };
  auto cominor2 = [&](int i, int j) { return c2[i] * c3[j] - c2[j] * c3[i]; };
  return minor2(0, 1) * cominor2(2, 3) - minor2(0, 2) * cominor2(1, 3) +
         minor2(0, 3) * cominor2(1, 2) + minor2(1, 2) * cominor2(0, 3) -
         minor2(1, 3) * cominor2(0, 2) + minor2(2, 3) * cominor2(0, 1);
}

CausalCharacter causal_character(const Vector4& v, Signature s, double tol) {
  double size = 0.0;
  for (int i = 0; i < 4; ++i) size = std::max(size, std::abs(v[i]));
  if (size < tol) return CausalCharacter::zero;
  double q = inner(v, v, s);
  if (std::abs(q) < tol * dot(v, v)) return CausalCharacter::lightlike;
  return q > 0.0 ? CausalCharacter::spacelike : CausalCharacter::timelike;
}

std::vector<UnitVector> orthonormalize(std::span<const Vector4> vectors, Signature s,
                                       double tol) {
  std::vector<UnitVector> out;
  out.reserve(vectors.size());
  for (const Vector4& v : vectors) {
    Vector4 w = v;
    for (const UnitVector& u : out) {
      w -= (static_cast<double>(u.sign) * inner(w, u.v, s)) * u.v;
    }
    double size2 = dot(w, w);
    double scale2 = std::max(dot(v, v), 1.0);
    if (size2 <= tol * tol * scale2) {
      fail(ErrorKind::degenerate_span, "vector depends on earlier span members");
    }
    double q = inner(w, w, s);
    if (std::abs(q) <= tol * size2) {
      fail(ErrorKind::lightlike_step, "intermediate vector has vanishing pseudo-norm");
    }
    int sign = q > 0.0 ? 1 : -1;
    out.push_back({w / std::sqrt(std::abs(q)), sign});
  }
  return out;
}

Matrix4 Matrix4::identity() {
  Matrix4 r;
  for (int i = 0; i < 4; ++i) r(i, i) = 1.0;
  return r;
}

Matrix4 operator+(const Matrix4& a, const Matrix4& b) {
  Matrix4 r;
  for (std::size_t k = 0; k < 16; ++k) r.m[k] = a.m[k] + b.m[k];
  return r;
}

Matrix4 operator-(const Matrix4& a, const Matrix4& b) {
  Matrix4 r;
  for (std::size_t k = 0; k < 16; ++k) r.m[k] = a.m[k] - b.m[k];
  return r;
}

Matrix4 operator*(double s, Matrix4 a) {
  for (double& x : a.m) x *= s;
  return a;
}

Matrix4 operator*(const Matrix4& a, const Matrix4& b) {
  Matrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double sum = 0.0;
      for (int k = 0; k < 4; ++k) sum += a(i, k) * b(k, j);
      r(i, j) = sum;
    }
  return r;
}

Vector4 operator*(const Matrix4& a, const Vector4& v) {
  Vector4 r;
  for (int i = 0; i < 4; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 4; ++j) sum += a(i, j) * v[j];
    r[i] = sum;
  }
  return r;
}

Matrix4 Matrix4::transposed() const {
  Matrix4 r;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r(i, j) = (*this)(j, i);
  return r;
}

double Matrix4::max_abs() const {
  double m0 = 0.0;
  for (double x : m) m0 = std::max(m0, std::abs(x));
  return m0;
}

}  // namespace pnmc
