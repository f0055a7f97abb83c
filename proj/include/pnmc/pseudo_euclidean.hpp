#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "pnmc/errors.hpp"

namespace pnmc {

/// Metric signature of the ambient four-space. index == 0 is the Euclidean
/// inner product; index == 1 flips the sign of the last coordinate, giving
/// diag(1, 1, 1, -1).
struct Signature {
  int index = 0;

  constexpr double diag(int i) const { return (index == 1 && i == 3) ? -1.0 : 1.0; }

  static constexpr Signature euclidean() { return {0}; }
  static constexpr Signature minkowski() { return {1}; }

  friend constexpr bool operator==(Signature a, Signature b) { return a.index == b.index; }
};

struct Vector4 {
  std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

  constexpr double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  constexpr double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  friend constexpr Vector4 operator+(Vector4 a, const Vector4& b) {
    for (int i = 0; i < 4; ++i) a.c[i] += b.c[i];
    return a;
  }
  friend constexpr Vector4 operator-(Vector4 a, const Vector4& b) {
    for (int i = 0; i < 4; ++i) a.c[i] -= b.c[i];
    return a;
  }
  friend constexpr Vector4 operator*(double s, Vector4 a) {
    for (int i = 0; i < 4; ++i) a.c[i] *= s;
    return a;
  }
  friend constexpr Vector4 operator*(Vector4 a, double s) { return s * a; }
  friend constexpr Vector4 operator/(Vector4 a, double s) { return (1.0 / s) * a; }
  friend constexpr Vector4 operator-(Vector4 a) { return -1.0 * a; }
  Vector4& operator+=(const Vector4& b) {
    for (int i = 0; i < 4; ++i) c[i] += b.c[i];
    return *this;
  }
  Vector4& operator-=(const Vector4& b) {
    for (int i = 0; i < 4; ++i) c[i] -= b.c[i];
    return *this;
  }

  static constexpr Vector4 basis(int i) {
    Vector4 e;
    e[i] = 1.0;
    return e;
  }
  static constexpr Vector4 zero() { return {}; }
};

enum class CausalCharacter { spacelike, timelike, lightlike, zero };

const char* to_string(CausalCharacter c);

/// Signature-aware inner product <a, b>.
double inner(const Vector4& a, const Vector4& b, Signature s);

/// Plain Euclidean dot product, used for size estimates and tie-breaking
/// where the pseudo-norm would be misleading near the light cone.
double dot(const Vector4& a, const Vector4& b);
double euclidean_norm(const Vector4& a);

/// Cross product of the first three components; the fourth is zeroed.
/// Supports curves constrained to the E^3 slice.
Vector4 cross3(const Vector4& a, const Vector4& b);

double det4(const Vector4& c0, const Vector4& c1, const Vector4& c2, const Vector4& c3);

/// Classifies v against the light cone. The zero test compares components
/// against tol; the lightlike test compares <v,v> against tol times the
/// squared Euclidean size, so it is invariant under scaling.
CausalCharacter causal_character(const Vector4& v, Signature s, double tol = 1e-10);

struct UnitVector {
  Vector4 v;
  int sign;  // <v, v> after normalization: +1 or -1
};

/// Gram-Schmidt with the signature inner product. Preserves input order and
/// records the sign of each normalized vector. Throws degenerate_span when a
/// vector is (numerically) dependent on its predecessors, lightlike_step when
/// an intermediate result has vanishing pseudo-norm but nonzero size.
std::vector<UnitVector> orthonormalize(std::span<const Vector4> vectors, Signature s,
                                       double tol = 1e-10);

/// Dense 4x4 matrix, row-major. Used for frame connection coefficients and
/// ambient isometries; kept deliberately minimal.
struct Matrix4 {
  std::array<double, 16> m{};

  double& operator()(int i, int j) { return m[static_cast<std::size_t>(4 * i + j)]; }
  double operator()(int i, int j) const { return m[static_cast<std::size_t>(4 * i + j)]; }

  static Matrix4 identity();
  static Matrix4 zero() { return {}; }

  friend Matrix4 operator+(const Matrix4& a, const Matrix4& b);
  friend Matrix4 operator-(const Matrix4& a, const Matrix4& b);
  friend Matrix4 operator*(double s, Matrix4 a);
  friend Matrix4 operator*(const Matrix4& a, const Matrix4& b);
  friend Vector4 operator*(const Matrix4& a, const Vector4& v);

  Matrix4 transposed() const;
  double max_abs() const;
};

struct Matrix2 {
  double m11 = 0.0, m12 = 0.0, m21 = 0.0, m22 = 0.0;

  double trace() const { return m11 + m22; }
  double det() const { return m11 * m22 - m12 * m21; }
};

}  // namespace pnmc
