#include "pnmc/interp.hpp"

#include <algorithm>
#include <cmath>

#include "pnmc/errors.hpp"

namespace pnmc {
namespace {

// Second derivatives m_i of the not-a-knot spline. The boundary unknowns are
// eliminated by the linear relations m0 = (1 + h0/h1) m1 - (h0/h1) m2 and its
// mirror (third-derivative continuity across the second and the penultimate
// node), leaving a tridiagonal system in m_1 .. m_{n-2}.
std::vector<double> second_derivatives(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  const auto h = [&](int i) { return x[i + 1] - x[i]; };
  const auto slope = [&](int i) { return (y[i + 1] - y[i]) / h(i); };

  const int k = n - 2;  // unknowns m_1 .. m_{n-2}
  std::vector<double> lower(static_cast<std::size_t>(k), 0.0);
  std::vector<double> diag(static_cast<std::size_t>(k), 0.0);
  std::vector<double> upper(static_cast<std::size_t>(k), 0.0);
  std::vector<double> rhs(static_cast<std::size_t>(k), 0.0);
  for (int i = 1; i <= n - 2; ++i) {
    const std::size_t r = static_cast<std::size_t>(i - 1);
    lower[r] = h(i - 1);
    diag[r] = 2.0 * (h(i - 1) + h(i));
    upper[r] = h(i);
    rhs[r] = 6.0 * (slope(i) - slope(i - 1));
  }
  const double r0 = h(0) / h(1);
  diag[0] += h(0) * (1.0 + r0);
  upper[0] -= h(0) * r0;
  const double r1 = h(n - 2) / h(n - 3);
  diag[static_cast<std::size_t>(k - 1)] += h(n - 2) * (1.0 + r1);
  lower[static_cast<std::size_t>(k - 1)] -= h(n - 2) * r1;

  // Thomas sweep.
  std::vector<double> cp(static_cast<std::size_t>(k), 0.0);
  std::vector<double> dp(static_cast<std::size_t>(k), 0.0);
  if (diag[0] == 0.0) {
    fail(ErrorKind::config_error, "spline system is singular");
  }
  cp[0] = upper[0] / diag[0];
  dp[0] = rhs[0] / diag[0];
  for (int i = 1; i < k; ++i) {
    const std::size_t r = static_cast<std::size_t>(i);
    const double denom = diag[r] - lower[r] * cp[r - 1];
    if (denom == 0.0) {
      fail(ErrorKind::config_error, "spline system is singular");
    }
    cp[r] = upper[r] / denom;
    dp[r] = (rhs[r] - lower[r] * dp[r - 1]) / denom;
  }
  std::vector<double> m(static_cast<std::size_t>(n), 0.0);
  m[static_cast<std::size_t>(n - 2)] = dp[static_cast<std::size_t>(k - 1)];
  for (int i = k - 2; i >= 0; --i) {
    const std::size_t r = static_cast<std::size_t>(i);
    m[r + 1] = dp[r] - cp[r] * m[r + 2];
  }
  m[0] = (1.0 + r0) * m[1] - r0 * m[2];
  m[static_cast<std::size_t>(n - 1)] =
      (1.0 + r1) * m[static_cast<std::size_t>(n - 2)] - r1 * m[static_cast<std::size_t>(n - 3)];
  return m;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 2 || y_.size() != x_.size()) {
    fail(ErrorKind::config_error, "spline needs at least two nodes and matching values");
  }
  for (int i = 0; i + 1 < n; ++i) {
    if (!(x_[i + 1] > x_[i])) {
      fail(ErrorKind::config_error, "spline nodes must be strictly increasing");
    }
  }
  b_.assign(static_cast<std::size_t>(n - 1), 0.0);
  c_.assign(static_cast<std::size_t>(n - 1), 0.0);
  d_.assign(static_cast<std::size_t>(n - 1), 0.0);
  if (n == 2) {
    b_[0] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    return;
  }
  if (n == 3) {
    // The unique parabola through the three points.
    const double h0 = x_[1] - x_[0], h1 = x_[2] - x_[1];
    const double s0 = (y_[1] - y_[0]) / h0, s1 = (y_[2] - y_[1]) / h1;
    const double cc = (s1 - s0) / (h0 + h1);
    b_[0] = s0 - cc * h0;
    c_[0] = cc;
    b_[1] = b_[0] + 2.0 * cc * h0;
    c_[1] = cc;
    return;
  }
  const std::vector<double> m = second_derivatives(x_, y_);
  for (int i = 0; i + 1 < n; ++i) {
    const std::size_t k = static_cast<std::size_t>(i);
    const double h = x_[i + 1] - x_[i];
    b_[k] = (y_[i + 1] - y_[i]) / h - h * (2.0 * m[k] + m[k + 1]) / 6.0;
    c_[k] = 0.5 * m[k];
    d_[k] = (m[k + 1] - m[k]) / (6.0 * h);
  }
}

int CubicSpline::segment(double t) const {
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  int i = static_cast<int>(it - x_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(x_.size()) - 2);
  return i;
}

double CubicSpline::operator()(double t) const {
  const int i = segment(t);
  const std::size_t k = static_cast<std::size_t>(i);
  const double dt = t - x_[k];
  return y_[k] + dt * (b_[k] + dt * (c_[k] + dt * d_[k]));
}

double CubicSpline::derivative(double t) const {
  const int i = segment(t);
  const std::size_t k = static_cast<std::size_t>(i);
  const double dt = t - x_[k];
  return b_[k] + dt * (2.0 * c_[k] + dt * 3.0 * d_[k]);
}

}  // namespace pnmc
