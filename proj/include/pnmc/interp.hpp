#pragma once

#include <vector>

namespace pnmc {

/// Cubic interpolating spline on strictly increasing nodes. Not-a-knot end
/// conditions for four or more nodes; shorter inputs degrade to the exact
/// quadratic or straight line. Evaluation outside the node range
/// extrapolates the boundary polynomial.
class CubicSpline {
public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  double derivative(double t) const;

  const std::vector<double>& nodes() const { return x_; }

private:
  int segment(double t) const;

  std::vector<double> x_, y_;
  // Per-segment coefficients: y(t) = a + b*dt + c*dt^2 + d*dt^3.
  std::vector<double> b_, c_, d_;
};

}  // namespace pnmc
