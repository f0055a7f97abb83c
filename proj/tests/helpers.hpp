#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "pnmc/errors.hpp"
#include "pnmc/pseudo_euclidean.hpp"

namespace pnmc::testing {

inline bool vec_close(const Vector4& a, const Vector4& b, double tol) {
  for (int i = 0; i < 4; ++i) {
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  }
  return true;
}

inline double vec_dist(const Vector4& a, const Vector4& b) { return euclidean_norm(a - b); }

/// Runs fn, expecting it to throw Error with the given kind.
template <typename Fn>
bool throws_kind(ErrorKind kind, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind() == kind;
  } catch (...) {
    return false;
  }
  return false;
}

/// Rotation by angle t in the (i, j) coordinate plane.
inline Matrix4 plane_rotation(int i, int j, double t) {
  Matrix4 r = Matrix4::identity();
  r(i, i) = std::cos(t);
  r(j, j) = std::cos(t);
  r(i, j) = -std::sin(t);
  r(j, i) = std::sin(t);
  return r;
}

/// Hyperbolic rotation (boost) of rapidity t in the (i, 3) plane; an isometry
/// of the Minkowski inner product.
inline Matrix4 boost(int i, double t) {
  Matrix4 r = Matrix4::identity();
  r(i, i) = std::cosh(t);
  r(3, 3) = std::cosh(t);
  r(i, 3) = std::sinh(t);
  r(3, i) = std::sinh(t);
  return r;
}

}  // namespace pnmc::testing
