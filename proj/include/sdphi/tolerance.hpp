#pragma once

#include <algorithm>
#include <cmath>

namespace sdphi::tol {

/// Relative tolerance used when two formulas must agree on the same quantity.
inline constexpr double kRelEquiv = 1e-10;

/// Absolute tolerance used when flagging that a bound is attained.
inline constexpr double kAbsAttain = 1e-9;

/// |a-b| <= tol * max(1, |a|, |b|): relative comparison with an absolute
/// floor so values near zero do not demand impossible precision.
inline bool rel_equal(double a, double b, double tol = kRelEquiv) {
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

/// Plain absolute comparison for attainment flags.
inline bool attained(double a, double b, double tol = kAbsAttain) {
  return std::fabs(a - b) <= tol;
}

}  // namespace sdphi::tol
