#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdphi/rational.hpp"

namespace sdphi {

enum class WeightTag { Constant, Exponential, Enumerator, Custom };

/// Resolution weights omega(0..p) for the stratification kernel, materialized
/// for a concrete base s and depth p. The base matters in two places: the
/// enumerator scheme's values depend on it, and every kernel constant divides
/// omega(i) by s^i.
///
/// When the weights are exactly representable (constant scheme, or custom
/// weights given as decimal fractions), `exact` carries them as rationals and
/// downstream code can run distance computations in scaled integers.
struct WeightScheme {
  WeightTag tag = WeightTag::Constant;
  std::int64_t s = 2;
  int p = 1;
  double y = 1.0;                 // parameter of the exponential / enumerator families
  std::vector<double> w;          // omega(0), ..., omega(p)
  std::vector<Rational> exact;    // same values exactly, when available

  bool has_exact() const { return !exact.empty(); }
  std::string describe() const;
};

/// Build one of the parametric schemes:
///  - Constant:    omega(i) = 1
///  - Exponential: omega(i) = y^i,                 0 < y <= 1
///  - Enumerator:  omega(i) = (s^2 y)^i for i < p, omega(p) = (s^2 y)^p/(1-y),
///                 0 < y < 1
WeightScheme make_weights(WeightTag tag, std::int64_t s, int p, double y = 1.0);

/// Custom weights from doubles (no exact form assumed).
WeightScheme make_custom_weights(std::vector<double> w, std::int64_t s);

/// Custom weights from exact rationals (doubles derived from them).
WeightScheme make_custom_weights(std::vector<Rational> w, std::int64_t s);

/// Parsed form of a CLI weight specification:
///   "constant" | "exp:<y>" | "enum:<y>" | "custom:<w0,...,wp>"
struct WeightSpec {
  WeightTag tag = WeightTag::Constant;
  double y = 1.0;
  std::vector<Rational> custom;  // decimal literals parsed exactly
  std::string text;              // original spec, for reports
};

WeightSpec parse_weight_spec(const std::string& spec);

/// Materialize a parsed spec for a concrete (s, p); validates custom length.
WeightScheme materialize(const WeightSpec& spec, std::int64_t s, int p);

/// Scalar constants of the kernel, all depending only on (weights, s, p)
/// except for the design-shape terms:
///   A0  = sum_i omega(i)/s^i          (kernel value of two equal labels)
///   A1  = sum_i omega(i)/s^(2i)       (its average over a balanced column)
///   B   = sum_i omega(i)^2/s^(3i)
///   C   = sum_{i<j} omega(i)omega(j)/s^(i+2j)
///   A0l[l] = sum_{i<=l} omega(i)/s^i  (partial sums, A0l[p] == A0)
///   c_sd   = additive constant linking the pair-distance energy to the
///            projection criterion, depends on m
///   d_bar  = average off-diagonal pair distance of a balanced design,
///            depends on n and m
struct KernelConstants {
  double a0 = 0, a1 = 0, b = 0, c = 0;
  std::vector<double> a0l;
  double c_sd = 0;
  double d_bar = 0;
  std::int64_t s = 2;
  int p = 1;
  int m = 2;
  std::int64_t n = 1;
};

KernelConstants kernel_constants(const WeightScheme& w, int m, std::int64_t n);

/// Exact counterpart, available when the scheme has exact weights.
struct KernelConstantsExact {
  Rational a0, a1, b, c, c_sd, d_bar;
  std::vector<Rational> a0l;
};

KernelConstantsExact kernel_constants_exact(const WeightScheme& w, int m, std::int64_t n);

/// Truncated geometric series 1 + q + ... + q^p.
double geometric_partial_sum(int p, double q);

/// Kernel value of two labels at hierarchical distance d:
/// g(d) = A0^(p-d), the partial sum of omega(i)/s^i over i <= p-d.
double nrt_partial_sum(int d, const WeightScheme& w);

}  // namespace sdphi
