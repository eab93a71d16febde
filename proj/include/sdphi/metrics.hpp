#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdphi/design.hpp"
#include "sdphi/rational.hpp"
#include "sdphi/weights.hpp"

namespace sdphi {

/// How level labels are cut into nested strata during evaluation.
///
/// Normally the labels are native: `domain == s^p`, and resolution-i strata
/// are digit prefixes. The same machinery also evaluates a design whose
/// level count is not a power of the kernel base (a Latin hypercube under a
/// base-2 kernel, say): labels are embedded at interval midpoints
/// (2x+1)/(2*domain) and stratum membership is the integer floor
/// floor(s^i * (2x+1) / (2*domain)). For a native domain the two rules
/// agree, so there is one code path with a fast branch.
struct Stratification {
  std::int64_t domain = 2;  // number of distinct level labels
  std::int64_t s = 2;       // kernel base
  int p = 1;                // kernel depth
  bool native = true;       // domain == s^p

  static Stratification of(const Design& d);
  static Stratification embedded(std::int64_t domain, std::int64_t s, int p);

  /// True when labels x and y fall in the same resolution-i stratum.
  bool agree(std::int64_t x, std::int64_t y, int i) const;

  /// Stratum index of label x at resolution i (0 <= i <= p).
  std::int64_t stratum(std::int64_t x, int i) const;

  /// Largest resolution at which x and y share a stratum (in [0, p]).
  int agreement(std::int64_t x, std::int64_t y) const;

  /// Hierarchical distance between two native labels (native only).
  int rho(std::int64_t x, std::int64_t y) const;

 private:
  std::vector<std::int64_t> spow_;  // s^0 .. s^p
};

/// delta_i on native labels: 1 when the leading i digits agree.
int delta_i(std::int64_t x, std::int64_t y, int i, std::int64_t s, int p);

/// Full matrix of pairwise kernel distances d(a,b) plus their energy
/// G = sum over ordered pairs of d(a,b)^2 (diagonal terms are zero).
struct DistanceMatrix {
  std::int64_t n = 0;
  std::vector<double> d;  // n*n, symmetric, zero diagonal
  double g_d = 0;

  double at(std::int64_t a, std::int64_t b) const { return d[static_cast<std::size_t>(a) * n + b]; }
};

DistanceMatrix distance_matrix(const Design& D, const WeightScheme& w);
DistanceMatrix distance_matrix(const Design& D, const WeightScheme& w, const Stratification& st);

/// Integer-scaled distances for exact arithmetic: every pair distance is an
/// integer multiple of 1/scale, so d_scaled = d * scale is exact and the
/// energy G fits in 128 bits. Requires exact weights.
struct ScaledDistances {
  std::int64_t n = 0;
  std::int64_t scale = 1;
  std::vector<std::int64_t> d;  // n*n
  int128 g_scaled = 0;

  std::int64_t at(std::int64_t a, std::int64_t b) const {
    return d[static_cast<std::size_t>(a) * n + b];
  }
  Rational g_exact() const { return Rational(g_scaled, detail::checked_mul(scale, scale)); }
};

ScaledDistances scaled_distance_matrix(const Design& D, const WeightScheme& w);
ScaledDistances scaled_distance_matrix(const Design& D, const WeightScheme& w,
                                       const Stratification& st);

/// Integer penalty table underlying ScaledDistances: pen[r] is the scaled
/// distance contribution of one coordinate at hierarchical distance r.
struct ScaledPenalties {
  std::int64_t scale = 1;
  std::vector<std::int64_t> pen;  // indexed by rho = 0..p
};

ScaledPenalties scaled_penalties(const WeightScheme& w);

/// Stratified discrepancy of the full m-dimensional design (closed form).
double sd2(const Design& D, const WeightScheme& w);
double sd2(const Design& D, const WeightScheme& w, const Stratification& st);

/// Same quantity by brute force: enumerate every stratum of every active
/// resolution combination and accumulate volume-vs-count mismatches.
/// Guarded: total cell count across resolution vectors must stay <= 1e8.
double sd2_cell_oracle(const Design& D, const WeightScheme& w);
double sd2_cell_oracle(const Design& D, const WeightScheme& w, const Stratification& st);

/// Average sd2 over all two-column projections, computed projection by
/// projection. Works for any design, balanced or not.
double phi_sd_oracle(const Design& D, const WeightScheme& w);
double phi_sd_oracle(const Design& D, const WeightScheme& w, const Stratification& st);

/// Fast closed form for the same average, valid only for designs whose
/// columns are balanced on the native levels. Throws on unbalanced input.
/// The stratification overload supports an overriding kernel whose base and
/// depth exactly tile the level count (st.native must hold).
double phi_sd_fast(const Design& D, const WeightScheme& w);
double phi_sd_fast(const Design& D, const WeightScheme& w, const Stratification& st);

struct PhiResult {
  double value = 0;
  bool fast_path = false;
};

/// Route to the fast path when it applies (native stratification and
/// balanced columns), otherwise to the projection-by-projection oracle.
PhiResult phi_sd(const Design& D, const WeightScheme& w);
PhiResult phi_sd(const Design& D, const WeightScheme& w, const Stratification& st);

/// Average sd2 over all three-column projections (m >= 3).
double phi_sd3(const Design& D, const WeightScheme& w);
double phi_sd3(const Design& D, const WeightScheme& w, const Stratification& st);

/// Pair distance via the hierarchical-distance shortcut
/// d(a,b) = sum_k (A0 - g(rho_k)); native labels only.
double dab_nrt(const Design& D, const WeightScheme& w, std::int64_t a, std::int64_t b);

/// Lower/upper bounds on the distance energy and on the projection
/// criterion for the design shape (n, m, s, p) under the given weights,
/// plus the balanced-design average distance d_bar.
struct BoundsReport {
  double g_lb = 0, g_ub = 0;
  double phi_lb = 0, phi_ub = 0;
  double d_bar = 0;
  bool attained_lb = false;  // filled by attainment(); see below
  bool attained_ub = false;
};

BoundsReport bounds(std::int64_t n, int m, std::int64_t s, int p, const WeightScheme& w);

struct BoundsExact {
  Rational g_lb, g_ub, phi_lb, phi_ub, d_bar;
};

BoundsExact bounds_exact(std::int64_t n, int m, std::int64_t s, int p, const WeightScheme& w);

/// Fill the attainment flags of a bounds report from a concrete design:
/// the lower bound is attained exactly when every off-diagonal pair
/// distance equals d_bar (to 1e-9), the upper bound when the energy reaches
/// g_ub (exactly in scaled-integer mode when weights are exact).
void attainment(BoundsReport& b, const Design& D, const WeightScheme& w);
void attainment(BoundsReport& b, const Design& D, const WeightScheme& w,
                const Stratification& st);

/// Multiset of off-diagonal pair distances with summary statistics.
struct DistanceDistribution {
  std::vector<std::pair<double, std::int64_t>> values;  // sorted (distance, multiplicity)
  double min = 0, median = 0, mean = 0, max = 0;
  std::int64_t pair_count = 0;
};

DistanceDistribution distance_distribution(const Design& D, const WeightScheme& w);
DistanceDistribution distance_distribution(const Design& D, const WeightScheme& w,
                                           const Stratification& st);

/// CSV export of pair distances, one row per unordered pair (1-based run
/// indices), 17 significant digits: header "a,b,d".
void write_distance_csv(std::ostream& out, const Design& D, const WeightScheme& w);

}  // namespace sdphi
