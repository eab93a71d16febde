#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdphi/design.hpp"
#include "sdphi/weights.hpp"

namespace sdphi {

/// Squared modulus of the additive-character sum of the design at frequency
/// vector u (one label in {0, ..., s^p - 1} per column). Requires prime s.
/// Values that land within 1e-6 of an integer are snapped to it, since exact
/// character sums of integer designs are algebraic integers that show up as
/// integers here.
double character_sum(const Design& D, const std::vector<std::int64_t>& u);

/// Distribution of character-sum mass by hierarchical weight of the
/// frequency vector: S[j] collects |chi_u|^2 / n^2 over all u whose
/// coordinate resolutions sum to j.
struct PatternSpectrum {
  std::int64_t n = 0;
  int m = 0;
  std::int64_t s = 2;
  int p = 1;
  int upto = 0;              // entries 0..upto of S are populated
  std::vector<double> s_j;   // size m*p + 1, zero beyond `upto`

  /// sum_j S_j; for a design with distinct rows this is s^(pm)/n.
  double total() const;
};

/// Full spectrum; requires s prime and s^(pm) <= 1e7 enumeration budget.
PatternSpectrum space_filling_pattern(const Design& D);

/// Spectrum truncated to weights j <= jmax, enumerating only the frequency
/// vectors of those weights; feasible far beyond the full budget.
PatternSpectrum space_filling_pattern_partial(const Design& D, int jmax);

/// Weighted enumerator summaries of the spectrum at argument y.
struct EnumeratorReport {
  double y = 0;
  std::optional<double> whole;   // sum_j S_j y^j, absent if the full budget is blown
  double pairwise = 0;           // same sum on the average two-column spectrum
  double sbar1 = 0, sbar2 = 0, sbar3 = 0;
  std::vector<double> sbar;      // average two-column spectrum itself
};

EnumeratorReport enumerators(const Design& D, double y);

/// Cross-check that the pairwise enumerator reproduces the projection
/// criterion under enumerator weights: phi == (E2(y) - 1) / (1-y)^2.
struct EnumeratorIdentity {
  double phi_via_enumerator = 0;
  double phi_via_kernel = 0;
  double difference = 0;
};

EnumeratorIdentity check_enumerator_identity(const Design& D, double y);

/// Counting check of stratification strength t: every choice of g <= t
/// columns and positive per-column resolutions summing to t cuts the design
/// into equally filled cells.
struct StrengthWitness {
  std::string reason;                 // short human-readable failure note
  std::vector<int> columns;           // offending column subset (empty for global reasons)
  std::vector<int> resolutions;       // offending resolution split
  std::vector<std::int64_t> cell;     // offending cell coordinates
  std::int64_t count = 0;             // observed occupancy
  std::int64_t expected = 0;          // required occupancy
};

struct StrengthCheck {
  bool ok = false;
  int t = 0;
  std::optional<StrengthWitness> witness;
};

StrengthCheck check_gsoa_strength(const Design& D, int t);

/// Counting check of the "2+" property for depth-2 designs: every ordered
/// column pair, with the first column kept at full resolution and the second
/// collapsed to its leading digit, fills all s^3 cells equally.
StrengthCheck check_soa_2plus(const Design& D);

}  // namespace sdphi
