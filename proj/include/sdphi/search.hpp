#pragma once

#include <cstdint>
#include <vector>

#include "sdphi/design.hpp"
#include "sdphi/metrics.hpp"
#include "sdphi/weights.hpp"

namespace sdphi {

/// Uniformly random balanced design: each column is an independent random
/// permutation of the multiset with every level repeated n/s^p times. The
/// seed fully determines the result, identically across platforms.
Design random_u_type(std::int64_t n, int m, std::int64_t s, int p, std::uint64_t seed);

/// Advances a mixing state and returns the next seed in a deterministic
/// stream, for generating independent replicates from one base seed.
std::uint64_t derive_seed(std::uint64_t& state);

struct SearchConfig {
  std::int64_t iterations = 20000;   // proposals per restart
  int restarts = 1;
  std::uint64_t seed = 0;
  double threshold_init_frac = 0.05; // initial threshold as a fraction of the energy range
  double threshold_decay = 0.95;     // per epoch of n*m proposals
};

struct SearchResult {
  Design best;
  double best_phi = 0;
  double phi_lb = 0;
  double gap = 0;                    // best_phi - phi_lb
  std::vector<double> restart_best;  // best criterion value per restart
  std::int64_t iterations_run = 0;   // total proposals across restarts
};

/// Threshold-accepting minimization of the projection criterion over
/// balanced designs of the given shape. Proposals swap two entries within a
/// column (preserving balance); a move is accepted when its exact energy
/// change stays below the current threshold, which decays geometrically.
/// Deterministic for a fixed config; restarts draw independent derived seeds.
SearchResult minimize_phi_sd(std::int64_t n, int m, std::int64_t s, int p, const WeightScheme& w,
                             const SearchConfig& cfg);

/// Exact scaled-integer change of the pair-distance energy if rows a and b
/// swapped their column-k entries, computed from the maintained distance
/// matrix in O(n). The entries must differ (a same-level swap is a no-op and
/// is rejected).
int128 incremental_swap_delta(const Design& D, const ScaledDistances& dist,
                              const ScaledPenalties& pens, int col, std::int64_t a, std::int64_t b);

}  // namespace sdphi
