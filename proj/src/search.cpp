#include "sdphi/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace sdphi {

namespace {

std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// mt19937_64 gives a standardized, platform-stable stream; the bounded draw
// is hand-rolled because the standard distributions are not reproducible
// across library implementations.
struct Rng {
  std::mt19937_64 engine;

  explicit Rng(std::uint64_t seed) : engine(seed) {}

  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t v;
    do {
      v = engine();
    } while (v >= limit);
    return v % n;
  }
};

// Swap-move bookkeeping over the full pair-distance matrix, shared by the
// exact scaled-integer path (T=int64, A=int128) and the floating path.
template <typename T, typename A>
struct SwapState {
  std::int64_t n = 0;
  int m = 0;
  std::int64_t s = 2;
  int p = 1;
  std::vector<std::int64_t> x;  // row-major entries
  std::vector<T> pen;           // penalty by agreement level 0..p
  std::vector<T> dist;          // n*n pair distances
  A g = 0;

  std::int64_t& at(std::int64_t row, int col) { return x[static_cast<std::size_t>(row) * m + col]; }
  std::int64_t at(std::int64_t row, int col) const {
    return x[static_cast<std::size_t>(row) * m + col];
  }
  T& d(std::int64_t a, std::int64_t b) { return dist[static_cast<std::size_t>(a) * n + b]; }
  T d(std::int64_t a, std::int64_t b) const { return dist[static_cast<std::size_t>(a) * n + b]; }

  int level(std::int64_t u, std::int64_t v) const {
    int lev = p;
    while (u != v) {
      u /= s;
      v /= s;
      --lev;
    }
    return lev;
  }

  void rebuild() {
    dist.assign(static_cast<std::size_t>(n) * n, T{0});
    g = 0;
    for (std::int64_t a = 0; a < n; ++a) {
      for (std::int64_t b = a + 1; b < n; ++b) {
        T dd{0};
        for (int k = 0; k < m; ++k) dd += pen[static_cast<std::size_t>(level(at(a, k), at(b, k)))];
        d(a, b) = dd;
        d(b, a) = dd;
        g += 2 * static_cast<A>(dd) * static_cast<A>(dd);
      }
    }
  }

  // Energy change if rows a and b swapped their column-col entries. The
  // (a,b) distance itself is invariant, so only pairs through third rows
  // move.
  A swap_delta(int col, std::int64_t a, std::int64_t b) const {
    const std::int64_t va = at(a, col);
    const std::int64_t vb = at(b, col);
    A delta = 0;
    for (std::int64_t c = 0; c < n; ++c) {
      if (c == a || c == b) continue;
      const std::int64_t vc = at(c, col);
      const T pa = pen[static_cast<std::size_t>(level(va, vc))];
      const T pb = pen[static_cast<std::size_t>(level(vb, vc))];
      if (pa == pb) continue;
      const T dac = d(a, c);
      const T dbc = d(b, c);
      const T nac = dac - pa + pb;
      const T nbc = dbc - pb + pa;
      delta += static_cast<A>(nac) * nac - static_cast<A>(dac) * dac +
               static_cast<A>(nbc) * nbc - static_cast<A>(dbc) * dbc;
    }
    return 2 * delta;
  }

  void apply(int col, std::int64_t a, std::int64_t b, A delta) {
    const std::int64_t va = at(a, col);
    const std::int64_t vb = at(b, col);
    for (std::int64_t c = 0; c < n; ++c) {
      if (c == a || c == b) continue;
      const std::int64_t vc = at(c, col);
      const T pa = pen[static_cast<std::size_t>(level(va, vc))];
      const T pb = pen[static_cast<std::size_t>(level(vb, vc))];
      if (pa == pb) continue;
      const T nac = d(a, c) - pa + pb;
      const T nbc = d(b, c) - pb + pa;
      d(a, c) = nac;
      d(c, a) = nac;
      d(b, c) = nbc;
      d(c, b) = nbc;
    }
    at(a, col) = vb;
    at(b, col) = va;
    g += delta;
  }
};

struct RestartOutcome {
  std::vector<std::int64_t> best_entries;
  double best_g = 0;  // energy of the restart's best design, unscaled
};

// One threshold-accepting trajectory from a fresh random design.
template <typename T, typename A>
RestartOutcome run_restart(SwapState<T, A>& state, double scale, double thr0, double decay,
                           std::int64_t iterations, Rng& rng) {
  const std::int64_t epoch = static_cast<std::int64_t>(state.n) * state.m;
  double thr_raw = thr0 * scale * scale;  // threshold in the state's units
  A threshold = static_cast<A>(thr_raw);
  A best_g = state.g;
  std::vector<std::int64_t> best = state.x;
  for (std::int64_t it = 0; it < iterations; ++it) {
    if (it > 0 && it % epoch == 0) {
      thr_raw *= decay;
      threshold = static_cast<A>(thr_raw);
    }
    const int col = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(state.m)));
    std::int64_t a = 0, b = 0;
    bool found = false;
    for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
      a = static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(state.n)));
      b = static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(state.n)));
      found = a != b && state.at(a, col) != state.at(b, col);
    }
    if (!found) continue;  // pathologically lopsided column, skip the proposal
    if (a > b) std::swap(a, b);
    const A delta = state.swap_delta(col, a, b);
    if (delta <= threshold) {
      state.apply(col, a, b, delta);
      if (state.g < best_g) {
        best_g = state.g;
        best = state.x;
      }
    }
  }
  RestartOutcome out;
  out.best_entries = std::move(best);
  out.best_g = static_cast<double>(best_g) / (scale * scale);
  return out;
}

}  // namespace

Design random_u_type(std::int64_t n, int m, std::int64_t s, int p, std::uint64_t seed) {
  const std::int64_t levels = ipow64(s, p);
  if (n < 1 || n % levels != 0)
    throw std::invalid_argument("balanced design needs s^p dividing n");
  if (m < 1) throw std::invalid_argument("design needs at least one column");
  Rng rng(seed);
  const std::int64_t reps = n / levels;
  std::vector<std::int64_t> entries(static_cast<std::size_t>(n) * m);
  std::vector<std::int64_t> column(static_cast<std::size_t>(n));
  for (int k = 0; k < m; ++k) {
    for (std::int64_t i = 0; i < n; ++i) column[static_cast<std::size_t>(i)] = i / reps;
    // Fisher-Yates with the portable bounded draw.
    for (std::int64_t i = n - 1; i > 0; --i) {
      const std::int64_t j =
          static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(i + 1)));
      std::swap(column[static_cast<std::size_t>(i)], column[static_cast<std::size_t>(j)]);
    }
    for (std::int64_t i = 0; i < n; ++i) entries[static_cast<std::size_t>(i) * m + k] = column[static_cast<std::size_t>(i)];
  }
  return make_design(n, m, s, p, std::move(entries));
}

SearchResult minimize_phi_sd(std::int64_t n, int m, std::int64_t s, int p, const WeightScheme& w,
                             const SearchConfig& cfg) {
  if (m < 2) throw std::invalid_argument("criterion search needs at least two columns");
  if (cfg.iterations < 0 || cfg.restarts < 1)
    throw std::invalid_argument("search needs a non-negative budget and at least one restart");
  const BoundsReport bnd = bounds(n, m, s, p, w);
  const KernelConstants kc = kernel_constants(w, m, n);
  const double thr0 = cfg.threshold_init_frac * (bnd.g_ub - bnd.g_lb);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);

  std::uint64_t seq = cfg.seed;
  SearchResult result;
  result.phi_lb = bnd.phi_lb;
  double global_g = 0;
  std::vector<std::int64_t> global_best;
  const bool exact = w.has_exact();
  ScaledPenalties sp;
  std::vector<double> pend;
  if (exact) {
    sp = scaled_penalties(w);
  } else {
    pend.assign(w.p + 1, 0.0);
    for (int lev = 0; lev <= w.p; ++lev)
      pend[static_cast<std::size_t>(lev)] = kc.a0 - kc.a0l[static_cast<std::size_t>(lev)];
  }

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    const std::uint64_t restart_seed = splitmix64_next(seq);
    Design start = random_u_type(n, m, s, p, restart_seed);
    Rng rng(splitmix64_next(seq));
    RestartOutcome outcome;
    if (exact) {
      SwapState<std::int64_t, int128> state;
      state.n = n;
      state.m = m;
      state.s = s;
      state.p = p;
      state.x = start.x;
      state.pen = sp.pen;
      state.rebuild();
      outcome = run_restart(state, static_cast<double>(sp.scale), thr0, cfg.threshold_decay,
                            cfg.iterations, rng);
    } else {
      SwapState<double, double> state;
      state.n = n;
      state.m = m;
      state.s = s;
      state.p = p;
      state.x = start.x;
      state.pen = pend;
      state.rebuild();
      outcome = run_restart(state, 1.0, thr0, cfg.threshold_decay, cfg.iterations, rng);
    }
    const double phi = outcome.best_g / (nd * nd * md * (md - 1)) + kc.c_sd;
    result.restart_best.push_back(phi);
    result.iterations_run += cfg.iterations;
    if (restart == 0 || outcome.best_g < global_g) {
      global_g = outcome.best_g;
      global_best = std::move(outcome.best_entries);
    }
  }
  result.best = make_design(n, m, s, p, std::move(global_best));
  result.best_phi = global_g / (nd * nd * md * (md - 1)) + kc.c_sd;
  result.gap = result.best_phi - result.phi_lb;
  return result;
}

std::uint64_t derive_seed(std::uint64_t& state) { return splitmix64_next(state); }

int128 incremental_swap_delta(const Design& D, const ScaledDistances& dist,
                              const ScaledPenalties& pens, int col, std::int64_t a,
                              std::int64_t b) {
  if (col < 0 || col >= D.m) throw std::invalid_argument("column index out of range");
  if (a < 0 || a >= D.n || b < 0 || b >= D.n || a == b)
    throw std::invalid_argument("swap needs two distinct run indices");
  const std::int64_t va = D.at(a, col);
  const std::int64_t vb = D.at(b, col);
  if (va == vb) throw std::invalid_argument("swap of equal entries is a no-op");
  const Stratification st = Stratification::of(D);
  int128 delta = 0;
  for (std::int64_t c = 0; c < D.n; ++c) {
    if (c == a || c == b) continue;
    const std::int64_t vc = D.at(c, col);
    const std::int64_t pa = pens.pen[static_cast<std::size_t>(st.agreement(va, vc))];
    const std::int64_t pb = pens.pen[static_cast<std::size_t>(st.agreement(vb, vc))];
    if (pa == pb) continue;
    const std::int64_t dac = dist.at(a, c);
    const std::int64_t dbc = dist.at(b, c);
    const std::int64_t nac = dac - pa + pb;
    const std::int64_t nbc = dbc - pb + pa;
    delta += static_cast<int128>(nac) * nac - static_cast<int128>(dac) * dac +
             static_cast<int128>(nbc) * nbc - static_cast<int128>(dbc) * dbc;
  }
  return 2 * delta;
}

}  // namespace sdphi
