#include "sdphi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "sdphi/gf.hpp"
#include "sdphi/tolerance.hpp"

namespace sdphi {

namespace {

constexpr double kCellBudget = 1e8;

void check_context(const Design& D, const WeightScheme& w, const Stratification& st) {
  if (w.s != st.s || w.p != st.p)
    throw std::invalid_argument("weight scheme was materialized for a different (s, p)");
  if (st.domain != D.levels())
    throw std::invalid_argument("stratification domain does not match the design's level count");
}

// Partial sums of omega(i)/s^i, plus the diagonal constants, straight from
// the scheme (kernel_constants requires m >= 2, this does not).
struct KernelTables {
  std::vector<double> a0l;
  double a0 = 0;
  double a1 = 0;

  explicit KernelTables(const WeightScheme& w) {
    a0l.assign(w.p + 1, 0.0);
    double si = 1.0, acc = 0.0;
    for (int i = 0; i <= w.p; ++i) {
      acc += w.w[i] / si;
      a0l[i] = acc;
      a1 += w.w[i] / (si * si);
      si *= static_cast<double>(w.s);
    }
    a0 = a0l[w.p];
  }
};

double pair_distance(const Design& D, const Stratification& st, const std::vector<double>& pen,
                     std::int64_t a, std::int64_t b) {
  double d = 0.0;
  for (int k = 0; k < D.m; ++k) d += pen[st.agreement(D.at(a, k), D.at(b, k))];
  return d;
}

// sd2 restricted to a subset of columns; the workhorse behind sd2 itself and
// the projection averages.
double sd2_on_columns(const Design& D, const WeightScheme& w, const Stratification& st,
                      const std::vector<int>& cols) {
  KernelTables kt(w);
  const std::int64_t n = D.n;
  const double nd = static_cast<double>(n);
  double cross = 0.0;
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = a + 1; b < n; ++b) {
      double prod = 1.0;
      for (int k : cols) prod *= kt.a0l[st.agreement(D.at(a, k), D.at(b, k))];
      cross += prod;
    }
  }
  const auto mc = static_cast<double>(cols.size());
  double diag = nd * std::pow(kt.a0, mc);
  return -std::pow(kt.a1, mc) + (2.0 * cross + diag) / (nd * nd);
}

std::vector<int> all_columns(const Design& D) {
  std::vector<int> cols(D.m);
  std::iota(cols.begin(), cols.end(), 0);
  return cols;
}

}  // namespace

Stratification Stratification::of(const Design& d) {
  return embedded(d.levels(), d.s, d.p);
}

Stratification Stratification::embedded(std::int64_t domain, std::int64_t s, int p) {
  if (domain < 1) throw std::invalid_argument("stratification domain must be positive");
  if (s < 2 || p < 1) throw std::invalid_argument("stratification base/depth out of range");
  Stratification st;
  st.domain = domain;
  st.s = s;
  st.p = p;
  st.spow_.assign(p + 1, 1);
  for (int i = 1; i <= p; ++i) {
    // Keep s^p small enough that the midpoint products below stay in int64.
    if (st.spow_[i - 1] > (std::int64_t{1} << 40) / s)
      throw std::invalid_argument("stratification base^depth too large");
    st.spow_[i] = st.spow_[i - 1] * s;
  }
  st.native = st.spow_[p] == domain;
  return st;
}

std::int64_t Stratification::stratum(std::int64_t x, int i) const {
  if (i < 0 || i > p) throw std::invalid_argument("resolution out of range");
  if (native) return x / spow_[p - i];
  // Midpoint rule in exact integer arithmetic: floor(s^i (2x+1) / (2 domain)).
  return spow_[i] * (2 * x + 1) / (2 * domain);
}

bool Stratification::agree(std::int64_t x, std::int64_t y, int i) const {
  return stratum(x, i) == stratum(y, i);
}

int Stratification::agreement(std::int64_t x, std::int64_t y) const {
  if (native) {
    // Strata are digit prefixes: strip digits until the labels coincide.
    int lev = p;
    while (x != y) {
      x /= s;
      y /= s;
      --lev;
    }
    return lev;
  }
  // Nested strata: agreement at resolution i implies agreement at i-1, so
  // scan from the finest level down. Resolution 0 always agrees.
  for (int i = p; i > 0; --i)
    if (stratum(x, i) == stratum(y, i)) return i;
  return 0;
}

int Stratification::rho(std::int64_t x, std::int64_t y) const {
  if (!native) throw std::invalid_argument("hierarchical distance needs native labels");
  int t = 0;
  while (x != y) {
    x /= s;
    y /= s;
    ++t;
  }
  return t;
}

int delta_i(std::int64_t x, std::int64_t y, int i, std::int64_t s, int p) {
  if (i < 0 || i > p) throw std::invalid_argument("resolution out of range");
  std::int64_t div = ipow64(s, p - i);
  return x / div == y / div ? 1 : 0;
}

DistanceMatrix distance_matrix(const Design& D, const WeightScheme& w) {
  return distance_matrix(D, w, Stratification::of(D));
}

DistanceMatrix distance_matrix(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  KernelTables kt(w);
  std::vector<double> pen(w.p + 1);
  for (int lev = 0; lev <= w.p; ++lev) pen[lev] = kt.a0 - kt.a0l[lev];
  DistanceMatrix out;
  out.n = D.n;
  out.d.assign(static_cast<std::size_t>(D.n) * D.n, 0.0);
  for (std::int64_t a = 0; a < D.n; ++a) {
    for (std::int64_t b = a + 1; b < D.n; ++b) {
      double d = pair_distance(D, st, pen, a, b);
      out.d[static_cast<std::size_t>(a) * D.n + b] = d;
      out.d[static_cast<std::size_t>(b) * D.n + a] = d;
      out.g_d += 2.0 * d * d;
    }
  }
  return out;
}

ScaledPenalties scaled_penalties(const WeightScheme& w) {
  if (!w.has_exact())
    throw std::invalid_argument("scaled-integer distances need exact weights");
  ScaledPenalties out;
  // scale = s^p * lcm of weight denominators makes every omega(i)/s^i an
  // integer multiple of 1/scale.
  int128 lcm = 1;
  for (const Rational& r : w.exact) {
    int128 g = detail::gcd128(lcm, r.den());
    lcm = detail::checked_mul(lcm / g, r.den());
  }
  int128 scale128 = detail::checked_mul(ipow128(w.s, w.p), lcm);
  if (scale128 > std::numeric_limits<std::int64_t>::max()) throw RationalOverflow{};
  out.scale = static_cast<std::int64_t>(scale128);
  // pen[lev] = scale * sum_{i > lev} omega(i)/s^i, accumulated from the top;
  // pen[p] stays zero because full agreement contributes no distance.
  out.pen.assign(w.p + 1, 0);
  int128 acc = 0;
  for (int i = w.p; i >= 1; --i) {
    Rational term = w.exact[i] / Rational(ipow128(w.s, i), 1);
    int128 scaled = detail::checked_mul(term.num(), scale128 / term.den());
    acc = detail::checked_add(acc, scaled);
    if (acc > std::numeric_limits<std::int64_t>::max()) throw RationalOverflow{};
    out.pen[i - 1] = static_cast<std::int64_t>(acc);
  }
  return out;
}

ScaledDistances scaled_distance_matrix(const Design& D, const WeightScheme& w) {
  return scaled_distance_matrix(D, w, Stratification::of(D));
}

ScaledDistances scaled_distance_matrix(const Design& D, const WeightScheme& w,
                                       const Stratification& st) {
  check_context(D, w, st);
  ScaledPenalties sp = scaled_penalties(w);
  // pen[0] is the largest per-coordinate penalty; once m * pen[0] fits in
  // int64 the per-pair accumulation cannot overflow.
  if (detail::checked_mul(static_cast<int128>(D.m), sp.pen[0]) >
      std::numeric_limits<std::int64_t>::max())
    throw RationalOverflow{};
  ScaledDistances out;
  out.n = D.n;
  out.scale = sp.scale;
  out.d.assign(static_cast<std::size_t>(D.n) * D.n, 0);
  for (std::int64_t a = 0; a < D.n; ++a) {
    for (std::int64_t b = a + 1; b < D.n; ++b) {
      std::int64_t d = 0;
      for (int k = 0; k < D.m; ++k) d += sp.pen[st.agreement(D.at(a, k), D.at(b, k))];
      out.d[static_cast<std::size_t>(a) * D.n + b] = d;
      out.d[static_cast<std::size_t>(b) * D.n + a] = d;
      out.g_scaled = detail::checked_add(
          out.g_scaled, detail::checked_mul(2, detail::checked_mul(static_cast<int128>(d), d)));
    }
  }
  return out;
}

double sd2(const Design& D, const WeightScheme& w) { return sd2(D, w, Stratification::of(D)); }

double sd2(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  return sd2_on_columns(D, w, st, all_columns(D));
}

double sd2_cell_oracle(const Design& D, const WeightScheme& w) {
  return sd2_cell_oracle(D, w, Stratification::of(D));
}

double sd2_cell_oracle(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  // Resolutions that actually contribute.
  std::vector<int> active;
  for (int i = 0; i <= w.p; ++i)
    if (w.w[i] != 0.0) active.push_back(i);
  // Budget: sum over resolution vectors of the cell count factors as
  // (sum_i s^i)^m over active resolutions.
  double per_column = 0.0;
  for (int i : active) per_column += std::pow(static_cast<double>(st.s), i);
  if (std::pow(per_column, D.m) > kCellBudget)
    throw std::length_error("stratum enumeration exceeds the 1e8 cell budget");

  const std::int64_t n = D.n;
  const double nd = static_cast<double>(n);
  std::vector<std::size_t> idx(D.m, 0);  // odometer over active resolutions
  std::vector<std::int64_t> spow(w.p + 1, 1);
  for (int i = 1; i <= w.p; ++i) spow[i] = spow[i - 1] * st.s;
  std::unordered_map<std::int64_t, std::int64_t> counts;
  double total = 0.0;
  while (true) {
    double weight = 1.0;
    double cells = 1.0;
    for (int k = 0; k < D.m; ++k) {
      int u = active[idx[k]];
      weight *= w.w[u];
      cells *= static_cast<double>(spow[u]);
    }
    const double volume = 1.0 / cells;
    counts.clear();
    for (std::int64_t r = 0; r < n; ++r) {
      std::int64_t key = 0, stride = 1;
      for (int k = 0; k < D.m; ++k) {
        int u = active[idx[k]];
        key += st.stratum(D.at(r, k), u) * stride;
        stride *= spow[u];
      }
      ++counts[key];
    }
    // Sum over all cells of volume * (volume - count/n)^2, folding the empty
    // cells into a closed form so only occupied cells are visited.
    double occupied = 0.0;
    for (const auto& [key, c] : counts) {
      double dev = volume - static_cast<double>(c) / nd;
      occupied += dev * dev - volume * volume;
    }
    total += weight * (volume * volume + volume * occupied);
    // Advance the odometer.
    int k = 0;
    while (k < D.m) {
      if (++idx[k] < active.size()) break;
      idx[k] = 0;
      ++k;
    }
    if (k == D.m) break;
  }
  return total;
}

double phi_sd_oracle(const Design& D, const WeightScheme& w) {
  return phi_sd_oracle(D, w, Stratification::of(D));
}

double phi_sd_oracle(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  if (D.m < 2) throw std::invalid_argument("projection criterion needs at least two columns");
  double acc = 0.0;
  for (int k1 = 0; k1 < D.m; ++k1)
    for (int k2 = k1 + 1; k2 < D.m; ++k2) acc += sd2_on_columns(D, w, st, {k1, k2});
  const double md = static_cast<double>(D.m);
  return 2.0 * acc / (md * (md - 1));
}

double phi_sd_fast(const Design& D, const WeightScheme& w) {
  return phi_sd_fast(D, w, Stratification::of(D));
}

double phi_sd_fast(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  if (!st.native)
    throw std::invalid_argument("fast projection path needs a native-level stratification");
  if (D.m < 2) throw std::invalid_argument("projection criterion needs at least two columns");
  if (!D.is_u_type())
    throw std::invalid_argument("fast projection path needs balanced (U-type) columns");
  const KernelConstants kc = kernel_constants(w, D.m, D.n);
  const double nd = static_cast<double>(D.n);
  const double md = static_cast<double>(D.m);
  double g = 0.0;
  if (w.has_exact()) {
    // Exact energy in scaled integers, converted once at the end.
    ScaledPenalties sp = scaled_penalties(w);
    if (detail::checked_mul(static_cast<int128>(D.m), sp.pen[0]) >
        std::numeric_limits<std::int64_t>::max())
      throw RationalOverflow{};
    int128 acc = 0;
    for (std::int64_t a = 0; a < D.n; ++a) {
      for (std::int64_t b = a + 1; b < D.n; ++b) {
        std::int64_t d = 0;
        for (int k = 0; k < D.m; ++k) d += sp.pen[st.agreement(D.at(a, k), D.at(b, k))];
        acc = detail::checked_add(acc, 2 * detail::checked_mul(static_cast<int128>(d), d));
      }
    }
    g = Rational(acc, detail::checked_mul(sp.scale, sp.scale)).to_double();
  } else {
    KernelTables kt(w);
    std::vector<double> pen(w.p + 1);
    for (int lev = 0; lev <= w.p; ++lev) pen[lev] = kt.a0 - kt.a0l[lev];
    for (std::int64_t a = 0; a < D.n; ++a) {
      for (std::int64_t b = a + 1; b < D.n; ++b) {
        double d = pair_distance(D, st, pen, a, b);
        g += 2.0 * d * d;
      }
    }
  }
  return g / (nd * nd * md * (md - 1)) + kc.c_sd;
}

PhiResult phi_sd(const Design& D, const WeightScheme& w) {
  return phi_sd(D, w, Stratification::of(D));
}

PhiResult phi_sd(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  if (st.native && D.is_u_type()) return {phi_sd_fast(D, w, st), true};
  return {phi_sd_oracle(D, w, st), false};
}

double phi_sd3(const Design& D, const WeightScheme& w) {
  return phi_sd3(D, w, Stratification::of(D));
}

double phi_sd3(const Design& D, const WeightScheme& w, const Stratification& st) {
  check_context(D, w, st);
  if (D.m < 3) throw std::invalid_argument("three-column criterion needs at least three columns");
  double acc = 0.0;
  for (int k1 = 0; k1 < D.m; ++k1)
    for (int k2 = k1 + 1; k2 < D.m; ++k2)
      for (int k3 = k2 + 1; k3 < D.m; ++k3) acc += sd2_on_columns(D, w, st, {k1, k2, k3});
  const double md = static_cast<double>(D.m);
  return 6.0 * acc / (md * (md - 1) * (md - 2));
}

double dab_nrt(const Design& D, const WeightScheme& w, std::int64_t a, std::int64_t b) {
  const Stratification st = Stratification::of(D);
  check_context(D, w, st);
  if (a < 0 || a >= D.n || b < 0 || b >= D.n) throw std::invalid_argument("run index out of range");
  KernelTables kt(w);
  double d = 0.0;
  for (int k = 0; k < D.m; ++k) {
    int r = nrt_distance(D.at(a, k), D.at(b, k), D.s, D.p);
    d += kt.a0 - kt.a0l[D.p - r];
  }
  return d;
}

BoundsReport bounds(std::int64_t n, int m, std::int64_t s, int p, const WeightScheme& w) {
  if (w.s != s || w.p != p)
    throw std::invalid_argument("weight scheme was materialized for a different (s, p)");
  if (n < 2) throw std::invalid_argument("bounds need at least two runs");
  const KernelConstants kc = kernel_constants(w, m, n);
  const double nd = static_cast<double>(n);
  const double md = static_cast<double>(m);
  const double sd = static_cast<double>(s);
  BoundsReport out;
  out.d_bar = kc.d_bar;
  const double gap = kc.a0 - kc.a1;
  out.g_lb = nd * nd * nd * md * md * gap * gap / (nd - 1);
  double ub_sum = 0.0, ub_phi_sum = 0.0, sl1 = sd;  // s^(l+1)
  for (int l = 0; l < p; ++l) {
    const double coeff = (sd - 1) / sl1;
    const double tail = kc.a0 - kc.a0l[l];
    ub_sum += coeff * tail * tail;
    ub_phi_sum += coeff * kc.a0l[l] * kc.a0l[l];
    sl1 *= sd;
  }
  out.g_ub = nd * nd * md * md * ub_sum;
  out.phi_lb = md / ((nd - 1) * (md - 1)) * kc.a0 * kc.a0 -
               2 * md / ((nd - 1) * (md - 1)) * kc.a0 * kc.a1 +
               (nd + md - 1) / ((nd - 1) * (md - 1)) * kc.a1 * kc.a1 - kc.b / (md - 1) -
               2 * kc.c / (md - 1);
  out.phi_ub = md / ((md - 1) * std::pow(sd, p)) * kc.a0 * kc.a0 - kc.a1 * kc.a1 +
               md / (md - 1) * ub_phi_sum - kc.b / (md - 1) - 2 * kc.c / (md - 1);
  return out;
}

BoundsExact bounds_exact(std::int64_t n, int m, std::int64_t s, int p, const WeightScheme& w) {
  if (w.s != s || w.p != p)
    throw std::invalid_argument("weight scheme was materialized for a different (s, p)");
  if (n < 2) throw std::invalid_argument("bounds need at least two runs");
  const KernelConstantsExact kc = kernel_constants_exact(w, m, n);
  const Rational nd(n), md(m), sd(s);
  BoundsExact out;
  out.d_bar = kc.d_bar;
  const Rational gap = kc.a0 - kc.a1;
  out.g_lb = nd * nd * nd * md * md * gap * gap / (nd - Rational(1));
  Rational ub_sum(0), ub_phi_sum(0);
  for (int l = 0; l < p; ++l) {
    const Rational coeff = (sd - Rational(1)) / Rational(ipow128(s, l + 1), 1);
    const Rational tail = kc.a0 - kc.a0l[l];
    ub_sum += coeff * tail * tail;
    ub_phi_sum += coeff * kc.a0l[l] * kc.a0l[l];
  }
  out.g_ub = nd * nd * md * md * ub_sum;
  const Rational n1 = nd - Rational(1);
  const Rational m1 = md - Rational(1);
  out.phi_lb = md / (n1 * m1) * kc.a0 * kc.a0 - Rational(2) * md / (n1 * m1) * kc.a0 * kc.a1 +
               (nd + md - Rational(1)) / (n1 * m1) * kc.a1 * kc.a1 - kc.b / m1 -
               Rational(2) * kc.c / m1;
  out.phi_ub = md / (m1 * Rational(ipow128(s, p), 1)) * kc.a0 * kc.a0 - kc.a1 * kc.a1 +
               md / m1 * ub_phi_sum - kc.b / m1 - Rational(2) * kc.c / m1;
  return out;
}

void attainment(BoundsReport& b, const Design& D, const WeightScheme& w) {
  attainment(b, D, w, Stratification::of(D));
}

void attainment(BoundsReport& b, const Design& D, const WeightScheme& w,
                const Stratification& st) {
  check_context(D, w, st);
  if (!st.native)
    throw std::invalid_argument("bound attainment is defined on native-level stratifications");
  if (D.n < 2) {
    b.attained_lb = b.attained_ub = false;
    return;
  }
  if (w.has_exact()) {
    const ScaledDistances sd = scaled_distance_matrix(D, w, st);
    const BoundsExact be = bounds_exact(D.n, D.m, st.s, st.p, w);
    const KernelConstantsExact kc = kernel_constants_exact(w, D.m, D.n);
    bool all_dbar = true;
    for (std::int64_t a = 0; a < D.n && all_dbar; ++a)
      for (std::int64_t b2 = a + 1; b2 < D.n && all_dbar; ++b2)
        all_dbar = Rational(sd.at(a, b2), sd.scale) == kc.d_bar;
    b.attained_lb = all_dbar;
    b.attained_ub = sd.g_exact() == be.g_ub;
    return;
  }
  const DistanceMatrix dm = distance_matrix(D, w, st);
  bool all_dbar = true;
  for (std::int64_t a = 0; a < D.n && all_dbar; ++a)
    for (std::int64_t b2 = a + 1; b2 < D.n && all_dbar; ++b2)
      all_dbar = tol::attained(dm.at(a, b2), b.d_bar);
  b.attained_lb = all_dbar;
  b.attained_ub = std::fabs(dm.g_d - b.g_ub) <= tol::kAbsAttain * std::max(1.0, std::fabs(b.g_ub));
}

DistanceDistribution distance_distribution(const Design& D, const WeightScheme& w) {
  return distance_distribution(D, w, Stratification::of(D));
}

DistanceDistribution distance_distribution(const Design& D, const WeightScheme& w,
                                           const Stratification& st) {
  check_context(D, w, st);
  DistanceDistribution out;
  out.pair_count = D.n * (D.n - 1) / 2;
  if (out.pair_count == 0) return out;
  std::vector<double> all;
  all.reserve(static_cast<std::size_t>(out.pair_count));
  if (w.has_exact()) {
    // Group in scaled integers so equal distances collapse exactly.
    const ScaledDistances sd = scaled_distance_matrix(D, w, st);
    std::vector<std::int64_t> vals;
    vals.reserve(all.capacity());
    for (std::int64_t a = 0; a < D.n; ++a)
      for (std::int64_t b = a + 1; b < D.n; ++b) vals.push_back(sd.at(a, b));
    std::sort(vals.begin(), vals.end());
    for (std::size_t i = 0; i < vals.size();) {
      std::size_t j = i;
      while (j < vals.size() && vals[j] == vals[i]) ++j;
      out.values.emplace_back(Rational(vals[i], sd.scale).to_double(),
                              static_cast<std::int64_t>(j - i));
      i = j;
    }
    for (std::int64_t v : vals) all.push_back(Rational(v, sd.scale).to_double());
  } else {
    const DistanceMatrix dm = distance_matrix(D, w, st);
    for (std::int64_t a = 0; a < D.n; ++a)
      for (std::int64_t b = a + 1; b < D.n; ++b) all.push_back(dm.at(a, b));
    std::sort(all.begin(), all.end());
    for (std::size_t i = 0; i < all.size();) {
      std::size_t j = i;
      while (j < all.size() && all[j] - all[i] <= tol::kAbsAttain) ++j;
      out.values.emplace_back(all[i], static_cast<std::int64_t>(j - i));
      i = j;
    }
  }
  std::sort(all.begin(), all.end());
  out.min = all.front();
  out.max = all.back();
  out.mean = std::accumulate(all.begin(), all.end(), 0.0) / static_cast<double>(all.size());
  const std::size_t h = all.size() / 2;
  out.median = all.size() % 2 ? all[h] : 0.5 * (all[h - 1] + all[h]);
  return out;
}

void write_distance_csv(std::ostream& out, const Design& D, const WeightScheme& w) {
  const DistanceMatrix dm = distance_matrix(D, w);
  out << "a,b,d\n";
  char buf[64];
  for (std::int64_t a = 0; a < D.n; ++a) {
    for (std::int64_t b = a + 1; b < D.n; ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", dm.at(a, b));
      out << (a + 1) << "," << (b + 1) << "," << buf << "\n";
    }
  }
}

}  // namespace sdphi
