#include "sdphi/patterns.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "sdphi/gf.hpp"
#include "sdphi/metrics.hpp"

namespace sdphi {

namespace {

constexpr double kFullBudget = 1e7;
constexpr int kMaxTotalDepth = 62;  // m*p cap keeps s^(pm) inside 64-bit totals
constexpr double kSnapTol = 1e-6;

using cplx = std::complex<double>;

// Character sums of integer designs are integers; snap away the float fuzz.
double snap_integer(double v) {
  double r = std::round(v);
  return std::fabs(v - r) <= kSnapTol ? r : v;
}

// Bilinear pairing of two labels: digits of u in reverse order dotted with
// digits of x, mod s. Pairs each coarse digit of one label with the fine
// digit of the other, which is what makes the induced characters separate
// strata by resolution.
int pairing(std::int64_t u, std::int64_t x, std::int64_t s, int p) {
  std::int64_t acc = 0;
  // k-th lowest digit of u against (p-1-k)-th lowest digit of x.
  std::int64_t xr = 0;  // digits of x reversed, built on the fly
  for (int k = 0; k < p; ++k) {
    xr = xr * s + x % s;
    x /= s;
  }
  while (u > 0) {
    acc += (u % s) * (xr % s);
    u /= s;
    xr /= s;
  }
  return static_cast<int>(acc % s);
}

// Hierarchical weight of a frequency label: 0 for 0, otherwise the digit
// length, i.e. the unique d with s^(d-1) <= u < s^d.
std::vector<int> weight_table(std::int64_t q, std::int64_t s) {
  std::vector<int> rho(static_cast<std::size_t>(q), 0);
  int d = 1;
  std::int64_t lo = 1, hi = s;
  while (lo < q) {
    for (std::int64_t u = lo; u < std::min(hi, q); ++u) rho[static_cast<std::size_t>(u)] = d;
    lo = hi;
    hi *= s;
    ++d;
  }
  return rho;
}

std::vector<cplx> unit_roots(std::int64_t s) {
  std::vector<cplx> roots(static_cast<std::size_t>(s));
  for (std::int64_t t = 0; t < s; ++t) {
    double ang = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(s);
    roots[static_cast<std::size_t>(t)] = {std::cos(ang), std::sin(ang)};
  }
  return roots;
}

void require_prime_base(const Design& D) {
  if (!is_prime(D.s))
    throw std::invalid_argument("character analysis needs a prime stratification base");
}

// Shared recursion state for both full and truncated enumeration.
struct SpectrumWalker {
  const Design& D;
  std::int64_t q;
  std::vector<int> rho_of;
  std::vector<cplx> roots;
  std::vector<std::vector<cplx>> stack;  // one row buffer per recursion depth
  std::vector<double>* s_j = nullptr;
  int jmax = 0;

  explicit SpectrumWalker(const Design& d)
      : D(d), q(d.levels()), rho_of(weight_table(q, d.s)), roots(unit_roots(d.s)) {
    stack.assign(static_cast<std::size_t>(D.m) + 1, std::vector<cplx>(static_cast<std::size_t>(D.n)));
    std::fill(stack[0].begin(), stack[0].end(), cplx{1.0, 0.0});
  }

  void leaf(int rho_used, const std::vector<cplx>& acc) {
    cplx total{0.0, 0.0};
    for (const cplx& v : acc) total += v;
    double mass = snap_integer(std::norm(total));
    (*s_j)[static_cast<std::size_t>(rho_used)] +=
        mass / (static_cast<double>(D.n) * static_cast<double>(D.n));
  }

  void descend(int col, std::int64_t u, const std::vector<cplx>& src, std::vector<cplx>& dst) {
    for (std::int64_t r = 0; r < D.n; ++r)
      dst[static_cast<std::size_t>(r)] =
          src[static_cast<std::size_t>(r)] *
          roots[static_cast<std::size_t>(pairing(u, D.at(r, col), D.s, D.p))];
  }

  // Every frequency vector (full enumeration).
  void walk_full(int col, int rho_used) {
    if (col == D.m) {
      leaf(rho_used, stack[static_cast<std::size_t>(col)]);
      return;
    }
    for (std::int64_t u = 0; u < q; ++u) {
      descend(col, u, stack[static_cast<std::size_t>(col)], stack[static_cast<std::size_t>(col) + 1]);
      walk_full(col + 1, rho_used + rho_of[static_cast<std::size_t>(u)]);
    }
  }

  // Only frequency vectors of total weight <= jmax: the zero branch shares
  // the parent buffer, nonzero branches multiply into the next buffer.
  void walk_truncated(int col, int rho_used, int depth) {
    if (col == D.m) {
      leaf(rho_used, stack[static_cast<std::size_t>(depth)]);
      return;
    }
    walk_truncated(col + 1, rho_used, depth);
    std::int64_t lo = 1;
    for (int d = 1; d <= D.p && rho_used + d <= jmax; ++d) {
      std::int64_t hi = std::min(lo * D.s, q);
      for (std::int64_t u = lo; u < hi; ++u) {
        descend(col, u, stack[static_cast<std::size_t>(depth)],
                stack[static_cast<std::size_t>(depth) + 1]);
        walk_truncated(col + 1, rho_used + d, depth + 1);
      }
      lo = hi;
    }
  }
};

PatternSpectrum make_spectrum_shell(const Design& D, int upto) {
  PatternSpectrum out;
  out.n = D.n;
  out.m = D.m;
  out.s = D.s;
  out.p = D.p;
  out.upto = upto;
  out.s_j.assign(static_cast<std::size_t>(D.m) * D.p + 1, 0.0);
  return out;
}

}  // namespace

double PatternSpectrum::total() const {
  double t = 0.0;
  for (double v : s_j) t += v;
  return t;
}

double character_sum(const Design& D, const std::vector<std::int64_t>& u) {
  require_prime_base(D);
  if (static_cast<int>(u.size()) != D.m)
    throw std::invalid_argument("frequency vector length must match the column count");
  const std::int64_t q = D.levels();
  for (std::int64_t uk : u)
    if (uk < 0 || uk >= q) throw std::invalid_argument("frequency label out of range");
  const auto roots = unit_roots(D.s);
  cplx total{0.0, 0.0};
  for (std::int64_t r = 0; r < D.n; ++r) {
    std::int64_t e = 0;
    for (int k = 0; k < D.m; ++k) e += pairing(u[static_cast<std::size_t>(k)], D.at(r, k), D.s, D.p);
    total += roots[static_cast<std::size_t>(e % D.s)];
  }
  return snap_integer(std::norm(total));
}

PatternSpectrum space_filling_pattern(const Design& D) {
  require_prime_base(D);
  if (D.m * D.p > kMaxTotalDepth)
    throw std::length_error("full pattern enumeration capped at total depth 62");
  if (std::pow(static_cast<double>(D.levels()), D.m) > kFullBudget)
    throw std::length_error("full pattern enumeration exceeds the 1e7 budget");
  PatternSpectrum out = make_spectrum_shell(D, D.m * D.p);
  SpectrumWalker walker(D);
  walker.s_j = &out.s_j;
  walker.walk_full(0, 0);
  return out;
}

PatternSpectrum space_filling_pattern_partial(const Design& D, int jmax) {
  require_prime_base(D);
  if (jmax < 0 || jmax > D.m * D.p)
    throw std::invalid_argument("truncation weight out of range");
  PatternSpectrum out = make_spectrum_shell(D, jmax);
  SpectrumWalker walker(D);
  walker.s_j = &out.s_j;
  walker.jmax = jmax;
  walker.walk_truncated(0, 0, 0);
  return out;
}

EnumeratorReport enumerators(const Design& D, double y) {
  require_prime_base(D);
  if (D.m < 2) throw std::invalid_argument("pairwise enumerator needs at least two columns");
  EnumeratorReport out;
  out.y = y;
  const std::size_t sbar_len = std::max(static_cast<std::size_t>(2 * D.p + 1), std::size_t{4});
  out.sbar.assign(sbar_len, 0.0);
  const double pairs = static_cast<double>(D.m) * (D.m - 1) / 2.0;
  for (int k1 = 0; k1 < D.m; ++k1) {
    for (int k2 = k1 + 1; k2 < D.m; ++k2) {
      std::vector<std::int64_t> cols(static_cast<std::size_t>(D.n) * 2);
      for (std::int64_t r = 0; r < D.n; ++r) {
        cols[static_cast<std::size_t>(r) * 2] = D.at(r, k1);
        cols[static_cast<std::size_t>(r) * 2 + 1] = D.at(r, k2);
      }
      Design sub = make_design(D.n, 2, D.s, D.p, std::move(cols));
      PatternSpectrum ps = space_filling_pattern(sub);
      for (std::size_t j = 0; j < ps.s_j.size(); ++j) out.sbar[j] += ps.s_j[j] / pairs;
    }
  }
  out.sbar1 = out.sbar[1];
  out.sbar2 = out.sbar[2];
  out.sbar3 = out.sbar[3];
  double yj = 1.0;
  for (double sj : out.sbar) {
    out.pairwise += sj * yj;
    yj *= y;
  }
  const double full_size = std::pow(static_cast<double>(D.levels()), D.m);
  if (full_size <= kFullBudget && D.m * D.p <= kMaxTotalDepth) {
    PatternSpectrum ps = space_filling_pattern(D);
    double acc = 0.0;
    yj = 1.0;
    for (double sj : ps.s_j) {
      acc += sj * yj;
      yj *= y;
    }
    out.whole = acc;
  }
  return out;
}

EnumeratorIdentity check_enumerator_identity(const Design& D, double y) {
  require_prime_base(D);
  if (!(y > 0.0 && y < 1.0)) throw std::invalid_argument("enumerator argument needs 0 < y < 1");
  EnumeratorIdentity out;
  const EnumeratorReport rep = enumerators(D, y);
  out.phi_via_enumerator = (rep.pairwise - 1.0) / ((1.0 - y) * (1.0 - y));
  const WeightScheme w = make_weights(WeightTag::Enumerator, D.s, D.p, y);
  out.phi_via_kernel = phi_sd(D, w).value;
  out.difference = out.phi_via_enumerator - out.phi_via_kernel;
  return out;
}

namespace {

// Enumerate positive resolution splits of t over a fixed column subset and
// verify equal cell occupancy for each; returns true when all pass.
bool check_split(const Design& D, const std::vector<int>& cols, std::vector<int>& comp, int idx,
                 int remaining, std::int64_t expected, StrengthCheck& result) {
  const int g = static_cast<int>(cols.size());
  if (idx == g) {
    if (remaining != 0) return true;  // split does not use exactly t, skip
    // Count occupancy over the cell grid defined by this split.
    std::int64_t cells = 1;
    for (int k = 0; k < g; ++k) cells *= ipow64(D.s, comp[static_cast<std::size_t>(k)]);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(cells), 0);
    const Stratification st = Stratification::of(D);
    for (std::int64_t r = 0; r < D.n; ++r) {
      std::int64_t key = 0;
      for (int k = 0; k < g; ++k) {
        const int u = comp[static_cast<std::size_t>(k)];
        key = key * ipow64(D.s, u) + st.stratum(D.at(r, cols[static_cast<std::size_t>(k)]), u);
      }
      ++counts[static_cast<std::size_t>(key)];
    }
    for (std::int64_t cell = 0; cell < cells; ++cell) {
      if (counts[static_cast<std::size_t>(cell)] == expected) continue;
      StrengthWitness wit;
      wit.reason = "unequal cell occupancy";
      wit.columns = cols;
      wit.resolutions = comp;
      // Decode the flat cell key back into per-column stratum coordinates.
      std::int64_t rest = cell;
      wit.cell.assign(static_cast<std::size_t>(g), 0);
      for (int k = g - 1; k >= 0; --k) {
        const std::int64_t span = ipow64(D.s, comp[static_cast<std::size_t>(k)]);
        wit.cell[static_cast<std::size_t>(k)] = rest % span;
        rest /= span;
      }
      wit.count = counts[static_cast<std::size_t>(cell)];
      wit.expected = expected;
      result.ok = false;
      result.witness = wit;
      return false;
    }
    return true;
  }
  for (int u = 1; u <= std::min(D.p, remaining - (g - idx - 1)); ++u) {
    comp[static_cast<std::size_t>(idx)] = u;
    if (!check_split(D, cols, comp, idx + 1, remaining - u, expected, result)) return false;
  }
  return true;
}

bool check_column_subsets(const Design& D, std::vector<int>& cols, int idx, int next, int g, int t,
                          std::int64_t expected, StrengthCheck& result) {
  if (idx == g) {
    std::vector<int> comp(static_cast<std::size_t>(g), 0);
    return check_split(D, cols, comp, 0, t, expected, result);
  }
  for (int c = next; c < D.m; ++c) {
    cols[static_cast<std::size_t>(idx)] = c;
    if (!check_column_subsets(D, cols, idx + 1, c + 1, g, t, expected, result)) return false;
  }
  return true;
}

}  // namespace

StrengthCheck check_gsoa_strength(const Design& D, int t) {
  if (t < 1 || t > D.m * D.p) throw std::invalid_argument("strength out of range");
  StrengthCheck result;
  result.t = t;
  result.ok = true;
  const std::int64_t st_levels = ipow64(D.s, t);
  if (D.n % st_levels != 0) {
    result.ok = false;
    StrengthWitness wit;
    wit.reason = "run count not divisible by s^t";
    wit.expected = st_levels;
    wit.count = D.n;
    result.witness = wit;
    return result;
  }
  const std::int64_t expected = D.n / st_levels;
  for (int g = 1; g <= std::min(t, D.m); ++g) {
    std::vector<int> cols(static_cast<std::size_t>(g), 0);
    if (!check_column_subsets(D, cols, 0, 0, g, t, expected, result)) return result;
  }
  return result;
}

StrengthCheck check_soa_2plus(const Design& D) {
  if (D.p != 2) throw std::invalid_argument("the 2+ check applies to depth-2 designs only");
  if (D.m < 2) throw std::invalid_argument("the 2+ check needs at least two columns");
  StrengthCheck result;
  result.t = 2;
  result.ok = true;
  const std::int64_t cube = D.s * D.s * D.s;
  if (D.n % cube != 0) {
    result.ok = false;
    StrengthWitness wit;
    wit.reason = "run count not divisible by s^3";
    wit.expected = cube;
    wit.count = D.n;
    result.witness = wit;
    return result;
  }
  const std::int64_t expected = D.n / cube;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(cube));
  for (int c1 = 0; c1 < D.m; ++c1) {
    for (int c2 = 0; c2 < D.m; ++c2) {
      if (c1 == c2) continue;
      std::fill(counts.begin(), counts.end(), 0);
      for (std::int64_t r = 0; r < D.n; ++r)
        ++counts[static_cast<std::size_t>(D.at(r, c1) * D.s + D.at(r, c2) / D.s)];
      for (std::int64_t cell = 0; cell < cube; ++cell) {
        if (counts[static_cast<std::size_t>(cell)] == expected) continue;
        StrengthWitness wit;
        wit.reason = "unequal cell occupancy in full-by-coarse collapse";
        wit.columns = {c1, c2};
        wit.resolutions = {2, 1};
        wit.cell = {cell / D.s, cell % D.s};
        wit.count = counts[static_cast<std::size_t>(cell)];
        wit.expected = expected;
        result.ok = false;
        result.witness = wit;
        return result;
      }
    }
  }
  return result;
}

}  // namespace sdphi
