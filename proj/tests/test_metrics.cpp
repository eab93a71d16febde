#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "sdphi/construct.hpp"
#include "sdphi/gf.hpp"
#include "sdphi/metrics.hpp"
#include "sdphi/search.hpp"

using namespace sdphi;

namespace {

Design random_design(std::int64_t n, int m, std::int64_t s, int p, std::mt19937_64& rng) {
  std::int64_t levels = 1;
  for (int i = 0; i < p; ++i) levels *= s;
  std::uniform_int_distribution<std::int64_t> pick(0, levels - 1);
  std::vector<std::int64_t> x(static_cast<std::size_t>(n) * m);
  for (auto& v : x) v = pick(rng);
  return make_design(n, m, s, p, std::move(x));
}

std::vector<WeightScheme> all_schemes(std::int64_t s, int p) {
  std::vector<WeightScheme> out;
  out.push_back(make_weights(WeightTag::Constant, s, p));
  out.push_back(make_weights(WeightTag::Exponential, s, p, 0.6));
  out.push_back(make_weights(WeightTag::Enumerator, s, p, 0.3));
  std::vector<Rational> custom;
  for (int i = 0; i <= p; ++i) custom.emplace_back(i + 1, 2);
  out.push_back(make_custom_weights(custom, s));
  return out;
}

}  // namespace

TEST_CASE("native stratification mirrors digit arithmetic") {
  const Stratification st = Stratification::embedded(9, 3, 2);
  CHECK(st.native);
  for (std::int64_t x = 0; x < 9; ++x) {
    CHECK(st.stratum(x, 1) == x / 3);
    CHECK(st.stratum(x, 2) == x);
    for (std::int64_t y = 0; y < 9; ++y) {
      CHECK(st.agreement(x, y) == 2 - st.rho(x, y));
      for (int i = 0; i <= 2; ++i) CHECK(st.agree(x, y, i) == (delta_i(x, y, i, 3, 2) == 1));
    }
  }
}

TEST_CASE("embedded stratification floors midpoints") {
  // 19 labels under a base-3 depth-2 kernel.
  const Stratification st = Stratification::embedded(19, 3, 2);
  CHECK(!st.native);
  for (std::int64_t x = 0; x < 19; ++x)
    for (int i = 0; i <= 2; ++i) {
      const double mid = (2.0 * static_cast<double>(x) + 1.0) / 38.0;
      const auto want = static_cast<std::int64_t>(std::floor(std::pow(3.0, i) * mid));
      CHECK(st.stratum(x, i) == want);
    }
  // Agreement level is the largest resolution with equal strata.
  for (std::int64_t x = 0; x < 19; ++x)
    for (std::int64_t y = 0; y < 19; ++y) {
      int want = 0;
      for (int i = 1; i <= 2; ++i)
        if (st.stratum(x, i) == st.stratum(y, i)) want = i;
      // Strata are nested, so the set of agreeing resolutions is a prefix.
      CHECK(st.agreement(x, y) == want);
    }
}

TEST_CASE("pair distances: matrix, shortcut, and scaled forms agree") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 20; ++iter) {
    const Design D = random_design(8, 4, 3, 2, rng);
    for (const WeightScheme& w : all_schemes(3, 2)) {
      const DistanceMatrix dm = distance_matrix(D, w);
      for (std::int64_t a = 0; a < D.n; ++a)
        for (std::int64_t b = 0; b < D.n; ++b) {
          CHECK(dm.at(a, b) == doctest::Approx(dm.at(b, a)).epsilon(1e-14));
          CHECK(dm.at(a, b) == doctest::Approx(dab_nrt(D, w, a, b)).epsilon(1e-12));
        }
      if (w.has_exact()) {
        const ScaledDistances sd = scaled_distance_matrix(D, w);
        for (std::int64_t a = 0; a < D.n; ++a)
          for (std::int64_t b = 0; b < D.n; ++b)
            CHECK(Rational(sd.at(a, b), sd.scale).to_double() ==
                  doctest::Approx(dm.at(a, b)).epsilon(1e-12));
        CHECK(sd.g_exact().to_double() == doctest::Approx(dm.g_d).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("distances satisfy the triangle inequality") {
  std::mt19937_64 rng(17);
  const Design D = random_design(12, 5, 2, 3, rng);
  const WeightScheme w = make_weights(WeightTag::Exponential, 2, 3, 0.8);
  const DistanceMatrix dm = distance_matrix(D, w);
  for (std::int64_t a = 0; a < D.n; ++a)
    for (std::int64_t b = 0; b < D.n; ++b)
      for (std::int64_t c = 0; c < D.n; ++c)
        CHECK(dm.at(a, c) <= dm.at(a, b) + dm.at(b, c) + 1e-12);
}

TEST_CASE("balanced row sums hit the theoretical value exactly") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 10; ++iter) {
    const Design D = random_u_type(12, 4, 2, 2, 1000 + iter);
    const WeightScheme w = materialize(parse_weight_spec("custom:1,0.5,2"), 2, 2);
    const ScaledDistances sd = scaled_distance_matrix(D, w);
    const KernelConstantsExact ke = kernel_constants_exact(w, D.m, D.n);
    const Rational want = Rational(D.n) * Rational(D.m) * (ke.a0 - ke.a1);
    for (std::int64_t a = 0; a < D.n; ++a) {
      std::int64_t row = 0;
      for (std::int64_t b = 0; b < D.n; ++b) row += sd.at(a, b);
      CHECK(Rational(row, sd.scale) == want);
    }
  }
}

TEST_CASE("discrepancy equals the cell-count definition") {
  std::mt19937_64 rng(31);
  // Structured case: four columns of the multiplication-table design (the
  // full eight columns would blow the oracle's cell budget).
  const Design full = mult_table_design(3, 2, 2).design;
  std::vector<std::int64_t> sub;
  for (std::int64_t r = 0; r < full.n; ++r)
    for (int k = 0; k < 4; ++k) sub.push_back(full.at(r, k));
  const Design ref = make_design(full.n, 4, 3, 2, std::move(sub));
  for (const WeightScheme& w : all_schemes(3, 2))
    CHECK(sd2(ref, w) == doctest::Approx(sd2_cell_oracle(ref, w)).epsilon(1e-10));
  // Random (not necessarily balanced) designs.
  for (int iter = 0; iter < 10; ++iter) {
    const Design D = random_design(6, 3, 2, 2, rng);
    for (const WeightScheme& w : all_schemes(2, 2))
      CHECK(sd2(D, w) == doctest::Approx(sd2_cell_oracle(D, w)).epsilon(1e-10));
  }
  // Weights with an inactive resolution.
  const WeightScheme holes = materialize(parse_weight_spec("custom:1,0,2"), 2, 2);
  const Design D = random_design(8, 3, 2, 2, rng);
  CHECK(sd2(D, holes) == doctest::Approx(sd2_cell_oracle(D, holes)).epsilon(1e-10));
}

TEST_CASE("discrepancy identity holds for embedded labels too") {
  std::mt19937_64 rng(37);
  const Stratification st = Stratification::embedded(8, 2, 2);  // 8 labels, 4 strata
  CHECK(!st.native);
  for (int iter = 0; iter < 6; ++iter) {
    std::vector<std::int64_t> x(8 * 3);
    std::uniform_int_distribution<std::int64_t> pick(0, 7);
    for (auto& v : x) v = pick(rng);
    const Design D = make_design(8, 3, 8, 1, std::move(x));
    for (const WeightScheme& w : all_schemes(2, 2)) {
      CHECK(sd2(D, w, st) == doctest::Approx(sd2_cell_oracle(D, w, st)).epsilon(1e-10));
      CHECK(phi_sd(D, w, st).value ==
            doctest::Approx(phi_sd_oracle(D, w, st)).epsilon(1e-10));
    }
  }
}

TEST_CASE("frozen reference discrepancies") {
  const Design d1 = mult_table_design(3, 2, 2).design;
  const Design d2 = half_column_design(3, 2).design;
  const WeightScheme w = make_weights(WeightTag::Constant, 3, 2);
  CHECK(sd2(d1, w) == doctest::Approx(1.1480279177596304).epsilon(1e-12));
  CHECK(sd2(d2, w) == doctest::Approx(0.07583258199852203).epsilon(1e-12));
  CHECK(phi_sd_fast(d1, w) == doctest::Approx(470.0 / 45927).epsilon(1e-12));
  CHECK(phi_sd_fast(d2, w) == doctest::Approx(44.0 / 6561).epsilon(1e-12));
}

TEST_CASE("projection criterion: fast path equals the oracle on balanced designs") {
  std::mt19937_64 rng(41);
  int cases = 0;
  for (auto [s, p, n] : std::vector<std::tuple<std::int64_t, int, std::int64_t>>{
           {2, 1, 8}, {2, 2, 8}, {3, 1, 12}, {3, 2, 18}}) {
    for (int m : {2, 5}) {
      const Design D = random_u_type(n, m, s, p, 555 + cases);
      for (const WeightScheme& w : all_schemes(s, p)) {
        const double fast = phi_sd_fast(D, w);
        const double oracle = phi_sd_oracle(D, w);
        CHECK(std::fabs(fast - oracle) <= 1e-10 * std::max(1.0, std::fabs(fast)));
        ++cases;
      }
    }
  }
  CHECK(cases >= 32);
  (void)rng;
}

TEST_CASE("criterion routing reports the path taken") {
  const Design balanced = random_u_type(8, 3, 2, 2, 9);
  const WeightScheme w = make_weights(WeightTag::Constant, 2, 2);
  CHECK(phi_sd(balanced, w).fast_path);
  Design lopsided = balanced;
  lopsided.set(0, 0, lopsided.at(1, 0) == 0 ? 1 : 0);
  // Force imbalance: overwrite a full column with a constant.
  for (std::int64_t r = 0; r < lopsided.n; ++r) lopsided.set(r, 1, 0);
  CHECK(!lopsided.is_u_type());
  CHECK(!phi_sd(lopsided, w).fast_path);
  CHECK_THROWS_AS(phi_sd_fast(lopsided, w), std::exception);
}

TEST_CASE("two- and three-column averages degenerate to the full criterion") {
  std::mt19937_64 rng(43);
  const Design d2 = random_design(8, 2, 3, 1, rng);
  const Design d3 = random_design(8, 3, 3, 1, rng);
  const WeightScheme w = make_weights(WeightTag::Constant, 3, 1);
  CHECK(phi_sd(d2, w).value == doctest::Approx(sd2(d2, w)).epsilon(1e-12));
  CHECK(phi_sd3(d3, w) == doctest::Approx(sd2(d3, w)).epsilon(1e-12));
  CHECK_THROWS_AS(phi_sd3(d2, w), std::exception);
}

TEST_CASE("row and column permutations leave the criterion unchanged") {
  std::mt19937_64 rng(47);
  const Design D = random_design(9, 4, 3, 2, rng);
  const WeightScheme w = make_weights(WeightTag::Constant, 3, 2);
  const ScaledDistances base = scaled_distance_matrix(D, w);

  std::vector<std::int64_t> rows(static_cast<std::size_t>(D.n));
  for (std::int64_t i = 0; i < D.n; ++i) rows[static_cast<std::size_t>(i)] = i;
  std::shuffle(rows.begin(), rows.end(), rng);
  std::vector<int> cols(static_cast<std::size_t>(D.m));
  for (int k = 0; k < D.m; ++k) cols[static_cast<std::size_t>(k)] = k;
  std::shuffle(cols.begin(), cols.end(), rng);

  std::vector<std::int64_t> x(D.x.size());
  for (std::int64_t r = 0; r < D.n; ++r)
    for (int k = 0; k < D.m; ++k)
      x[static_cast<std::size_t>(r) * D.m + k] =
          D.at(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(k)]);
  const Design P = make_design(D.n, D.m, D.s, D.p, std::move(x));
  CHECK(scaled_distance_matrix(P, w).g_scaled == base.g_scaled);
  CHECK(sd2(P, w) == doctest::Approx(sd2(D, w)).epsilon(1e-12));
}

TEST_CASE("digit-tree relabelings leave every pair distance unchanged") {
  // Any automorphism of the nested-stratum tree (permute top-level blocks,
  // then leaves within each block independently) preserves agreement levels.
  std::mt19937_64 rng(53);
  const std::int64_t s = 3;
  const int p = 2;
  std::vector<std::int64_t> sigma(9);
  std::vector<std::int64_t> top{0, 1, 2};
  std::shuffle(top.begin(), top.end(), rng);
  for (std::int64_t block = 0; block < 3; ++block) {
    std::vector<std::int64_t> leaf{0, 1, 2};
    std::shuffle(leaf.begin(), leaf.end(), rng);
    for (std::int64_t j = 0; j < 3; ++j)
      sigma[static_cast<std::size_t>(block * 3 + j)] =
          top[static_cast<std::size_t>(block)] * 3 + leaf[static_cast<std::size_t>(j)];
  }
  const Design D = random_design(9, 4, s, p, rng);
  std::vector<std::int64_t> x(D.x.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = sigma[static_cast<std::size_t>(D.x[i])];
  const Design R = make_design(D.n, D.m, s, p, std::move(x));
  const WeightScheme w = make_weights(WeightTag::Constant, s, p);
  const ScaledDistances a = scaled_distance_matrix(D, w);
  const ScaledDistances b = scaled_distance_matrix(R, w);
  CHECK(a.d == b.d);
  CHECK(a.g_scaled == b.g_scaled);
}

TEST_CASE("bounds are affine images of each other and ordered") {
  for (auto [s, p, n, m] : std::vector<std::tuple<std::int64_t, int, std::int64_t, int>>{
           {2, 1, 8, 3}, {2, 2, 8, 5}, {3, 2, 9, 4}, {3, 2, 18, 7}}) {
    for (const WeightScheme& w : all_schemes(s, p)) {
      const BoundsReport b = bounds(n, m, s, p, w);
      const KernelConstants kc = kernel_constants(w, m, n);
      const double nd = static_cast<double>(n);
      const double md = m;
      const double denom = nd * nd * md * (md - 1);
      CHECK(b.phi_lb == doctest::Approx(b.g_lb / denom + kc.c_sd).epsilon(1e-12));
      CHECK(b.phi_ub == doctest::Approx(b.g_ub / denom + kc.c_sd).epsilon(1e-12));
      CHECK(b.g_lb <= b.g_ub + 1e-12);
      CHECK(b.d_bar == doctest::Approx(kc.d_bar).epsilon(1e-12));
      if (w.has_exact()) {
        const BoundsExact be = bounds_exact(n, m, s, p, w);
        CHECK(be.g_lb.to_double() == doctest::Approx(b.g_lb).epsilon(1e-12));
        CHECK(be.g_ub.to_double() == doctest::Approx(b.g_ub).epsilon(1e-12));
        CHECK(be.phi_lb.to_double() == doctest::Approx(b.phi_lb).epsilon(1e-12));
        CHECK(be.phi_ub.to_double() == doctest::Approx(b.phi_ub).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("identical-column designs reach the upper bound with the claimed support") {
  for (auto [n, m, s, p] : std::vector<std::tuple<std::int64_t, int, std::int64_t, int>>{
           {8, 3, 2, 1}, {8, 4, 2, 3}, {18, 5, 3, 2}}) {
    const Design D = worst_case_design(n, m, s, p).design;
    const WeightScheme w = make_weights(WeightTag::Constant, s, p);
    BoundsReport b = bounds(n, m, s, p, w);
    attainment(b, D, w);
    CHECK(b.attained_ub);
    CHECK(scaled_distance_matrix(D, w).g_exact() == bounds_exact(n, m, s, p, w).g_ub);
    // Every pair distance is m * (A0 - A0^(l)) for the agreement level l.
    const KernelConstants kc = kernel_constants(w, m, n);
    const DistanceMatrix dm = distance_matrix(D, w);
    for (std::int64_t a = 0; a < n; ++a)
      for (std::int64_t bb = a + 1; bb < n; ++bb) {
        bool found = false;
        for (int lev = 0; lev <= p && !found; ++lev)
          found = std::fabs(dm.at(a, bb) - m * (kc.a0 - kc.a0l[static_cast<std::size_t>(lev)])) <
                  1e-9;
        CHECK(found);
      }
  }
}

TEST_CASE("generator outputs sit exactly on the lower bound") {
  const Design designs[] = {mult_table_design(3, 2, 2).design, half_column_design(3, 2).design,
                            rao_hamming_design(3).design};
  for (const Design& D : designs) {
    const WeightScheme w = make_weights(WeightTag::Constant, D.s, D.p);
    BoundsReport b = bounds(D.n, D.m, D.s, D.p, w);
    attainment(b, D, w);
    CHECK(b.attained_lb);
    CHECK(phi_sd_fast(D, w) == doctest::Approx(b.phi_lb).epsilon(1e-12));
  }
}

TEST_CASE("distance distribution summarizes the pair multiset") {
  const Design D = half_column_design(3, 2).design;
  const WeightScheme w = make_weights(WeightTag::Constant, 3, 2);
  const DistanceDistribution dist = distance_distribution(D, w);
  CHECK(dist.pair_count == 36);
  REQUIRE(dist.values.size() == 1);  // equidistant design
  CHECK(dist.values[0].first == doctest::Approx(13.0 / 9).epsilon(1e-12));
  CHECK(dist.values[0].second == 36);
  CHECK(dist.min == dist.max);
  CHECK(dist.mean == doctest::Approx(13.0 / 9).epsilon(1e-12));

  std::mt19937_64 rng(61);
  const Design R = random_design(10, 3, 2, 2, rng);
  const DistanceDistribution rd = distance_distribution(R, make_weights(WeightTag::Constant, 2, 2));
  std::int64_t total = 0;
  for (const auto& [v, c] : rd.values) total += c;
  CHECK(total == 45);
  CHECK(rd.min <= rd.median);
  CHECK(rd.median <= rd.max);
}

TEST_CASE("csv export emits one line per unordered pair") {
  const Design D = random_u_type(6, 3, 2, 1, 3);
  std::ostringstream out;
  write_distance_csv(out, D, make_weights(WeightTag::Constant, 2, 1));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b,d");
  int count = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++count;
  CHECK(count == 15);
}

TEST_CASE("cell oracle refuses oversized enumerations") {
  const Design D = random_u_type(16, 8, 2, 3, 77);
  const WeightScheme w = make_weights(WeightTag::Constant, 2, 3);
  CHECK_THROWS_AS(sd2_cell_oracle(D, w), std::length_error);
}

TEST_CASE("context mismatches are rejected loudly") {
  const Design D = random_u_type(8, 3, 2, 2, 5);
  const WeightScheme wrong = make_weights(WeightTag::Constant, 3, 2);
  CHECK_THROWS_AS(sd2(D, wrong), std::invalid_argument);
  const Stratification st = Stratification::embedded(9, 3, 2);
  CHECK_THROWS_AS(sd2(D, make_weights(WeightTag::Constant, 3, 2), st), std::invalid_argument);
}
