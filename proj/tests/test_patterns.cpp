#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "sdphi/construct.hpp"
#include "sdphi/metrics.hpp"
#include "sdphi/patterns.hpp"
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

}  // namespace

TEST_CASE("character sum at zero frequency is n^2") {
  const Design D = random_u_type(8, 3, 2, 2, 2);
  CHECK(character_sum(D, {0, 0, 0}) == doctest::Approx(64.0));
  CHECK_THROWS_AS(character_sum(D, {0, 0}), std::exception);      // wrong length
  CHECK_THROWS_AS(character_sum(D, {0, 0, 4}), std::exception);   // out of range
}

TEST_CASE("character sums need a prime base") {
  const Design D = make_design(4, 2, 4, 1, {0, 1, 2, 3, 3, 2, 1, 0});
  CHECK_THROWS_AS(character_sum(D, {1, 0}), std::exception);
  CHECK_THROWS_AS(space_filling_pattern(D), std::exception);
}

TEST_CASE("frozen spectra of the reference designs") {
  const PatternSpectrum a = space_filling_pattern(mult_table_design(2, 2, 2).design);
  const std::vector<double> want_a{1, 0, 0, 7, 3, 3, 2};
  REQUIRE(a.upto == 6);
  for (int j = 0; j <= 6; ++j)
    CHECK(a.s_j[static_cast<std::size_t>(j)] ==
          doctest::Approx(want_a[static_cast<std::size_t>(j)]).epsilon(1e-9));

  const PatternSpectrum b = space_filling_pattern(half_column_design(3, 2).design);
  const std::vector<double> want_b{1, 0, 0, 32, 48, 120, 192, 192, 144};
  REQUIRE(b.upto == 8);
  for (int j = 0; j <= 8; ++j)
    CHECK(b.s_j[static_cast<std::size_t>(j)] ==
          doctest::Approx(want_b[static_cast<std::size_t>(j)]).epsilon(1e-9));
}

TEST_CASE("total spectrum mass for distinct rows is levels^m / n") {
  const Design designs[] = {mult_table_design(2, 2, 2).design, half_column_design(3, 2).design,
                            rao_hamming_design(2).design};
  for (const Design& D : designs) {
    const PatternSpectrum ps = space_filling_pattern(D);
    const double want = std::pow(static_cast<double>(D.levels()), D.m) / static_cast<double>(D.n);
    CHECK(ps.total() == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("truncated spectrum is a prefix of the full one") {
  const Design D = half_column_design(3, 2).design;
  const PatternSpectrum full = space_filling_pattern(D);
  const PatternSpectrum part = space_filling_pattern_partial(D, 4);
  REQUIRE(part.upto == 4);
  for (int j = 0; j <= 4; ++j)
    CHECK(part.s_j[static_cast<std::size_t>(j)] ==
          doctest::Approx(full.s_j[static_cast<std::size_t>(j)]).epsilon(1e-9));
}

TEST_CASE("spectrum zeros match counting strength") {
  // Strength t shows as S_1 = ... = S_t = 0 with S_{t+1} > 0.
  struct Case {
    Design d;
    int strength;
  };
  const Case cases[] = {{mult_table_design(2, 2, 2).design, 2},
                        {half_column_design(3, 2).design, 2},
                        {mult_table_design(3, 2, 2).design, 1},
                        {rao_hamming_design(3).design, 2}};
  for (const Case& c : cases) {
    // The (9,8) table exceeds the full-enumeration budget; the truncated
    // spectrum sees exactly the weights the strength statement is about.
    const PatternSpectrum ps = space_filling_pattern_partial(c.d, c.strength + 1);
    for (int j = 1; j <= c.strength; ++j)
      CHECK(ps.s_j[static_cast<std::size_t>(j)] == doctest::Approx(0.0));
    CHECK(ps.s_j[static_cast<std::size_t>(c.strength + 1)] > 0.5);
    CHECK(check_gsoa_strength(c.d, c.strength).ok);
    CHECK(!check_gsoa_strength(c.d, c.strength + 1).ok);
  }
}

TEST_CASE("strength witnesses identify a concrete violated cell") {
  const StrengthCheck chk = check_gsoa_strength(mult_table_design(3, 2, 2).design, 2);
  REQUIRE(!chk.ok);
  REQUIRE(chk.witness.has_value());
  const StrengthWitness& w = *chk.witness;
  CHECK(w.count != w.expected);
  CHECK(w.columns.size() == w.resolutions.size());
  int total = 0;
  for (int r : w.resolutions) total += r;
  CHECK(total == 2);
}

TEST_CASE("strength check divisibility precondition") {
  // n = 8 is not divisible by s^t = 16 at t = 4 with only 8 runs: the
  // checker reports failure (with a global reason), not an exception.
  const Design D = random_u_type(8, 5, 2, 3, 10);
  const StrengthCheck chk = check_gsoa_strength(D, 4);
  CHECK(!chk.ok);
  REQUIRE(chk.witness.has_value());
  CHECK(chk.witness->columns.empty());
}

TEST_CASE("depth-2 pair collapse check") {
  // The full factorial over Z_9 x Z_9 written as two depth-2 columns has
  // every pair property by construction.
  std::vector<std::int64_t> x;
  for (std::int64_t a = 0; a < 9; ++a)
    for (std::int64_t b = 0; b < 9; ++b) {
      x.push_back(a);
      x.push_back(b);
    }
  const Design full = make_design(81, 2, 3, 2, std::move(x));
  CHECK(check_soa_2plus(full).ok);
  // Nine runs cannot fill 27 cells: fails with a divisibility witness.
  CHECK(!check_soa_2plus(half_column_design(3, 2).design).ok);
  // Depth-1 designs are out of scope for this check.
  CHECK_THROWS_AS(check_soa_2plus(random_u_type(8, 3, 2, 1, 4)), std::exception);
}

TEST_CASE("pairwise enumerator reproduces the projection criterion") {
  std::mt19937_64 rng(71);
  for (int iter = 0; iter < 12; ++iter) {
    const std::int64_t s = (iter % 2 == 0) ? 2 : 3;
    const int p = 1 + iter % 2;
    const Design D = random_design(8, 3, s, p, rng);
    for (double y : {0.1, 0.3, 0.5}) {
      const EnumeratorIdentity id = check_enumerator_identity(D, y);
      CHECK(std::fabs(id.difference) <=
            1e-9 * std::max(1.0, std::fabs(id.phi_via_kernel)));
    }
  }
}

TEST_CASE("enumerator report is the generating function of the mean spectrum") {
  const Design D = half_column_design(3, 2).design;
  const double y = 0.4;
  const EnumeratorReport rep = enumerators(D, y);
  double acc = 0, yj = 1;
  for (double sj : rep.sbar) {
    acc += sj * yj;
    yj *= y;
  }
  CHECK(rep.pairwise == doctest::Approx(acc).epsilon(1e-12));
  CHECK(rep.sbar1 == doctest::Approx(rep.sbar[1]).epsilon(1e-12));
  CHECK(rep.sbar2 == doctest::Approx(rep.sbar[2]).epsilon(1e-12));
  CHECK(rep.sbar3 == doctest::Approx(rep.sbar[3]).epsilon(1e-12));
  REQUIRE(rep.whole.has_value());
  const PatternSpectrum full = space_filling_pattern(D);
  double whole = 0;
  yj = 1;
  for (int j = 0; j <= full.upto; ++j) {
    whole += full.s_j[static_cast<std::size_t>(j)] * yj;
    yj *= y;
  }
  CHECK(*rep.whole == doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("strength-2 designs have flat low-order enumerator terms") {
  const EnumeratorReport rep = enumerators(rao_hamming_design(3).design, 0.25);
  CHECK(rep.sbar1 == doctest::Approx(0.0));
  CHECK(rep.sbar2 == doctest::Approx(0.0));
  CHECK(rep.sbar3 > 0.0);
}
