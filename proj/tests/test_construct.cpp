#include "doctest.h"

#include <sstream>

#include "sdphi/construct.hpp"
#include "sdphi/gf.hpp"
#include "sdphi/metrics.hpp"
#include "sdphi/search.hpp"

using namespace sdphi;

namespace {

GHMatrix product_table_gh(std::int64_t q) {
  // D[i][j] = i * j over GF(q) is a difference matrix.
  auto [r, e] = factor_prime_power(q);
  const GaloisField f = build_field(r, e);
  GHMatrix H;
  H.n = q;
  H.q = q;
  H.a.resize(static_cast<std::size_t>(q) * q);
  for (std::int64_t i = 0; i < q; ++i)
    for (std::int64_t j = 0; j < q; ++j) H.a[static_cast<std::size_t>(i) * q + j] = f.mul(i, j);
  return H;
}

}  // namespace

TEST_CASE("multiplication-table designs have the stated shape") {
  const Constructed c = mult_table_design(3, 2, 2);
  CHECK(c.design.n == 9);
  CHECK(c.design.m == 8);
  CHECK(c.design.s == 3);
  CHECK(c.design.p == 2);
  CHECK(c.design.is_u_type());
  CHECK(c.provenance.find("mult-table") != std::string::npos);
  CHECK(c.provenance.find("modulus") != std::string::npos);
  // Collapsed variant keeps n and m but coarsens levels.
  const Constructed c1 = mult_table_design(3, 2, 1);
  CHECK(c1.design.p == 1);
  CHECK(c1.design.levels() == 3);
  CHECK(c1.design.is_u_type());
  CHECK_THROWS_AS(mult_table_design(4, 2, 2), std::exception);  // base not prime
  CHECK_THROWS_AS(mult_table_design(3, 2, 3), std::exception);  // q > p
}

TEST_CASE("collapsing the full table matches constructing at the target depth") {
  const Design full = mult_table_design(2, 3, 3).design;
  const Design direct = mult_table_design(2, 3, 2).design;
  const Design collapsed = collapse_design(full, 2).design;
  CHECK(collapsed.x == direct.x);
  CHECK(collapsed.p == 2);
  for (std::size_t i = 0; i < full.x.size(); ++i)
    CHECK(collapsed.x[i] == collapse_level(full.x[i], 2, 3, 2));
}

TEST_CASE("half-column designs keep one column per sign pair") {
  const Constructed c = half_column_design(3, 2);
  CHECK(c.design.n == 9);
  CHECK(c.design.m == 4);
  CHECK(c.design.is_u_type());
  CHECK_THROWS_AS(half_column_design(2, 2), std::exception);  // needs odd prime
  const Constructed c5 = half_column_design(5, 1);
  CHECK(c5.design.m == 2);
  CHECK(c5.design.n == 5);
}

TEST_CASE("balance audit accepts the generators and rejects defects") {
  for (const Constructed& c : {mult_table_design(3, 2, 2), half_column_design(3, 2),
                               rao_hamming_design(3), mult_table_design(2, 3, 3)}) {
    const BalanceReport rep = verify_balance(c.design);
    CHECK(rep.ok);
    CHECK(!rep.witness.has_value());
  }
  // Identical columns agree everywhere: grossly off-target.
  const BalanceReport bad = verify_balance(worst_case_design(9, 3, 3, 2).design);
  CHECK(!bad.ok);
  REQUIRE(bad.witness.has_value());
  CHECK(bad.witness->count != 0);
  // A defective single entry breaks a target.
  Design d = half_column_design(3, 2).design;
  d.set(0, 0, (d.at(0, 0) + 1) % 9);
  CHECK(!verify_balance(d).ok);
}

TEST_CASE("balance profile rows match the audit targets for a balanced design") {
  const Design D = half_column_design(3, 2).design;
  const BalanceReport rep = verify_balance(D);
  const auto profile = balance_profile(D);
  REQUIRE(profile.size() == static_cast<std::size_t>(D.n * (D.n - 1) / 2));
  for (const auto& row : profile) {
    REQUIRE(row.size() == static_cast<std::size_t>(D.p) + 1);
    for (int i = 1; i <= D.p; ++i) {
      const Rational got(row[static_cast<std::size_t>(i)], 1);
      CHECK(got == rep.targets[static_cast<std::size_t>(i)]);
    }
  }
}

TEST_CASE("difference-matrix verification and conversion") {
  const GHMatrix H = product_table_gh(4);
  CHECK(verify_gh(H).ok);
  const Constructed c = gh_to_design(H, 2, 2);
  CHECK(c.design.n == 4);
  CHECK(c.design.m == 3);
  CHECK(c.design.s == 2);
  CHECK(c.design.p == 2);
  CHECK(c.design.is_u_type());
  CHECK(verify_balance(c.design).ok);

  // Corrupting one entry is caught by the column-difference counts.
  GHMatrix bad = H;
  bad.a[5] = (bad.a[5] + 1) % 4;
  const GHReport rep = verify_gh(bad);
  CHECK(!rep.ok);
  REQUIRE(rep.witness.has_value());
  CHECK_THROWS_AS(gh_to_design(bad, 2, 2), std::exception);
  // Base must match the field order as s^p.
  CHECK_THROWS_AS(gh_to_design(H, 3, 1), std::exception);
}

TEST_CASE("difference-matrix file parsing") {
  std::istringstream in("# comment\n4 4\n0 0 0 0\n0 1 2 3\n0 2 3 1\n0 3 1 2\n");
  const GHMatrix H = read_gh(in);
  CHECK(H.n == 4);
  CHECK(H.q == 4);
  CHECK(H.at(2, 2) == 3);
  std::istringstream bad("4 4\n0 0 0 0\n0 1 2 9\n0 2 3 1\n0 3 1 2\n");
  CHECK_THROWS_AS(read_gh(bad), std::exception);
}

TEST_CASE("paired orthogonal-array designs across small prime powers") {
  for (std::int64_t s : {2, 3, 4, 5}) {
    const Constructed c = rao_hamming_design(s);
    CHECK(c.design.n == s * s);
    CHECK(c.design.m == s + 1);
    CHECK(c.design.s == s);
    CHECK(c.design.p == 2);
    CHECK(c.design.is_u_type());
    CHECK(verify_balance(c.design).ok);
  }
  CHECK_THROWS_AS(rao_hamming_design(6), std::exception);   // not a prime power
  CHECK_THROWS_AS(rao_hamming_design(17), std::exception);  // beyond the cap
}

TEST_CASE("juxtaposition concatenates columns and preserves balance") {
  const Design a = half_column_design(3, 2).design;
  const Design b = rao_hamming_design(3).design;
  const Constructed c = juxtapose(a, b);
  CHECK(c.design.n == 9);
  CHECK(c.design.m == 8);
  CHECK(verify_balance(c.design).ok);
  for (std::int64_t r = 0; r < 9; ++r) {
    CHECK(c.design.at(r, 0) == a.at(r, 0));
    CHECK(c.design.at(r, 4) == b.at(r, 0));
  }
  const Design other = mult_table_design(2, 2, 2).design;
  CHECK_THROWS_AS(juxtapose(a, other), std::exception);  // mismatched shape
}

TEST_CASE("juxtaposition requires balanced inputs") {
  const Design w = worst_case_design(9, 3, 3, 2).design;
  CHECK_THROWS_AS(juxtapose(w, w), std::exception);
}

TEST_CASE("identical-column designs repeat one sorted balanced column") {
  const Constructed c = worst_case_design(12, 4, 2, 1);
  CHECK(c.design.n == 12);
  CHECK(c.design.m == 4);
  CHECK(c.design.is_u_type());
  for (std::int64_t r = 0; r < 12; ++r)
    for (int k = 1; k < 4; ++k) CHECK(c.design.at(r, k) == c.design.at(r, 0));
  CHECK_THROWS_AS(worst_case_design(10, 3, 2, 2), std::exception);  // 4 does not divide 10
}
