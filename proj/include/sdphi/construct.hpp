#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdphi/design.hpp"
#include "sdphi/rational.hpp"

namespace sdphi {

/// Result of the pairwise column-balance audit: for every run pair and every
/// resolution i, the number of coordinates agreeing at resolution i must hit
/// the balance target m(n - s^i) / (s^i (n - 1)).
struct BalanceWitness {
  std::int64_t a = 0, b = 0;     // offending run pair (0-based)
  int i = 0;                     // resolution
  std::int64_t count = 0;        // observed agreements
  int128 target_num = 0;         // target as an exact fraction
  int128 target_den = 1;
};

struct BalanceReport {
  bool ok = false;
  bool targets_integral = true;  // false when some target is not an integer
  std::optional<BalanceWitness> witness;
  std::vector<Rational> targets;  // per-resolution targets, i = 0..p
};

BalanceReport verify_balance(const Design& D);

/// Full per-pair agreement profile (row pairs a<b by resolution), mostly for
/// diagnostics; verify_balance is the cheap pass/fail form.
std::vector<std::vector<std::int64_t>> balance_profile(const Design& D);

/// A generated design together with a provenance note for the file header.
struct Constructed {
  Design design;
  std::string provenance;
};

/// Multiplication-table construction: rows and columns of the GF(s^p)
/// multiplication table indexed by the nonzero elements, entries collapsed
/// to their q leading digits. Yields an (s^p) x (s^p - 1) design whose rows
/// pairwise agree in a constant resolution profile. s prime, s^p <= 4096,
/// 1 <= q <= p.
Constructed mult_table_design(std::int64_t s, int p, int q);

/// Half-column variant for odd prime s: keep one column per {x, -x} pair of
/// nonzero field elements (the smaller label of each pair), giving an
/// (s^p) x ((s^p - 1)/2) design at full resolution.
Constructed half_column_design(std::int64_t s, int p);

/// Difference matrix over GF(q): an n x n array (q | n) where every pair of
/// distinct columns, subtracted entrywise, hits every field element n/q
/// times.
struct GHMatrix {
  std::int64_t n = 0;
  std::int64_t q = 0;
  std::vector<std::int64_t> a;  // row major

  std::int64_t at(std::int64_t row, std::int64_t col) const {
    return a[static_cast<std::size_t>(row) * n + col];
  }
};

GHMatrix read_gh(std::istream& in);
GHMatrix read_gh_file(const std::string& path);

struct GHWitness {
  std::int64_t col1 = 0, col2 = 0;  // offending column pair
  std::int64_t element = 0;         // field element with wrong multiplicity
  std::int64_t count = 0;
  std::int64_t expected = 0;
};

struct GHReport {
  bool ok = false;
  std::optional<GHWitness> witness;
};

GHReport verify_gh(const GHMatrix& H);

/// Turn a verified difference matrix over GF(s^p) into an n x (n-1) design:
/// normalize so one column is constant, drop it, collapse the remaining
/// entries to q leading digits, and audit the balance targets.
Constructed gh_to_design(const GHMatrix& H, std::int64_t s, int q);

/// Strength-2 construction on s^2 runs for prime-power s <= 16: pairs up the
/// columns of the two-factor Rao–Hamming orthogonal array into two-digit
/// levels, trying cyclic pairing shifts in order and returning the first
/// that passes the balance audit.
Constructed rao_hamming_design(std::int64_t s);

/// Column-wise concatenation of two designs with identical n, s, p.
/// Both inputs and the result must pass the balance audit.
Constructed juxtapose(const Design& a, const Design& b);

/// Collapse every entry to its q leading digits (1 <= q <= p).
Constructed collapse_design(const Design& D, int q);

/// The balanced design with maximal pair-distance energy: one balanced
/// sorted column copied m times. Requires s^p | n.
Constructed worst_case_design(std::int64_t n, int m, std::int64_t s, int p);

}  // namespace sdphi
