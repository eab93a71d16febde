#include "sdphi/construct.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "sdphi/gf.hpp"
#include "sdphi/metrics.hpp"
#include "sdphi/patterns.hpp"

namespace sdphi {

namespace {

constexpr std::int64_t kMaxTableOrder = 4096;

std::string shape_note(const Design& d) {
  std::ostringstream out;
  out << "n=" << d.n << " m=" << d.m << " s=" << d.s << " p=" << d.p;
  return out.str();
}

// Count, for one run pair, the coordinate agreements at each resolution.
void pair_agreements(const Design& D, const Stratification& st, std::int64_t a, std::int64_t b,
                     std::vector<std::int64_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (int k = 0; k < D.m; ++k) {
    // Agreement at the finest shared resolution implies agreement at every
    // coarser one.
    int lev = D.p - st.rho(D.at(a, k), D.at(b, k));
    for (int i = 0; i <= lev; ++i) ++counts[static_cast<std::size_t>(i)];
  }
}

void require_balanced(const Design& d, const std::string& what) {
  if (!d.is_u_type())
    throw std::runtime_error(what + " produced a non-balanced design (" + shape_note(d) + ")");
  const BalanceReport rep = verify_balance(d);
  if (!rep.ok) {
    std::ostringstream out;
    out << what << " failed the balance audit (" << shape_note(d) << ")";
    if (rep.witness) {
      out << ": runs (" << rep.witness->a + 1 << "," << rep.witness->b + 1 << ") agree "
          << rep.witness->count << " times at resolution " << rep.witness->i << ", target "
          << int128_to_string(rep.witness->target_num) << "/"
          << int128_to_string(rep.witness->target_den);
    }
    throw std::runtime_error(out.str());
  }
}

}  // namespace

BalanceReport verify_balance(const Design& D) {
  BalanceReport out;
  if (D.n < 2) throw std::invalid_argument("balance audit needs at least two runs");
  out.targets.reserve(D.p + 1);
  // Targets m(n - s^i) / (s^i (n - 1)) for i = 0..p; i = 0 is always m.
  for (int i = 0; i <= D.p; ++i) {
    const int128 si = ipow128(D.s, i);
    out.targets.emplace_back(static_cast<int128>(D.m) * (D.n - si),
                             si * static_cast<int128>(D.n - 1));
    if (!out.targets.back().is_integer() || out.targets.back().num() < 0)
      out.targets_integral = false;
  }
  const Stratification st = Stratification::of(D);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(D.p) + 1);
  for (std::int64_t a = 0; a < D.n; ++a) {
    for (std::int64_t b = a + 1; b < D.n; ++b) {
      pair_agreements(D, st, a, b, counts);
      for (int i = 0; i <= D.p; ++i) {
        // Exact comparison by cross multiplication: count == m(n-s^i)/(s^i(n-1)).
        const int128 si = ipow128(D.s, i);
        const int128 lhs = static_cast<int128>(counts[static_cast<std::size_t>(i)]) * si *
                           static_cast<int128>(D.n - 1);
        const int128 rhs = static_cast<int128>(D.m) * (D.n - si);
        if (lhs != rhs) {
          out.ok = false;
          BalanceWitness wit;
          wit.a = a;
          wit.b = b;
          wit.i = i;
          wit.count = counts[static_cast<std::size_t>(i)];
          wit.target_num = rhs;
          wit.target_den = si * static_cast<int128>(D.n - 1);
          out.witness = wit;
          return out;
        }
      }
    }
  }
  out.ok = true;
  return out;
}

std::vector<std::vector<std::int64_t>> balance_profile(const Design& D) {
  const Stratification st = Stratification::of(D);
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(static_cast<std::size_t>(D.n) * (D.n - 1) / 2);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(D.p) + 1);
  for (std::int64_t a = 0; a < D.n; ++a) {
    for (std::int64_t b = a + 1; b < D.n; ++b) {
      pair_agreements(D, st, a, b, counts);
      out.push_back(counts);
    }
  }
  return out;
}

Constructed mult_table_design(std::int64_t s, int p, int q) {
  if (!is_prime(s)) throw std::invalid_argument("multiplication-table construction needs prime s");
  if (p < 1) throw std::invalid_argument("depth must be positive");
  if (q < 1 || q > p) throw std::invalid_argument("collapse target must satisfy 1 <= q <= p");
  const std::int64_t order = ipow64(s, p);
  if (order > kMaxTableOrder)
    throw std::invalid_argument("multiplication-table construction capped at s^p <= 4096");
  const GaloisField field(s, p);
  const std::int64_t n = order;
  const int m = static_cast<int>(order - 1);
  std::vector<std::int64_t> entries(static_cast<std::size_t>(n) * m);
  for (std::int64_t row = 0; row < n; ++row)
    for (std::int64_t col = 1; col < order; ++col)
      entries[static_cast<std::size_t>(row) * m + (col - 1)] =
          collapse_level(field.mul(row, col), s, p, q);
  Constructed out;
  out.design = make_design(n, m, s, q, std::move(entries));
  require_balanced(out.design, "multiplication-table construction");
  out.provenance = "# provenance: mult-table s=" + std::to_string(s) + " p=" + std::to_string(p) +
                   " q=" + std::to_string(q) + " modulus=" + field.modulus_string();
  return out;
}

Constructed half_column_design(std::int64_t s, int p) {
  if (!is_prime(s) || s == 2)
    throw std::invalid_argument("half-column construction needs an odd prime s");
  if (p < 1) throw std::invalid_argument("depth must be positive");
  const std::int64_t order = ipow64(s, p);
  if (order > kMaxTableOrder)
    throw std::invalid_argument("half-column construction capped at s^p <= 4096");
  const GaloisField field(s, p);
  // One representative per {x, -x} pair of nonzero elements: the smaller label.
  std::vector<std::int64_t> reps;
  for (std::int64_t x = 1; x < order; ++x)
    if (x < field.neg(x)) reps.push_back(x);
  const std::int64_t n = order;
  const int m = static_cast<int>(reps.size());
  std::vector<std::int64_t> entries(static_cast<std::size_t>(n) * m);
  for (std::int64_t row = 0; row < n; ++row)
    for (int k = 0; k < m; ++k)
      entries[static_cast<std::size_t>(row) * m + k] = field.mul(row, reps[static_cast<std::size_t>(k)]);
  Constructed out;
  out.design = make_design(n, m, s, p, std::move(entries));
  require_balanced(out.design, "half-column construction");
  std::ostringstream prov;
  prov << "# provenance: mult-table-half s=" << s << " p=" << p
       << " modulus=" << field.modulus_string() << " columns=";
  for (std::size_t i = 0; i < reps.size(); ++i) {
    if (i) prov << ",";
    prov << reps[i];
  }
  out.provenance = prov.str();
  return out;
}

GHMatrix read_gh(std::istream& in) {
  GHMatrix out;
  std::string line;
  bool have_header = false;
  std::int64_t rows_read = 0;
  while (std::getline(in, line)) {
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      if (!(ls >> out.n >> out.q)) throw std::runtime_error("bad difference-matrix header: " + line);
      if (out.n < 1 || out.q < 2) throw std::runtime_error("bad difference-matrix shape");
      have_header = true;
      out.a.reserve(static_cast<std::size_t>(out.n) * out.n);
      continue;
    }
    if (rows_read == out.n) throw std::runtime_error("more rows than the header announced");
    for (std::int64_t k = 0; k < out.n; ++k) {
      std::int64_t v;
      if (!(ls >> v)) throw std::runtime_error("short difference-matrix row: " + line);
      if (v < 0 || v >= out.q) throw std::runtime_error("difference-matrix entry out of range");
      out.a.push_back(v);
    }
    std::string extra;
    if (ls >> extra) throw std::runtime_error("trailing tokens in difference-matrix row");
    ++rows_read;
  }
  if (!have_header) throw std::runtime_error("empty difference-matrix file");
  if (rows_read != out.n) throw std::runtime_error("difference-matrix file ended early");
  return out;
}

GHMatrix read_gh_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open difference-matrix file: " + path);
  return read_gh(in);
}

GHReport verify_gh(const GHMatrix& H) {
  GHReport out;
  if (H.n % H.q != 0) {
    out.ok = false;
    GHWitness wit;
    wit.expected = H.q;
    out.witness = wit;
    return out;
  }
  const auto [r, e] = factor_prime_power(H.q);
  const GaloisField field(r, e);
  const std::int64_t expected = H.n / H.q;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(H.q));
  for (std::int64_t c1 = 0; c1 < H.n; ++c1) {
    for (std::int64_t c2 = 0; c2 < H.n; ++c2) {
      if (c1 == c2) continue;
      std::fill(counts.begin(), counts.end(), 0);
      for (std::int64_t row = 0; row < H.n; ++row)
        ++counts[static_cast<std::size_t>(field.sub(H.at(row, c1), H.at(row, c2)))];
      for (std::int64_t v = 0; v < H.q; ++v) {
        if (counts[static_cast<std::size_t>(v)] == expected) continue;
        out.ok = false;
        GHWitness wit;
        wit.col1 = c1;
        wit.col2 = c2;
        wit.element = v;
        wit.count = counts[static_cast<std::size_t>(v)];
        wit.expected = expected;
        out.witness = wit;
        return out;
      }
    }
  }
  out.ok = true;
  return out;
}

Constructed gh_to_design(const GHMatrix& H, std::int64_t s, int q) {
  // Depth p from the field order: H.q must be a power of s.
  int p = 0;
  std::int64_t acc = 1;
  while (acc < H.q) {
    acc *= s;
    ++p;
  }
  if (acc != H.q || p < 1)
    throw std::invalid_argument("difference-matrix field order is not a power of the base s");
  if (q < 1 || q > p) throw std::invalid_argument("collapse target must satisfy 1 <= q <= p");
  if (H.n % H.q != 0)
    throw std::runtime_error("difference-matrix run count is not divisible by the field order");
  const GHReport rep = verify_gh(H);
  if (!rep.ok) {
    std::ostringstream out;
    out << "difference-matrix audit failed";
    if (rep.witness)
      out << ": columns (" << rep.witness->col1 + 1 << "," << rep.witness->col2 + 1
          << ") hit element " << rep.witness->element << " " << rep.witness->count
          << " times, expected " << rep.witness->expected;
    throw std::runtime_error(out.str());
  }
  const auto [r, e] = factor_prime_power(H.q);
  const GaloisField field(r, e);
  // Normalize so some column is constant: if none is, subtract column 0 from
  // every column (this preserves the difference property and zeroes column 0).
  std::vector<std::int64_t> work(H.a);
  auto at = [&](std::int64_t row, std::int64_t col) -> std::int64_t& {
    return work[static_cast<std::size_t>(row) * H.n + col];
  };
  std::int64_t constant_col = -1;
  for (std::int64_t c = 0; c < H.n && constant_col < 0; ++c) {
    bool constant = true;
    for (std::int64_t row = 1; row < H.n && constant; ++row)
      constant = at(row, c) == at(0, c);
    if (constant) constant_col = c;
  }
  if (constant_col < 0) {
    for (std::int64_t row = 0; row < H.n; ++row) {
      const std::int64_t pivot = at(row, 0);
      for (std::int64_t c = 0; c < H.n; ++c) at(row, c) = field.sub(at(row, c), pivot);
    }
    constant_col = 0;
  }
  // Drop the constant column and collapse the rest.
  const std::int64_t n = H.n;
  const int m = static_cast<int>(n - 1);
  std::vector<std::int64_t> entries(static_cast<std::size_t>(n) * m);
  for (std::int64_t row = 0; row < n; ++row) {
    int k = 0;
    for (std::int64_t c = 0; c < n; ++c) {
      if (c == constant_col) continue;
      entries[static_cast<std::size_t>(row) * m + k] = collapse_level(at(row, c), s, p, q);
      ++k;
    }
  }
  Constructed out;
  out.design = make_design(n, m, s, q, std::move(entries));
  require_balanced(out.design, "difference-matrix construction");
  out.provenance = "# provenance: gh n=" + std::to_string(H.n) + " field=" + std::to_string(H.q) +
                   " s=" + std::to_string(s) + " q=" + std::to_string(q) +
                   " modulus=" + field.modulus_string();
  return out;
}

Constructed rao_hamming_design(std::int64_t s) {
  if (s > 16) throw std::invalid_argument("pairing construction capped at s <= 16");
  const auto [r, e] = factor_prime_power(s);
  const GaloisField field(r, e);
  const std::int64_t n = s * s;
  const int m = static_cast<int>(s + 1);
  // Orthogonal-array columns over runs (x, y): x itself, then y + alpha*x for
  // every field element alpha.
  std::vector<std::int64_t> oa(static_cast<std::size_t>(n) * m);
  for (std::int64_t x = 0; x < s; ++x) {
    for (std::int64_t y = 0; y < s; ++y) {
      const std::int64_t row = x * s + y;
      oa[static_cast<std::size_t>(row) * m] = x;
      for (std::int64_t alpha = 0; alpha < s; ++alpha)
        oa[static_cast<std::size_t>(row) * m + 1 + alpha] = field.add(y, field.mul(alpha, x));
    }
  }
  // Pair column k's value (leading digit) with column (k+shift)'s value
  // (trailing digit); the first shift whose design passes every audit wins.
  std::string failure;
  for (int shift = 1; shift < m; ++shift) {
    std::vector<std::int64_t> entries(static_cast<std::size_t>(n) * m);
    for (std::int64_t row = 0; row < n; ++row)
      for (int k = 0; k < m; ++k)
        entries[static_cast<std::size_t>(row) * m + k] =
            oa[static_cast<std::size_t>(row) * m + k] * s +
            oa[static_cast<std::size_t>(row) * m + (k + shift) % m];
    Design cand = make_design(n, m, s, 2, std::move(entries));
    const BalanceReport rep = verify_balance(cand);
    if (!cand.is_u_type() || !rep.ok) {
      failure = "shift " + std::to_string(shift) + " failed the balance audit";
      continue;
    }
    const StrengthCheck strength = check_gsoa_strength(cand, 2);
    if (!strength.ok) {
      failure = "shift " + std::to_string(shift) + " failed the strength-2 count";
      continue;
    }
    Constructed out;
    out.design = std::move(cand);
    out.provenance = "# provenance: rao-hamming s=" + std::to_string(s) +
                     " shift=" + std::to_string(shift) + " modulus=" + field.modulus_string();
    return out;
  }
  throw std::runtime_error("no column pairing passed the audits (" + failure + ")");
}

Constructed juxtapose(const Design& a, const Design& b) {
  if (a.n != b.n || a.s != b.s || a.p != b.p)
    throw std::invalid_argument("juxtaposition needs identical n, s, p");
  require_balanced(a, "juxtaposition input (first)");
  require_balanced(b, "juxtaposition input (second)");
  const int m = a.m + b.m;
  std::vector<std::int64_t> entries(static_cast<std::size_t>(a.n) * m);
  for (std::int64_t row = 0; row < a.n; ++row) {
    for (int k = 0; k < a.m; ++k) entries[static_cast<std::size_t>(row) * m + k] = a.at(row, k);
    for (int k = 0; k < b.m; ++k)
      entries[static_cast<std::size_t>(row) * m + a.m + k] = b.at(row, k);
  }
  Constructed out;
  out.design = make_design(a.n, m, a.s, a.p, std::move(entries));
  require_balanced(out.design, "juxtaposition");
  out.provenance = "# provenance: juxtapose m1=" + std::to_string(a.m) +
                   " m2=" + std::to_string(b.m);
  return out;
}

Constructed collapse_design(const Design& D, int q) {
  if (q < 1 || q > D.p) throw std::invalid_argument("collapse target must satisfy 1 <= q <= p");
  std::vector<std::int64_t> entries(D.x.size());
  for (std::size_t i = 0; i < D.x.size(); ++i) entries[i] = collapse_level(D.x[i], D.s, D.p, q);
  Constructed out;
  out.design = make_design(D.n, D.m, D.s, q, std::move(entries));
  out.provenance = "# provenance: collapse from_p=" + std::to_string(D.p) +
                   " to_q=" + std::to_string(q);
  return out;
}

Constructed worst_case_design(std::int64_t n, int m, std::int64_t s, int p) {
  const std::int64_t levels = ipow64(s, p);
  if (n < 2 || n % levels != 0)
    throw std::invalid_argument("worst-case construction needs s^p dividing n");
  if (m < 1) throw std::invalid_argument("worst-case construction needs at least one column");
  const std::int64_t reps = n / levels;
  std::vector<std::int64_t> entries(static_cast<std::size_t>(n) * m);
  for (std::int64_t row = 0; row < n; ++row)
    for (int k = 0; k < m; ++k) entries[static_cast<std::size_t>(row) * m + k] = row / reps;
  Constructed out;
  out.design = make_design(n, m, s, p, std::move(entries));
  out.provenance = "# provenance: worst-case identical-columns";
  return out;
}

}  // namespace sdphi
