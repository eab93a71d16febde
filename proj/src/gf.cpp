#include "sdphi/gf.hpp"

#include <stdexcept>

#include "sdphi/rational.hpp"

namespace sdphi {

namespace {

constexpr std::int64_t kMaxFieldOrder = std::int64_t{1} << 20;
constexpr std::int64_t kDenseTableLimit = 2048;  // tables cost q*q ints

using Poly = std::vector<int>;  // coefficients over Z_r, low degree first

int poly_degree(const Poly& a) {
  for (int i = static_cast<int>(a.size()) - 1; i >= 0; --i)
    if (a[i] != 0) return i;
  return -1;  // zero polynomial
}

Poly poly_mul(const Poly& a, const Poly& b, std::int64_t r) {
  Poly out(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      out[i + j] = static_cast<int>((out[i + j] + static_cast<std::int64_t>(a[i]) * b[j]) % r);
  }
  return out;
}

// Remainder of a modulo a monic divisor.
Poly poly_mod(Poly a, const Poly& mod, std::int64_t r) {
  int dm = poly_degree(mod);
  for (int d = poly_degree(a); d >= dm; d = poly_degree(a)) {
    int c = a[d];  // nonzero by poly_degree contract
    for (int i = 0; i <= dm; ++i) {
      std::int64_t v = a[d - dm + i] - static_cast<std::int64_t>(c) * mod[i];
      a[d - dm + i] = static_cast<int>(((v % r) + r) % r);
    }
    a.resize(d);  // leading coefficient is now zero
    if (a.empty()) break;
  }
  return a;
}

bool poly_is_zero(const Poly& a) { return poly_degree(a) < 0; }

Poly label_to_poly(std::int64_t x, std::int64_t r, int len) {
  Poly c(len, 0);
  for (int i = 0; i < len && x > 0; ++i) {
    c[i] = static_cast<int>(x % r);
    x /= r;
  }
  return c;
}

std::int64_t poly_to_label(const Poly& c, std::int64_t r) {
  std::int64_t x = 0;
  for (int i = poly_degree(c); i >= 0; --i) x = x * r + c[i];
  return x;
}

// Monic polynomial of degree deg whose non-leading coefficients encode k in
// base r. Enumerating k in increasing order walks candidates in increasing
// lexicographic order of (leading, ..., constant) coefficient vectors.
Poly monic_from_index(std::int64_t k, std::int64_t r, int deg) {
  Poly c = label_to_poly(k, r, deg + 1);
  c[deg] = 1;
  return c;
}

bool poly_divides(const Poly& divisor, const Poly& a, std::int64_t r) {
  return poly_is_zero(poly_mod(a, divisor, r));
}

// Irreducible over Z_r iff no monic divisor of degree 1..deg/2 divides it.
bool poly_irreducible(const Poly& a, std::int64_t r) {
  int deg = poly_degree(a);
  for (int d = 1; d * 2 <= deg; ++d) {
    std::int64_t count = 1;
    for (int i = 0; i < d; ++i) count *= r;  // r^d candidate divisors
    for (std::int64_t k = 0; k < count; ++k) {
      if (poly_divides(monic_from_index(k, r, d), a, r)) return false;
    }
  }
  return true;
}

Poly find_modulus(std::int64_t r, int e) {
  std::int64_t count = 1;
  for (int i = 0; i < e; ++i) count *= r;
  for (std::int64_t k = 0; k < count; ++k) {
    Poly cand = monic_from_index(k, r, e);
    if (poly_irreducible(cand, r)) return cand;
  }
  throw std::logic_error("no irreducible polynomial found (impossible)");
}

}  // namespace

std::int64_t DigitVector::value() const {
  std::int64_t v = 0;
  for (int digit : d) v = v * s + digit;
  return v;
}

DigitVector digits(std::int64_t y, std::int64_t s, int p) {
  if (s < 2) throw std::invalid_argument("digit base must be at least 2");
  if (p < 1) throw std::invalid_argument("digit count must be positive");
  DigitVector out;
  out.s = s;
  out.p = p;
  out.d.assign(p, 0);
  if (y < 0) throw std::invalid_argument("label must be non-negative");
  std::int64_t rest = y;
  for (int i = p - 1; i >= 0; --i) {
    out.d[i] = static_cast<int>(rest % s);
    rest /= s;
  }
  if (rest != 0) throw std::invalid_argument("label does not fit in p base-s digits");
  return out;
}

std::int64_t collapse_level(std::int64_t y, std::int64_t s, int p, int q) {
  if (q < 1 || q > p) throw std::invalid_argument("collapse target must satisfy 1 <= q <= p");
  return y / ipow64(s, p - q);
}

int nrt_distance(std::int64_t x, std::int64_t y, std::int64_t s, int p) {
  std::int64_t limit = ipow64(s, p);
  if (x < 0 || y < 0 || x >= limit || y >= limit)
    throw std::invalid_argument("labels out of range for nrt_distance");
  int t = 0;
  while (x != y) {
    x /= s;
    y /= s;
    ++t;
  }
  return t;
}

bool is_prime(std::int64_t v) {
  if (v < 2) return false;
  for (std::int64_t d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

std::pair<std::int64_t, int> factor_prime_power(std::int64_t q) {
  if (q < 2) throw std::invalid_argument("prime power must be at least 2");
  std::int64_t r = q;
  for (std::int64_t d = 2; d * d <= q; ++d) {
    if (q % d == 0) {
      r = d;
      break;
    }
  }
  int e = 0;
  std::int64_t rest = q;
  while (rest % r == 0) {
    rest /= r;
    ++e;
  }
  if (rest != 1) throw std::invalid_argument("not a prime power: " + std::to_string(q));
  return {r, e};
}

GaloisField::GaloisField(std::int64_t r, int e) : r_(r), e_(e) {
  if (!is_prime(r)) throw std::invalid_argument("field characteristic must be prime");
  if (e < 1) throw std::invalid_argument("extension degree must be positive");
  q_ = ipow64(r, e);
  if (q_ > kMaxFieldOrder) throw std::invalid_argument("field order exceeds 2^20");
  modulus_ = find_modulus(r, e);  // for e == 1 this is the polynomial x
  dense_ = q_ <= kDenseTableLimit;
  if (dense_) {
    add_table_.resize(static_cast<std::size_t>(q_) * q_);
    mul_table_.resize(static_cast<std::size_t>(q_) * q_);
    for (std::int64_t a = 0; a < q_; ++a) {
      for (std::int64_t b = 0; b < q_; ++b) {
        add_table_[static_cast<std::size_t>(a) * q_ + b] = static_cast<std::int32_t>(add_impl(a, b));
        mul_table_[static_cast<std::size_t>(a) * q_ + b] = static_cast<std::int32_t>(mul_impl(a, b));
      }
    }
  }
}

std::string GaloisField::modulus_string() const {
  std::string out;
  for (int i = e_; i >= 0; --i) {
    if (!out.empty()) out += ",";
    out += std::to_string(modulus_[i]);
  }
  return out;
}

void GaloisField::check_element(std::int64_t a) const {
  if (a < 0 || a >= q_) throw std::invalid_argument("field element label out of range");
}

std::int64_t GaloisField::add_impl(std::int64_t a, std::int64_t b) const {
  // Digitwise addition mod r; no carries because coefficients are independent.
  std::int64_t out = 0, place = 1;
  for (int i = 0; i < e_; ++i) {
    out += ((a % r_ + b % r_) % r_) * place;
    a /= r_;
    b /= r_;
    place *= r_;
  }
  return out;
}

std::int64_t GaloisField::mul_impl(std::int64_t a, std::int64_t b) const {
  Poly prod = poly_mul(label_to_poly(a, r_, e_), label_to_poly(b, r_, e_), r_);
  return poly_to_label(poly_mod(std::move(prod), modulus_, r_), r_);
}

std::int64_t GaloisField::add(std::int64_t a, std::int64_t b) const {
  check_element(a);
  check_element(b);
  if (dense_) return add_table_[static_cast<std::size_t>(a) * q_ + b];
  return add_impl(a, b);
}

std::int64_t GaloisField::sub(std::int64_t a, std::int64_t b) const { return add(a, neg(b)); }

std::int64_t GaloisField::neg(std::int64_t a) const {
  check_element(a);
  std::int64_t out = 0, place = 1;
  for (int i = 0; i < e_; ++i) {
    out += ((r_ - a % r_) % r_) * place;
    a /= r_;
    place *= r_;
  }
  return out;
}

std::int64_t GaloisField::mul(std::int64_t a, std::int64_t b) const {
  check_element(a);
  check_element(b);
  if (dense_) return mul_table_[static_cast<std::size_t>(a) * q_ + b];
  return mul_impl(a, b);
}

std::int64_t GaloisField::pow(std::int64_t a, std::int64_t k) const {
  check_element(a);
  if (k < 0) throw std::invalid_argument("negative field exponent");
  std::int64_t result = 1, base = a;
  while (k > 0) {
    if (k & 1) result = mul(result, base);
    base = mul(base, base);
    k >>= 1;
  }
  return result;
}

std::int64_t GaloisField::inv(std::int64_t a) const {
  check_element(a);
  if (a == 0) throw std::domain_error("zero has no multiplicative inverse");
  return pow(a, q_ - 2);
}

GaloisField build_field(std::int64_t r, int e) { return GaloisField(r, e); }

}  // namespace sdphi
