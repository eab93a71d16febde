#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sdphi {

/// Base-s digit expansion of a label in {0, ..., s^p - 1}, most significant
/// digit first, so d[0] selects the coarsest stratum.
struct DigitVector {
  std::int64_t s = 2;
  int p = 1;
  std::vector<int> d;

  /// Recombine the digits into the integer label.
  std::int64_t value() const;
};

/// Digit expansion of y (0 <= y < s^p).
DigitVector digits(std::int64_t y, std::int64_t s, int p);

/// Truncate a p-digit label to its q most significant digits: y / s^(p-q).
std::int64_t collapse_level(std::int64_t y, std::int64_t s, int p, int q);

/// Smallest t >= 0 such that floor(x/s^t) == floor(y/s^t): the depth below
/// which the two labels share every digit. Zero iff x == y; at most p.
int nrt_distance(std::int64_t x, std::int64_t y, std::int64_t s, int p);

bool is_prime(std::int64_t v);

/// Factor q as r^e with r prime; throws std::invalid_argument otherwise.
std::pair<std::int64_t, int> factor_prime_power(std::int64_t q);

/// The finite field GF(r^e) with elements labeled 0 .. r^e - 1.
///
/// A label encodes the coefficient vector of the element in base r (most
/// significant coefficient first), so addition is digitwise addition mod r
/// and the labels of Z_r-subfield elements are 0 .. r-1. The reducing
/// modulus is the lexicographically smallest monic irreducible polynomial of
/// degree e over Z_r — a deterministic choice, so labels mean the same thing
/// across runs and platforms.
///
/// Small fields keep dense q x q add/mul tables; larger ones (order up to
/// 2^20) evaluate products on demand from the modulus.
class GaloisField {
 public:
  GaloisField(std::int64_t r, int e);

  std::int64_t characteristic() const { return r_; }
  int extension_degree() const { return e_; }
  std::int64_t order() const { return q_; }

  /// Modulus coefficients, constant term first; the leading (degree-e)
  /// coefficient 1 is included.
  const std::vector<int>& modulus() const { return modulus_; }

  /// Human-readable modulus, most significant coefficient first, e.g. "1,0,1"
  /// for x^2 + 1.
  std::string modulus_string() const;

  std::int64_t add(std::int64_t a, std::int64_t b) const;
  std::int64_t sub(std::int64_t a, std::int64_t b) const;
  std::int64_t neg(std::int64_t a) const;
  std::int64_t mul(std::int64_t a, std::int64_t b) const;
  std::int64_t pow(std::int64_t a, std::int64_t k) const;
  std::int64_t inv(std::int64_t a) const;

 private:
  std::int64_t add_impl(std::int64_t a, std::int64_t b) const;
  std::int64_t mul_impl(std::int64_t a, std::int64_t b) const;
  void check_element(std::int64_t a) const;

  std::int64_t r_;
  int e_;
  std::int64_t q_;
  std::vector<int> modulus_;  // low coefficient first, size e+1, monic
  bool dense_ = false;
  std::vector<std::int32_t> add_table_;  // q*q when dense
  std::vector<std::int32_t> mul_table_;  // q*q when dense
};

/// Convenience factory matching the class constructor.
GaloisField build_field(std::int64_t r, int e);

}  // namespace sdphi
