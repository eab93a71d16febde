#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sdphi {

using int128 = __int128;

/// Thrown when an exact computation no longer fits in 128-bit integers.
/// Callers that can tolerate approximation catch this and fall back to
/// floating point.
struct RationalOverflow : std::overflow_error {
  RationalOverflow() : std::overflow_error("exact rational arithmetic overflowed 128-bit range") {}
};

namespace detail {

inline int128 checked_add(int128 a, int128 b) {
  int128 r;
  if (__builtin_add_overflow(a, b, &r)) throw RationalOverflow{};
  return r;
}

inline int128 checked_sub(int128 a, int128 b) {
  int128 r;
  if (__builtin_sub_overflow(a, b, &r)) throw RationalOverflow{};
  return r;
}

inline int128 checked_mul(int128 a, int128 b) {
  int128 r;
  if (__builtin_mul_overflow(a, b, &r)) throw RationalOverflow{};
  return r;
}

inline int128 gcd128(int128 a, int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

}  // namespace detail

/// Decimal rendering of a 128-bit integer (std::to_string has no overload).
std::string int128_to_string(int128 v);

/// Exact fraction with 128-bit numerator and denominator, always stored in
/// lowest terms with a positive denominator. Arithmetic is overflow-checked;
/// an operation that cannot be represented throws RationalOverflow rather
/// than silently wrapping.
class Rational {
 public:
  Rational() : num_(0), den_(1) {}
  Rational(std::int64_t v) : num_(v), den_(1) {}  // NOLINT: implicit by design
  Rational(int128 num, int128 den) : num_(num), den_(den) { normalize(); }

  static Rational from_int128(int128 v) { return Rational(v, 1); }

  int128 num() const { return num_; }
  int128 den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  Rational operator-() const { return Rational(-num_, den_, NoNormalize{}); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    using namespace detail;
    int128 g = gcd128(a.den_, b.den_);
    int128 bd = b.den_ / g;
    int128 num = checked_add(checked_mul(a.num_, bd), checked_mul(b.num_, a.den_ / g));
    int128 den = checked_mul(a.den_, bd);
    return Rational(num, den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
  friend Rational operator*(const Rational& a, const Rational& b) {
    using namespace detail;
    int128 g1 = gcd128(a.num_, b.den_);
    int128 g2 = gcd128(b.num_, a.den_);
    int128 num = checked_mul(a.num_ / g1, b.num_ / g2);
    int128 den = checked_mul(a.den_ / g2, b.den_ / g1);
    return Rational(num, den, NoNormalize{});
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return a * Rational(b.den_, b.num_);
  }

  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    // Compare via cross multiplication; overflow-checked like everything else.
    return detail::checked_mul(a.num_, b.den_) < detail::checked_mul(b.num_, a.den_);
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a == b || a < b; }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  double to_double() const {
    return static_cast<double>(static_cast<long double>(num_) / static_cast<long double>(den_));
  }

  /// "num/den", or just "num" for integers.
  std::string str() const {
    std::string s = int128_to_string(num_);
    if (den_ != 1) s += "/" + int128_to_string(den_);
    return s;
  }

  Rational squared() const { return *this * *this; }

 private:
  struct NoNormalize {};
  Rational(int128 num, int128 den, NoNormalize) : num_(num), den_(den) {}

  void normalize() {
    if (den_ == 0) throw std::domain_error("rational with zero denominator");
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    int128 g = detail::gcd128(num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
    if (num_ == 0) den_ = 1;
  }

  int128 num_;
  int128 den_;
};

/// Exact base^exp for small integer powers; throws RationalOverflow on overflow.
int128 ipow128(int128 base, int exp);

/// Exact base^exp as int64; throws RationalOverflow if out of range.
std::int64_t ipow64(std::int64_t base, int exp);

}  // namespace sdphi
