#include "sdphi/rational.hpp"

#include <algorithm>
#include <limits>

namespace sdphi {

std::string int128_to_string(int128 v) {
  if (v == 0) return "0";
  bool neg = v < 0;
  // Careful with INT128_MIN: negate digit by digit via unsigned.
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  std::string out;
  while (u > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) out.push_back('-');
  std::reverse(out.begin(), out.end());
  return out;
}

int128 ipow128(int128 base, int exp) {
  if (exp < 0) throw std::domain_error("negative exponent in integer power");
  int128 r = 1;
  for (int i = 0; i < exp; ++i) r = detail::checked_mul(r, base);
  return r;
}

std::int64_t ipow64(std::int64_t base, int exp) {
  int128 r = ipow128(base, exp);
  if (r > std::numeric_limits<std::int64_t>::max() || r < std::numeric_limits<std::int64_t>::min())
    throw RationalOverflow{};
  return static_cast<std::int64_t>(r);
}

}  // namespace sdphi
