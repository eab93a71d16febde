#include "sdphi/weights.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sdphi {

namespace {

void validate_base_depth(std::int64_t s, int p) {
  if (s < 2) throw std::invalid_argument("stratification base must be at least 2");
  if (p < 1) throw std::invalid_argument("stratification depth must be positive");
}

// Parse a decimal literal ("0.25", "-3", "1e-2" is NOT accepted) as an exact
// rational num/10^k. CLI weight values are written this way, which keeps the
// custom scheme inside the exact arithmetic path.
Rational parse_decimal(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty number in weight list");
  std::size_t i = 0;
  bool neg = false;
  if (text[i] == '+' || text[i] == '-') {
    neg = text[i] == '-';
    ++i;
  }
  int128 num = 0;
  int128 den = 1;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("malformed number: " + text);
      seen_dot = true;
      continue;
    }
    if (ch < '0' || ch > '9') throw std::invalid_argument("malformed number: " + text);
    num = detail::checked_add(detail::checked_mul(num, 10), ch - '0');
    if (seen_dot) den = detail::checked_mul(den, 10);
    seen_digit = true;
  }
  if (!seen_digit) throw std::invalid_argument("malformed number: " + text);
  return Rational(neg ? -num : num, den);
}

void validate_weight_values(const std::vector<double>& w) {
  bool any_positive = false;
  for (double v : w) {
    if (!(v >= 0)) throw std::invalid_argument("weights must be non-negative");
    if (v > 0) any_positive = true;
  }
  if (!any_positive) throw std::invalid_argument("weights must not all be zero");
}

}  // namespace

std::string WeightScheme::describe() const {
  std::ostringstream out;
  switch (tag) {
    case WeightTag::Constant:
      out << "constant";
      break;
    case WeightTag::Exponential:
      out << "exp:" << y;
      break;
    case WeightTag::Enumerator:
      out << "enum:" << y;
      break;
    case WeightTag::Custom: {
      out << "custom:";
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) out << ",";
        if (has_exact())
          out << exact[i].str();
        else
          out << w[i];
      }
      break;
    }
  }
  return out.str();
}

WeightScheme make_weights(WeightTag tag, std::int64_t s, int p, double y) {
  validate_base_depth(s, p);
  WeightScheme out;
  out.tag = tag;
  out.s = s;
  out.p = p;
  out.y = y;
  out.w.resize(p + 1);
  switch (tag) {
    case WeightTag::Constant: {
      out.y = 1.0;
      out.exact.assign(p + 1, Rational(1));
      for (int i = 0; i <= p; ++i) out.w[i] = 1.0;
      break;
    }
    case WeightTag::Exponential: {
      if (!(y > 0.0 && y <= 1.0))
        throw std::invalid_argument("exponential weights need 0 < y <= 1");
      for (int i = 0; i <= p; ++i) out.w[i] = std::pow(y, i);
      break;
    }
    case WeightTag::Enumerator: {
      if (!(y > 0.0 && y < 1.0))
        throw std::invalid_argument("enumerator weights need 0 < y < 1");
      double base = static_cast<double>(s) * static_cast<double>(s) * y;
      for (int i = 0; i < p; ++i) out.w[i] = std::pow(base, i);
      out.w[p] = std::pow(base, p) / (1.0 - y);
      break;
    }
    case WeightTag::Custom:
      throw std::invalid_argument("custom weights require an explicit value list");
  }
  validate_weight_values(out.w);
  return out;
}

WeightScheme make_custom_weights(std::vector<double> w, std::int64_t s) {
  if (w.empty()) throw std::invalid_argument("custom weight list is empty");
  validate_base_depth(s, static_cast<int>(w.size()) - 1);
  validate_weight_values(w);
  WeightScheme out;
  out.tag = WeightTag::Custom;
  out.s = s;
  out.p = static_cast<int>(w.size()) - 1;
  out.w = std::move(w);
  return out;
}

WeightScheme make_custom_weights(std::vector<Rational> w, std::int64_t s) {
  if (w.empty()) throw std::invalid_argument("custom weight list is empty");
  std::vector<double> dbl(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) dbl[i] = w[i].to_double();
  WeightScheme out = make_custom_weights(std::move(dbl), s);
  out.exact = std::move(w);
  return out;
}

WeightSpec parse_weight_spec(const std::string& spec) {
  WeightSpec out;
  out.text = spec;
  if (spec == "constant") {
    out.tag = WeightTag::Constant;
    return out;
  }
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  std::string tail = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  if (head == "exp" || head == "enum") {
    out.tag = head == "exp" ? WeightTag::Exponential : WeightTag::Enumerator;
    try {
      std::size_t used = 0;
      out.y = std::stod(tail, &used);
      if (used != tail.size()) throw std::invalid_argument(tail);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad weight parameter in '" + spec + "'");
    }
    if (out.tag == WeightTag::Exponential && !(out.y > 0.0 && out.y <= 1.0))
      throw std::invalid_argument("exponential weights need 0 < y <= 1, got '" + spec + "'");
    if (out.tag == WeightTag::Enumerator && !(out.y > 0.0 && out.y < 1.0))
      throw std::invalid_argument("enumerator weights need 0 < y < 1, got '" + spec + "'");
    return out;
  }
  if (head == "custom") {
    out.tag = WeightTag::Custom;
    std::stringstream ss(tail);
    std::string item;
    while (std::getline(ss, item, ',')) out.custom.push_back(parse_decimal(item));
    if (out.custom.empty()) throw std::invalid_argument("custom weight list is empty");
    bool any_positive = false;
    for (const Rational& r : out.custom) {
      if (r < Rational(0))
        throw std::invalid_argument("custom weights must be non-negative in '" + spec + "'");
      if (Rational(0) < r) any_positive = true;
    }
    if (!any_positive)
      throw std::invalid_argument("custom weights must not be all zero in '" + spec + "'");
    return out;
  }
  throw std::invalid_argument("unknown weight scheme '" + spec + "'");
}

WeightScheme materialize(const WeightSpec& spec, std::int64_t s, int p) {
  validate_base_depth(s, p);
  if (spec.tag == WeightTag::Custom) {
    if (static_cast<int>(spec.custom.size()) != p + 1)
      throw std::invalid_argument("custom weights need exactly p+1 values (got " +
                                  std::to_string(spec.custom.size()) + ", need " +
                                  std::to_string(p + 1) + ")");
    return make_custom_weights(spec.custom, s);
  }
  return make_weights(spec.tag, s, p, spec.y);
}

KernelConstants kernel_constants(const WeightScheme& w, int m, std::int64_t n) {
  if (m < 2) throw std::invalid_argument("kernel constants need at least two columns");
  if (n < 2) throw std::invalid_argument("kernel constants need at least two runs");
  KernelConstants k;
  k.s = w.s;
  k.p = w.p;
  k.m = m;
  k.n = n;
  const int p = w.p;
  const double s = static_cast<double>(w.s);
  k.a0l.assign(p + 1, 0.0);
  double si = 1.0;  // s^i
  double partial = 0.0;
  for (int i = 0; i <= p; ++i) {
    partial += w.w[i] / si;
    k.a0l[i] = partial;
    si *= s;
  }
  k.a0 = k.a0l[p];
  si = 1.0;
  for (int i = 0; i <= p; ++i) {
    k.a1 += w.w[i] / (si * si);
    k.b += w.w[i] * w.w[i] / (si * si * si);
    si *= s;
  }
  double sj = 1.0;  // s^j
  for (int j = 0; j <= p; ++j) {
    double si2 = 1.0;
    for (int i = 0; i < j; ++i) {
      k.c += w.w[i] * w.w[j] / (si2 * sj * sj);
      si2 *= s;
    }
    sj *= s;
  }
  const double md = static_cast<double>(m);
  k.c_sd = -md / (md - 1) * k.a0 * k.a0 + 2 * md / (md - 1) * k.a0 * k.a1 - k.a1 * k.a1 -
           k.b / (md - 1) - 2 * k.c / (md - 1);
  k.d_bar = static_cast<double>(n) * md * (k.a0 - k.a1) / static_cast<double>(n - 1);
  return k;
}

KernelConstantsExact kernel_constants_exact(const WeightScheme& w, int m, std::int64_t n) {
  if (!w.has_exact())
    throw std::invalid_argument("exact kernel constants need exact weights");
  if (m < 2) throw std::invalid_argument("kernel constants need at least two columns");
  if (n < 2) throw std::invalid_argument("kernel constants need at least two runs");
  KernelConstantsExact k;
  const int p = w.p;
  k.a0l.assign(p + 1, Rational(0));
  Rational partial(0);
  for (int i = 0; i <= p; ++i) {
    partial += w.exact[i] / Rational(ipow128(w.s, i), 1);
    k.a0l[i] = partial;
  }
  k.a0 = k.a0l[p];
  for (int i = 0; i <= p; ++i) {
    k.a1 += w.exact[i] / Rational(ipow128(w.s, 2 * i), 1);
    k.b += w.exact[i] * w.exact[i] / Rational(ipow128(w.s, 3 * i), 1);
  }
  for (int j = 0; j <= p; ++j)
    for (int i = 0; i < j; ++i)
      k.c += w.exact[i] * w.exact[j] / Rational(ipow128(w.s, i + 2 * j), 1);
  Rational md(m);
  Rational m1(m - 1);
  k.c_sd = -(md / m1) * k.a0 * k.a0 + Rational(2) * (md / m1) * k.a0 * k.a1 - k.a1 * k.a1 -
           k.b / m1 - Rational(2) * k.c / m1;
  k.d_bar = Rational(n) * md * (k.a0 - k.a1) / Rational(n - 1);
  return k;
}

double geometric_partial_sum(int p, double q) {
  if (p < 0) throw std::invalid_argument("negative series length");
  if (q == 1.0) return static_cast<double>(p + 1);
  return (1.0 - std::pow(q, p + 1)) / (1.0 - q);
}

double nrt_partial_sum(int d, const WeightScheme& w) {
  if (d < 0 || d > w.p) throw std::invalid_argument("hierarchical distance out of range");
  double out = 0.0, si = 1.0;
  for (int i = 0; i <= w.p - d; ++i) {
    out += w.w[i] / si;
    si *= static_cast<double>(w.s);
  }
  return out;
}

}  // namespace sdphi
