#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace ergotile {

/// Exact arbitrary-precision rational. Always kept in canonical form
/// (reduced, positive denominator); equality and comparisons are exact.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(long long num, long long den = 1) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  return Rational(BigInt(num), BigInt(den));
}

/// Parses "p", "-p", "p/q", "-p/q" (q > 0 after normalization).
inline Rational parse_rational(std::string_view text) {
  auto fail = [&] {
    throw std::invalid_argument("rational: cannot parse '" + std::string(text) + "'");
  };
  if (text.empty()) fail();
  std::size_t slash = text.find('/');
  auto digits_ok = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  if (slash == std::string_view::npos) {
    if (!digits_ok(text)) fail();
    return Rational(BigInt(std::string(text)));
  }
  std::string_view num = text.substr(0, slash);
  std::string_view den = text.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den)) fail();
  BigInt d{std::string(den)};
  if (d == 0) fail();
  return Rational(BigInt(std::string(num)), d);
}

/// Canonical serialization: "p" when the denominator is 1, else "p/q".
inline std::string format_rational(const Rational& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) {
    s += '/';
    s += denominator(r).str();
  }
  return s;
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace ergotile
