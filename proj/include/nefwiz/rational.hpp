#pragma once

// Exact rational arithmetic. Every coefficient in the library is a Rational;
// there are no floating point values and no tolerances anywhere.

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nefwiz {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Parses "p", "-p" or "p/q" with q > 0. Whitespace is not accepted.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&](const char* why) {
    throw std::invalid_argument("malformed rational '" + std::string(text) + "': " + why);
  };
  auto digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s)
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    return true;
  };
  if (text.empty()) fail("empty");
  std::string_view num = text, den;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    num = text.substr(0, slash);
    den = text.substr(slash + 1);
    if (!digits(den)) fail("bad denominator");
  }
  std::string_view mag = num;
  if (!mag.empty() && mag.front() == '-') mag.remove_prefix(1);
  if (!digits(mag)) fail("bad numerator");
  Integer p{std::string(num)};
  Integer q = den.empty() ? Integer(1) : Integer(std::string(den));
  if (q == 0) fail("zero denominator");
  return Rational(p, q);
}

/// Reduced form: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& r) {
  return r.str();
}

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace nefwiz
