#pragma once

#include "nefwiz/rational.hpp"

#include <gtest/gtest.h>

#include <string>

namespace nefwiz::test {

inline Rational Q(const char* text) { return parse_rational(text); }

}  // namespace nefwiz::test

namespace boost::multiprecision {
// Readable gtest failure messages for rationals.
inline void PrintTo(const mpq_rational& r, std::ostream* os) { *os << nefwiz::to_string(r); }
}  // namespace boost::multiprecision
