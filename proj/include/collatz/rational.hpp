#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

#include "collatz/natural.hpp"

namespace collatz {

// Exact rational, always canonical (reduced, positive denominator). All
// threshold comparisons in the library are decided on these or on Naturals;
// no predicate ever touches floating point.
using Rational = mpq_class;

// Parses "num/den" or a bare integer. Decimals are rejected on purpose:
// 0.6 is not an exact rational literal, 3/5 is.
Rational parse_rational(std::string_view text);

// Renders as "num/den" with the denominator always present ("3/1", "0/1").
std::string render_rational(const Rational& q);

// Display-only decimal rendering, truncated toward zero at `digits` places.
// Deterministic: pure integer arithmetic, no floating point.
std::string decimal_string(const Rational& q, int digits = 12);

inline Natural numerator(const Rational& q) { return q.get_num(); }
inline Natural denominator(const Rational& q) { return q.get_den(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace collatz
