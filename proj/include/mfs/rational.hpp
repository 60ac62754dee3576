#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace mfs {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "3", "-7/12", "0.125", "1e-3" or "2.5E+2" exactly. Throws ParseError.
Rational parse_rational(std::string_view text);

// Exact rational value of a finite double, via its shortest round-trip decimal
// representation (so 0.1 becomes 1/10, not the binary approximation).
Rational rational_from_double(double x);

inline double to_double(const Rational& q) { return q.get_d(); }

// Stable text form "num/den" (or "num" when den == 1).
std::string to_string(const Rational& q);

Integer lcm(const Integer& a, const Integer& b);

// Smallest integer strictly greater than q.
Integer floor_plus_one(const Rational& q);

}  // namespace mfs
