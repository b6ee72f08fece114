#pragma once

// Exact arbitrary-precision rational and integer arithmetic used by the
// exact kernel / certificate paths. Thin aliases over GMP's C++ classes so
// the rest of the library never spells gmpxx types directly.

#include <gmpxx.h>

#include <string>
#include <vector>

namespace forge {

using Integer = mpz_class;
using Rational = mpq_class;

// num/den in canonical (reduced) form. The raw two-argument mpq_class
// constructor does not reduce, which breaks comparisons; use this instead.
Rational make_rational(long num, long den);

// Lossless double -> rational conversion (every finite double is rational).
Rational rational_from_double(double x);

double to_double(const Rational& q);

// Parses "n", "n/d", or a plain decimal like "-0.25". Throws
// std::invalid_argument on malformed input or zero denominator.
Rational rational_from_string(const std::string& s);

// Canonical "n" or "n/d" form (denominator omitted when 1).
std::string to_string(const Rational& q);

Integer binomial(unsigned long n, unsigned long k);

// n! / (r_0! r_1! ... r_{k-1}!) with n = sum of parts. Parts must be >= 0.
Integer multinomial(const std::vector<int>& parts);

// Scales a rational vector to the canonical integer representative:
// denominators cleared, content (gcd) divided out, leading (last nonzero)
// entry positive. Zero vectors are left unchanged.
void canonicalize_rational_vector(std::vector<Rational>& v);

}  // namespace forge
