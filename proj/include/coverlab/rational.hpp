#ifndef COVERLAB_RATIONAL_HPP
#define COVERLAB_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace coverlab {

// Exact arbitrary-precision rational, canonical lowest terms. The universal
// value type: every quantity the decision logic compares is one of these.
using Rational = mpq_class;
using Integer = mpz_class;

// 2^e for any integer e (negative e gives 1/2^|e|).
Rational pow2(long e);

// Parse "num/den" or a bare integer "num". Throws std::invalid_argument on
// malformed input or zero denominator.
Rational parse_rational(const std::string& text);

// Canonical serialization: always "num/den" in lowest terms, sign on the
// numerator ("0/1", "-2/1", "3/7").
std::string to_fraction_string(const Rational& q);

Rational abs_rational(const Rational& q);

// True if q = m/2^k for some integer m, k >= 0; reports k.
bool is_dyadic(const Rational& q, unsigned long* exponent_out = nullptr);

// floor(log2(q)) for q > 0.
long floor_log2(const Rational& q);

// Exact value of a nonnegative dyadic accumulator num/2^exp.
Rational dyadic_to_rational(const Integer& num, unsigned long exp);

}  // namespace coverlab

#endif  // COVERLAB_RATIONAL_HPP
