#ifndef COVERLAB_RADIUS_HPP
#define COVERLAB_RADIUS_HPP

#include <cstdint>

#include "coverlab/rational.hpp"

namespace coverlab {

// Decision radius
//   delta_n = max{ (1+alpha) * sqrt(2 * s_sq * loglog(n) / n), 2^-n }
// with loglog(n) = ln ln n clamped to 0 for n <= 3 (it is positive for n >= 4).
//
// The exact value is irrational in general; radius() returns a rational
// over-approximation delta_hat with
//   delta_n <= delta_hat <= delta_n + 2^-n,
// computed by directed-rounding dyadic enclosures whose width is checked and
// tightened until it fits the 2^-n budget. Nondecreasing in s_sq for fixed n.
Rational radius(std::uint64_t n, const Rational& s_sq, const Rational& alpha);

// Diagnostics-grade sound upper bound on delta_n at a caller-chosen precision
// (the 2^-n width budget is deliberately NOT honored; n may be astronomically
// large, e.g. ceil(j^p) for j = 1e4). The result always satisfies
// delta_n <= result. Throws if that cannot be certified at this precision.
Rational radius_upper(const Integer& n, const Rational& s_sq, const Rational& alpha,
                      unsigned long prec_bits);

}  // namespace coverlab

#endif  // COVERLAB_RADIUS_HPP
