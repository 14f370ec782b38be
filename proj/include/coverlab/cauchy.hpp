#ifndef COVERLAB_CAUCHY_HPP
#define COVERLAB_CAUCHY_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "coverlab/rational.hpp"

namespace coverlab {

// Countable family s_1, s_2, ... of reals, each exposed through total rational
// bounds: L(j,m) <= s_j <= U(j,m) with U - L <= 2^{-m} for m >= 1. Successive
// intervals for one member need not be nested; callers that need nesting go
// through nested_bounds, which intersects them.
class CauchyPresentation {
 public:
  virtual ~CauchyPresentation() = default;

  virtual const std::string& name() const = 0;
  // nullopt means the family is infinite.
  virtual std::optional<std::uint64_t> member_count() const = 0;
  virtual void bounds(std::uint64_t j, std::uint64_t m, Rational& lower,
                      Rational& upper) const = 0;
};

// Intersection of the member's intervals at depths 1..m: at least as tight as
// the raw depth-m interval and monotone in m.
void nested_bounds(const CauchyPresentation& p, std::uint64_t j, std::uint64_t m,
                   Rational& lower, Rational& upper);

// Depth-bounded certified inclusion: true iff some m <= n has
// x - delta < L(j,m) and U(j,m) < x + delta (nested bounds). Sound: a true
// answer proves s_j lies strictly inside (x - delta, x + delta). n = 0 never
// certifies. Monotone in n.
bool certified_in(const CauchyPresentation& p, std::uint64_t j, const Rational& x,
                  const Rational& delta, std::uint64_t n);

// min{1 <= j <= k : certified_in(p, j, x, delta, n)}, or 0 if no member
// certifies. k is clamped to the family size for finite families.
std::uint64_t bounded_least_index(const CauchyPresentation& p, std::uint64_t k, std::uint64_t n,
                                  const Rational& x, const Rational& delta);

// Single member s_1 = q with L = U = q at every depth.
std::shared_ptr<CauchyPresentation> make_rational_presentation(const Rational& q);

// Single member s_1 = sqrt(d)/divisor for integer d >= 0, divisor >= 1, via
// dyadic integer-sqrt bounds: floor(2^m*sqrt(d)) brackets sqrt(d) within
// 2^{-m}, and the divisor only tightens the width. Digit-by-digit refinement
// is cached, so deepening by one costs one shift-and-compare.
std::shared_ptr<CauchyPresentation> make_sqrt_presentation(std::uint64_t d,
                                                           std::uint64_t divisor = 1);

// Single member s_1 = e via partial sums of sum 1/k!: with M(m) the least M
// whose tail bound 2/(M+1)! is <= 2^{-m}, the interval is
// [S_M, S_M + 2/(M+1)!].
std::shared_ptr<CauchyPresentation> make_e_presentation();

// Finite family whose j-th member is the (single) member of the j-th listed
// presentation.
std::shared_ptr<CauchyPresentation> make_list_presentation(
    std::string name, std::vector<std::shared_ptr<CauchyPresentation>> members);

}  // namespace coverlab

#endif  // COVERLAB_CAUCHY_HPP
