#ifndef COVERLAB_ENUMERATION_HPP
#define COVERLAB_ENUMERATION_HPP

#include <cstdint>
#include <deque>
#include <mutex>

#include "coverlab/rational.hpp"

namespace coverlab {

// Fixed bijection between positive indices and the rationals:
//   q_1 = 0, q_{2m} = +cw(m), q_{2m+1} = -cw(m)
// where cw is the Calkin-Wilf sequence over the positive rationals:
//   cw(1) = 1, cw(2n) = cw(n)/(cw(n)+1), cw(2n+1) = cw(n)+1.
// Index 0 is reserved by callers to mean "no rational".

// cw(m), m >= 1.
Rational calkin_wilf(const Integer& m);

// q_i, i >= 1.
Rational enumerate(const Integer& i);
Rational enumerate(std::uint64_t i);

// The unique i with q_i = q. Inverse of enumerate; runs in O(len(cf(q)))
// big-integer steps, so it is total even for indices far beyond word size.
Integer index_of(const Rational& q);

// Materialized prefix q_1..q_n for scan-heavy callers; grows on demand.
// Safe to share across threads: growth happens under a lock and the deque
// keeps element references stable, so returned references stay valid.
class EnumerationCache {
 public:
  const Rational& at(std::uint64_t i);  // i >= 1

 private:
  std::mutex m_mutex;
  std::deque<Rational> m_values;  // m_values[k] = q_{k+1}
};

}  // namespace coverlab

#endif  // COVERLAB_ENUMERATION_HPP
