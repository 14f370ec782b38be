#ifndef COVERLAB_IDENTIFIER_HPP
#define COVERLAB_IDENTIFIER_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "coverlab/enumeration.hpp"
#include "coverlab/rational.hpp"
#include "coverlab/streams.hpp"

namespace coverlab {

// Decision schedule n(j) = j^p with k_j = j; p > 4 keeps sum_j k_j * delta'
// summable. alpha > 0 scales the iterated-logarithm radius. The dyadic
// over-approximation budget of the radius is fixed at 2^{-n}; the depth
// budget bounds the least-index scan purely as a diagnostic.
struct IdentifierConfig {
  Rational alpha = Rational(1, 2);
  unsigned p = 6;
  EpsilonKind epsilon = EpsilonKind::Pow2;
  std::uint64_t depth_budget = 10000000;

  void validate() const;  // throws std::invalid_argument on p <= 4, alpha <= 0
};

// n(j) = j^p, exact; throws std::overflow_error if it leaves uint64 range.
std::uint64_t decision_time(const IdentifierConfig& cfg, std::uint64_t j);

// Exact running first and second moments. Dyadic readouts (den = 2^k)
// accumulate in integer mantissa/exponent form - shift-and-add, no gcds -
// and everything else in plain rationals; both parts combine exactly.
class RunningStats {
 public:
  void add(const Rational& x);
  void add_repeat(const Rational& x, std::uint64_t count);

  std::uint64_t count() const { return m_n; }
  Rational sum() const;
  Rational sum_sq() const;
  Rational mean() const;      // requires count >= 1
  Rational variance() const;  // uncorrected: sum_sq/n - mean^2, exact, >= 0

 private:
  std::uint64_t m_n = 0;
  Integer m_dsum;
  unsigned long m_dsum_exp = 0;
  Integer m_dsq;
  unsigned long m_dsq_exp = 0;
  Rational m_qsum = Rational(0);
  Rational m_qsq = Rational(0);
};

// min{i >= 1 : |q_i - t| < delta}; terminates by density of the enumeration.
// Exceeding the depth budget is an internal failure (std::runtime_error): it
// signals a broken radius, not a legitimate outcome.
std::uint64_t least_index(const Rational& t, const Rational& delta, EnumerationCache& cache,
                          std::uint64_t depth_budget = 10000000);

// Decides d < 2^{-n} + eta_n exactly for a degenerate (zero-variance) prefix
// at any n: materializes the threshold when n is small enough, otherwise
// decides symbolically (for the dyadic schedule, d <= 1/n settles it exactly
// unless d's denominator has on the order of n bits, which is checked).
bool below_degenerate_threshold(const Rational& d, std::uint64_t n, EpsilonKind kind);

struct DecisionRecord {
  std::uint64_t j = 0;
  std::uint64_t n = 0;
  Rational mean;
  Rational s_sq;
  Rational delta_hat;    // zero when !materialized
  Rational delta_prime;  // zero when !materialized
  std::uint64_t i_j = 0;
  std::uint64_t C = 0;
  // False for fast-forwarded decisions at n too large to materialize 2^{-n};
  // the comparisons behind i_j and C were still exact.
  bool materialized = true;
};

// The sequential identifier over the rational enumeration: between decision
// times the output C is held; at n(j) it becomes i_j = least_index(mean,
// delta') if i_j <= k_j = j, else 0, with delta' = radius(n, s^2) + eta(n).
class IdentifierState {
 public:
  IdentifierState(IdentifierConfig cfg, std::shared_ptr<EnumerationCache> cache);

  void step(const Rational& readout);

  // Feeds `count` copies of q, executing every decision inside the span
  // exactly. Equivalent to calling step(q) count times; decisions falling at
  // non-materializable n require the whole prefix to have zero variance.
  void advance_constant(const Rational& q, std::uint64_t count);

  std::uint64_t output() const { return m_C; }
  std::uint64_t position() const { return m_stats.count(); }
  std::uint64_t decisions_made() const { return m_j; }
  std::uint64_t next_decision_time() const { return m_next_decision; }
  const RunningStats& stats() const { return m_stats; }
  const IdentifierConfig& config() const { return m_config; }
  const std::vector<DecisionRecord>& trace() const { return m_trace; }

 private:
  void decide();

  IdentifierConfig m_config;
  std::shared_ptr<EnumerationCache> m_cache;
  RunningStats m_stats;
  std::uint64_t m_j = 0;
  std::uint64_t m_next_decision = 1;  // n(1)
  std::uint64_t m_C = 0;
  std::vector<DecisionRecord> m_trace;
};

}  // namespace coverlab

#endif  // COVERLAB_IDENTIFIER_HPP
