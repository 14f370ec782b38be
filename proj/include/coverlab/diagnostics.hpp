#ifndef COVERLAB_DIAGNOSTICS_HPP
#define COVERLAB_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "coverlab/enumeration.hpp"
#include "coverlab/identifier.hpp"
#include "coverlab/rational.hpp"
#include "coverlab/streams.hpp"

namespace coverlab {

// Exact Lebesgue measure of the union of open intervals (q_i - delta,
// q_i + delta) over i <= k, by sort-and-merge. Always <= 2*k*delta.
Rational union_measure(std::uint64_t k, const Rational& delta, EnumerationCache& cache);

// Incremental form of the same bound check: inserts intervals i = 1..k_max
// one at a time into a running merged set and verifies measure <= 2*i*delta
// after each. Returns the first violating i, or 0 when the bound holds
// throughout (it must; a nonzero return means broken arithmetic).
std::uint64_t union_measure_sweep_violation(std::uint64_t k_max, const Rational& delta,
                                            EnumerationCache& cache);

// Partial sums behind the finite-mistake argument: with n(j) = j^p and
// k_j = j, the series sum_j j * eta_{n(j)} and sum_j j * delta'_{n(j)} must
// converge; termwise, j * eta_{n(j)} <= c * j^{1-p}. Terms whose n(j) is too
// large to materialize exactly are enclosed (eta) or bounded above (delta'),
// so the report carries certified rational bounds rather than floats.
struct SummabilityReport {
  std::uint64_t J = 0;
  unsigned p = 6;
  EpsilonKind kind = EpsilonKind::Pow2;
  Rational s_sq_profile;

  Rational eta_sum_lower;   // sum_{j<=J} j * eta_{n(j)}, certified enclosure
  Rational eta_sum_upper;
  bool eta_terms_exact = false;  // true when every term materialized exactly

  Rational comparison_sum;  // sum_{j<=J} j^{1-p}, exact

  // eta_n <= c/n termwise: c = 1 for the dyadic schedule, c = 2 for i^{-2}.
  Rational c_constant;
  bool eta_bound_holds = false;  // eta_sum_upper <= c * comparison_sum

  // Certified upper bound on sum_{j<=J} j * (delta_hat + eta)_{n(j)} at the
  // constant variance profile above.
  Rational delta_prime_sum_upper;

  std::string notes;
};

SummabilityReport summability_report(const IdentifierConfig& cfg, std::uint64_t J,
                                     const Rational& s_sq_profile);

// Per-seed tail behavior of the radius guarantee: the last n <= horizon with
// |mean_n - mu| >= delta_hat_n and how often it happened. Requires a
// nondegenerate, rational-support distribution so mu is exactly known.
struct CoverageRow {
  std::uint64_t seed = 0;
  std::uint64_t last_violation = 0;  // 0 = no violations at all
  std::uint64_t violations = 0;
};

std::vector<CoverageRow> lil_coverage(const DistributionSpec& spec,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::uint64_t horizon, const IdentifierConfig& cfg);

}  // namespace coverlab

#endif  // COVERLAB_DIAGNOSTICS_HPP
