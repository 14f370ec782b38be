#ifndef COVERLAB_MEMBERSHIP_HPP
#define COVERLAB_MEMBERSHIP_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "coverlab/general_identifier.hpp"
#include "coverlab/identifier.hpp"
#include "coverlab/limit_approx.hpp"
#include "coverlab/streams.hpp"

namespace coverlab {

// Incrementally evaluated membership test: update() feeds one readout and
// returns the current verdict bit. Deterministic in the readout prefix.
class SequentialTest {
 public:
  virtual ~SequentialTest() = default;
  virtual int update(const Rational& readout) = 0;
  virtual const std::string& name() const = 0;
  // Decision trace of the identifier driving this test, when there is one.
  virtual const std::vector<DecisionRecord>* decision_trace() const { return nullptr; }
};

using TestFactory = std::function<std::unique_ptr<SequentialTest>()>;

// Verdict-sequence bookkeeping over one run. last_change is the largest
// n >= 2 with F_n != F_{n-1} (0 if the verdict never moved); mistakes counts
// n with F_n != truth; stabilized_correct means the final verdict is the
// truth (last_change already tells when it settled).
struct TrialRecord {
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;
  std::string mu;
  std::string set_name;
  int truth = 0;
  std::uint64_t horizon = 0;
  std::uint64_t mistakes = 0;
  std::uint64_t last_change = 0;
  int final_verdict = 0;
  bool stabilized_correct = false;
};

std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& r);
TrialRecord parse_trial_csv_row(const std::string& line);  // std::invalid_argument on bad rows

// F_n = 0 when C_n = 0, else a(C_n, n): the two-stage test that turns an
// identifier plus a stage-indexed approximation of the index set into a
// sequential membership verdict.
std::unique_ptr<SequentialTest> compose(IdentifierConfig cfg,
                                        std::shared_ptr<EnumerationCache> cache,
                                        std::shared_ptr<const LimitApproximator> approximator);

std::unique_ptr<SequentialTest> compose_general(
    IdentifierConfig cfg, std::shared_ptr<const CauchyPresentation> presentation,
    std::shared_ptr<const LimitApproximator> approximator);

// Feeds `horizon` readouts into the test and scores the verdicts.
TrialRecord run_trial(SequentialTest& test, ReadoutStream& stream, std::uint64_t horizon,
                      int truth);

// Same scoring for the composed test on the degenerate stream q, q, ..., but
// in time proportional to the number of decisions and verdict flips rather
// than the horizon, via the identifier fast-forward. Results are identical to
// run_trial on constant_stream(q).
TrialRecord run_constant_composed_trial(const IdentifierConfig& cfg,
                                        const std::shared_ptr<EnumerationCache>& cache,
                                        const std::shared_ptr<const LimitApproximator>& a,
                                        const Rational& q, std::uint64_t horizon, int truth);

// Identifier-only degenerate run: decision trace plus the last n at which the
// output changed (0 if it never did; the initial output is 0).
struct ConstantIdentifierRun {
  std::vector<DecisionRecord> decisions;
  std::uint64_t final_output = 0;
  std::uint64_t last_output_change = 0;
};
ConstantIdentifierRun run_constant_identifier(const IdentifierConfig& cfg,
                                              const std::shared_ptr<EnumerationCache>& cache,
                                              const Rational& q, std::uint64_t horizon);

// The necessity reduction: a(i, n) = the test's verdict after n copies of
// q_i. Evaluates a fresh test per row, caching each row as its list of
// verdict changes. The factory variant replays any test step by step; the
// composed variant exploits the constant-stream fast path and is equivalent.
std::unique_ptr<LimitApproximator> induced_approximator(TestFactory factory,
                                                        std::shared_ptr<EnumerationCache> cache,
                                                        std::string name);

std::unique_ptr<LimitApproximator> induced_approximator_fast(
    IdentifierConfig cfg, std::shared_ptr<EnumerationCache> cache,
    std::shared_ptr<const LimitApproximator> a, std::string name);

}  // namespace coverlab

#endif  // COVERLAB_MEMBERSHIP_HPP
