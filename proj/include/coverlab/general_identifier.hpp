#ifndef COVERLAB_GENERAL_IDENTIFIER_HPP
#define COVERLAB_GENERAL_IDENTIFIER_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "coverlab/cauchy.hpp"
#include "coverlab/identifier.hpp"

namespace coverlab {

// The sequential identifier over an arbitrary presented family S: same
// schedule, radius, and hold rule as the rational-enumeration identifier, but
// membership of the running mean is decided by depth-bounded certified
// inclusion with depth schedule m(j) = j, so every decision is a finite,
// exact computation against the presentation's rational bounds.
class GeneralIdentifierState {
 public:
  GeneralIdentifierState(IdentifierConfig cfg,
                         std::shared_ptr<const CauchyPresentation> presentation);

  void step(const Rational& readout);

  std::uint64_t output() const { return m_C; }
  std::uint64_t position() const { return m_stats.count(); }
  std::uint64_t decisions_made() const { return m_j; }
  std::uint64_t next_decision_time() const { return m_next_decision; }
  const RunningStats& stats() const { return m_stats; }
  const IdentifierConfig& config() const { return m_config; }
  const CauchyPresentation& presentation() const { return *m_presentation; }
  const std::vector<DecisionRecord>& trace() const { return m_trace; }

 private:
  void decide();

  IdentifierConfig m_config;
  std::shared_ptr<const CauchyPresentation> m_presentation;
  RunningStats m_stats;
  std::uint64_t m_j = 0;
  std::uint64_t m_next_decision = 1;
  std::uint64_t m_C = 0;
  std::vector<DecisionRecord> m_trace;
};

}  // namespace coverlab

#endif  // COVERLAB_GENERAL_IDENTIFIER_HPP
