#include "coverlab/general_identifier.hpp"

#include <stdexcept>
#include <utility>

#include "coverlab/radius.hpp"

namespace coverlab {

GeneralIdentifierState::GeneralIdentifierState(
    IdentifierConfig cfg, std::shared_ptr<const CauchyPresentation> presentation)
    : m_config(std::move(cfg)), m_presentation(std::move(presentation)) {
  m_config.validate();
  if (!m_presentation) throw std::invalid_argument("missing presentation");
  m_next_decision = decision_time(m_config, 1);
}

void GeneralIdentifierState::step(const Rational& readout) {
  m_stats.add(readout);
  if (m_stats.count() == m_next_decision) decide();
}

void GeneralIdentifierState::decide() {
  const std::uint64_t n = m_stats.count();
  const std::uint64_t j = m_j + 1;
  DecisionRecord rec;
  rec.j = j;
  rec.n = n;
  rec.mean = m_stats.mean();
  rec.s_sq = m_stats.variance();
  rec.delta_hat = radius(n, rec.s_sq, m_config.alpha);
  rec.delta_prime = rec.delta_hat + eta(m_config.epsilon, n);
  // search depth m(j) = j; candidate cutoff k_j = j
  m_C = bounded_least_index(*m_presentation, j, j, rec.mean, rec.delta_prime);
  rec.i_j = m_C;
  rec.C = m_C;
  m_trace.push_back(rec);
  m_j = j;
  m_next_decision = decision_time(m_config, j + 1);
}

}  // namespace coverlab
