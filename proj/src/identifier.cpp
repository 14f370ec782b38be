#include "coverlab/identifier.hpp"

#include <stdexcept>
#include <utility>

#include "coverlab/radius.hpp"

namespace coverlab {

namespace {

// Beyond this n, 2^{-n} is not worth (or not capable of) materializing;
// degenerate-prefix decisions switch to symbolic comparisons.
constexpr std::uint64_t kMaterializeLimit = 1u << 20;

Integer pow2_den(unsigned long exp) {
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, exp);
  return den;
}

void accumulate_dyadic(Integer& acc, unsigned long& acc_exp, const Integer& num,
                       unsigned long k) {
  if (k > acc_exp) {
    acc <<= static_cast<unsigned long>(k - acc_exp);
    acc_exp = k;
    acc += num;
  } else {
    acc += num << static_cast<unsigned long>(acc_exp - k);
  }
}

template <typename Pred>
std::uint64_t least_index_pred(const Rational& t, Pred&& pred, EnumerationCache& cache,
                               std::uint64_t depth_budget) {
  for (std::uint64_t i = 1; i <= depth_budget; ++i) {
    Rational d = abs_rational(cache.at(i) - t);
    if (pred(d)) return i;
  }
  throw std::runtime_error("least-index scan exceeded the diagnostic depth budget");
}

}  // namespace

void IdentifierConfig::validate() const {
  if (p <= 4) throw std::invalid_argument("schedule exponent p must be > 4");
  if (alpha <= 0) throw std::invalid_argument("alpha must be > 0");
  if (depth_budget == 0) throw std::invalid_argument("depth budget must be >= 1");
}

std::uint64_t decision_time(const IdentifierConfig& cfg, std::uint64_t j) {
  Integer v;
  mpz_ui_pow_ui(v.get_mpz_t(), static_cast<unsigned long>(j), cfg.p);
  if (!v.fits_ulong_p()) throw std::overflow_error("decision time exceeds 64 bits");
  return v.get_ui();
}

void RunningStats::add(const Rational& x) {
  ++m_n;
  unsigned long k = 0;
  if (is_dyadic(x, &k)) {
    const Integer& num = x.get_num();
    accumulate_dyadic(m_dsum, m_dsum_exp, num, k);
    Integer sq = num * num;
    accumulate_dyadic(m_dsq, m_dsq_exp, sq, 2 * k);
  } else {
    m_qsum += x;
    m_qsq += x * x;
  }
}

void RunningStats::add_repeat(const Rational& x, std::uint64_t count) {
  if (count == 0) return;
  m_n += count;
  Rational c(Integer(static_cast<unsigned long>(count)));
  Rational cx = c * x;
  m_qsum += cx;
  m_qsq += cx * x;
}

Rational RunningStats::sum() const {
  Rational dy(m_dsum, pow2_den(m_dsum_exp));
  dy.canonicalize();
  return dy + m_qsum;
}

Rational RunningStats::sum_sq() const {
  Rational dy(m_dsq, pow2_den(m_dsq_exp));
  dy.canonicalize();
  return dy + m_qsq;
}

Rational RunningStats::mean() const {
  if (m_n == 0) throw std::logic_error("mean of an empty prefix");
  return sum() / Rational(static_cast<unsigned long>(m_n));
}

Rational RunningStats::variance() const {
  if (m_n == 0) throw std::logic_error("variance of an empty prefix");
  Rational m = mean();
  return sum_sq() / Rational(static_cast<unsigned long>(m_n)) - m * m;
}

std::uint64_t least_index(const Rational& t, const Rational& delta, EnumerationCache& cache,
                          std::uint64_t depth_budget) {
  if (delta <= 0) throw std::invalid_argument("delta must be > 0");
  return least_index_pred(
      t, [&delta](const Rational& d) { return d < delta; }, cache, depth_budget);
}

bool below_degenerate_threshold(const Rational& d, std::uint64_t n, EpsilonKind kind) {
  if (d < 0) throw std::invalid_argument("distance must be >= 0");
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (n <= kMaterializeLimit)
    return d < pow2(-static_cast<long>(n)) + eta(kind, n);

  Rational inv_n(Integer(1), Integer(static_cast<unsigned long>(n)));
  inv_n.canonicalize();

  if (kind == EpsilonKind::Pow2) {
    // threshold = 1/n + 2^{-n} (n-1)/n, so d <= 1/n decides "below"; for
    // d > 1/n the excess is at least 1/(n*den(d)), which dwarfs 2^{-n}
    // unless den(d) itself has ~n bits.
    if (d <= inv_n) return true;
    std::size_t den_bits = mpz_sizeinbase(d.get_den().get_mpz_t(), 2);
    if (den_bits + 66 < n) return false;
    if (n <= (1u << 26))
      return d < pow2(-static_cast<long>(n)) + eta(kind, n);
    throw std::overflow_error("degenerate threshold comparison out of range");
  }

  // i^{-2} schedule: enclose H2(n) by H2(m) plus telescoping tail bounds
  //   1/(m+1) - 1/(n+1) < sum_{m<i<=n} i^{-2} < 1/m - 1/n
  // and refine m until the comparison resolves.
  std::uint64_t m = 4096;
  if (m >= n) m = n - 1;
  while (true) {
    Rational h2 = inv_square_sum(m);
    Rational inv_m(Integer(1), Integer(static_cast<unsigned long>(m)));
    inv_m.canonicalize();
    Rational inv_m1(Integer(1), Integer(static_cast<unsigned long>(m + 1)));
    inv_m1.canonicalize();
    Rational inv_n1(Integer(1), Integer(static_cast<unsigned long>(n)) + 1);
    inv_n1.canonicalize();
    Rational lo = (h2 + inv_m1 - inv_n1) * inv_n;
    Rational hi = (h2 + inv_m - inv_n) * inv_n + pow2(-64);
    if (d <= lo) return true;
    if (d >= hi) return false;
    if (m >= (1u << 22) || m >= n - 1)
      throw std::overflow_error("degenerate threshold comparison undecided");
    m = (m * 2 < n - 1) ? m * 2 : n - 1;
  }
}

IdentifierState::IdentifierState(IdentifierConfig cfg, std::shared_ptr<EnumerationCache> cache)
    : m_config(std::move(cfg)), m_cache(std::move(cache)) {
  m_config.validate();
  if (!m_cache) throw std::invalid_argument("missing enumeration cache");
  m_next_decision = decision_time(m_config, 1);
}

void IdentifierState::step(const Rational& readout) {
  m_stats.add(readout);
  if (m_stats.count() == m_next_decision) decide();
}

void IdentifierState::advance_constant(const Rational& q, std::uint64_t count) {
  while (count > 0) {
    std::uint64_t gap = m_next_decision - m_stats.count();
    if (gap > count) {
      m_stats.add_repeat(q, count);
      return;
    }
    m_stats.add_repeat(q, gap);
    count -= gap;
    decide();
  }
}

void IdentifierState::decide() {
  const std::uint64_t n = m_stats.count();
  const std::uint64_t j = m_j + 1;
  DecisionRecord rec;
  rec.j = j;
  rec.n = n;
  rec.mean = m_stats.mean();
  rec.s_sq = m_stats.variance();

  std::uint64_t i = 0;
  if (n <= kMaterializeLimit) {
    rec.delta_hat = radius(n, rec.s_sq, m_config.alpha);
    rec.delta_prime = rec.delta_hat + eta(m_config.epsilon, n);
    i = least_index(rec.mean, rec.delta_prime, *m_cache, m_config.depth_budget);
  } else {
    if (rec.s_sq != 0)
      throw std::logic_error(
          "decision time beyond the materializable range with a non-degenerate prefix");
    rec.materialized = false;
    const EpsilonKind kind = m_config.epsilon;
    i = least_index_pred(
        rec.mean,
        [n, kind](const Rational& dist) { return below_degenerate_threshold(dist, n, kind); },
        *m_cache, m_config.depth_budget);
  }
  rec.i_j = i;
  m_C = (i <= j) ? i : 0;
  rec.C = m_C;
  m_trace.push_back(rec);
  m_j = j;
  m_next_decision = decision_time(m_config, j + 1);
}

}  // namespace coverlab
