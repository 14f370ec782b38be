#include "coverlab/streams.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace coverlab {

Rational epsilon_term(EpsilonKind kind, std::uint64_t i) {
  if (i == 0) throw std::invalid_argument("readout index must be >= 1");
  if (kind == EpsilonKind::Pow2) {
    if (i > (1u << 26)) throw std::overflow_error("epsilon term not materializable");
    return pow2(-static_cast<long>(i));
  }
  Integer ii(static_cast<unsigned long>(i));
  Rational r(Integer(1), ii * ii);
  r.canonicalize();
  return r;
}

namespace {

// Exact sum_{i=1..n} 1/i^2 by pairwise merging: keeps intermediate
// denominators balanced instead of ruinously sequential.
Rational inv_square_partial_sum(std::uint64_t lo, std::uint64_t hi) {
  if (lo == hi) {
    Integer ii(static_cast<unsigned long>(lo));
    Rational r(Integer(1), ii * ii);
    r.canonicalize();
    return r;
  }
  std::uint64_t mid = lo + (hi - lo) / 2;
  return inv_square_partial_sum(lo, mid) + inv_square_partial_sum(mid + 1, hi);
}

}  // namespace

Rational eta(EpsilonKind kind, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("eta needs n >= 1");
  if (kind == EpsilonKind::Pow2) {
    if (n > (1u << 26)) throw std::overflow_error("eta not materializable at this n");
    // (1 - 2^{-n}) / n
    Rational r = (Rational(1) - pow2(-static_cast<long>(n))) / Rational(static_cast<unsigned long>(n));
    r.canonicalize();
    return r;
  }
  if (n > (1u << 22)) throw std::overflow_error("eta not materializable at this n");
  Rational r = inv_square_partial_sum(1, n) / Rational(static_cast<unsigned long>(n));
  r.canonicalize();
  return r;
}

Rational eta(std::uint64_t n) { return eta(EpsilonKind::Pow2, n); }

Rational inv_square_sum(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("inv_square_sum needs n >= 1");
  if (n > (1u << 22)) throw std::overflow_error("inv_square_sum not materializable at this n");
  return inv_square_partial_sum(1, n);
}

DistributionSpec DistributionSpec::constant(Rational q) {
  DistributionSpec s;
  s.kind = Kind::Constant;
  s.q = std::move(q);
  return s;
}

DistributionSpec DistributionSpec::two_point(Rational a, Rational b, Rational p) {
  if (p < 0 || p > 1) throw std::invalid_argument("two_point probability must be in [0,1]");
  DistributionSpec s;
  s.kind = Kind::TwoPoint;
  s.a = std::move(a);
  s.b = std::move(b);
  s.p = std::move(p);
  return s;
}

DistributionSpec DistributionSpec::shifted_bernoulli(Rational q, Rational offset) {
  if (offset < 0) throw std::invalid_argument("offset must be >= 0");
  DistributionSpec s;
  s.kind = Kind::ShiftedBernoulli;
  s.q = std::move(q);
  s.offset = std::move(offset);
  return s;
}

DistributionSpec DistributionSpec::irrational_two_point(
    std::shared_ptr<const CauchyPresentation> mu, Rational offset) {
  if (!mu) throw std::invalid_argument("missing mean presentation");
  if (offset <= 0) throw std::invalid_argument("offset must be > 0");
  DistributionSpec s;
  s.kind = Kind::IrrationalTwoPoint;
  s.mu = std::move(mu);
  s.offset = std::move(offset);
  return s;
}

bool DistributionSpec::degenerate() const { return variance() == 0; }

Rational DistributionSpec::mean_rational() const {
  switch (kind) {
    case Kind::Constant:
      return q;
    case Kind::TwoPoint:
      return p * a + (Rational(1) - p) * b;
    case Kind::ShiftedBernoulli:
      return q;
    case Kind::IrrationalTwoPoint:
      throw std::logic_error("irrational mean has no exact rational value");
  }
  throw std::logic_error("bad kind");
}

Rational DistributionSpec::variance() const {
  switch (kind) {
    case Kind::Constant:
      return Rational(0);
    case Kind::TwoPoint: {
      Rational m = mean_rational();
      return p * a * a + (Rational(1) - p) * b * b - m * m;
    }
    case Kind::ShiftedBernoulli:
    case Kind::IrrationalTwoPoint:
      return offset * offset;
  }
  throw std::logic_error("bad kind");
}

std::string DistributionSpec::mean_label() const {
  if (kind == Kind::IrrationalTwoPoint) return mu->name();
  return to_fraction_string(mean_rational());
}

std::string DistributionSpec::kind_name() const {
  switch (kind) {
    case Kind::Constant:
      return "constant";
    case Kind::TwoPoint:
      return "two_point";
    case Kind::ShiftedBernoulli:
      return "shifted_bernoulli";
    case Kind::IrrationalTwoPoint:
      return "irrational_two_point";
  }
  return "?";
}

std::uint64_t splitmix64_word(std::uint64_t seed, std::uint64_t t) {
  std::uint64_t z = seed + (t + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool BitSource::bernoulli(const Rational& p) {
  if (p < 0 || p > 1) throw std::invalid_argument("probability must be in [0,1]");
  if (p == 0) return false;
  if (p == 1) return true;
  // Compare U = 0.w0 w1 w2 ... (base 2^64) against p digit by digit.
  Integer rem = p.get_num();
  const Integer& den = p.get_den();
  for (int block = 0; block < 64; ++block) {
    rem <<= 64;
    Integer digit;
    mpz_tdiv_qr(digit.get_mpz_t(), rem.get_mpz_t(), rem.get_mpz_t(), den.get_mpz_t());
    std::uint64_t w = next_word();
    int cmp;
    if (mpz_fits_ulong_p(digit.get_mpz_t())) {
      unsigned long d = mpz_get_ui(digit.get_mpz_t());
      cmp = (w < d) ? -1 : (w > d ? 1 : 0);
    } else {
      cmp = -1;  // digit >= 2^64 cannot happen (rem < den), defensive
    }
    if (cmp < 0) return true;   // U < p decided
    if (cmp > 0) return false;  // U > p decided
    if (rem == 0) return false; // remaining expansion of p is all zeros: U >= p
  }
  // 64 tying blocks (4096 bits) - astronomically unlikely; round down.
  return false;
}

ReadoutStream::ReadoutStream(DistributionSpec spec, std::uint64_t seed, EpsilonKind epsilon)
    : m_spec(std::move(spec)), m_seed(seed), m_epsilon(epsilon), m_bits(seed), m_half(1, 2),
      m_last_round_err(0) {}

Rational ReadoutStream::next_readout() {
  ++m_position;
  switch (m_spec.kind) {
    case DistributionSpec::Kind::Constant:
      return m_spec.q;
    case DistributionSpec::Kind::TwoPoint:
      return m_bits.bernoulli(m_spec.p) ? m_spec.a : m_spec.b;
    case DistributionSpec::Kind::ShiftedBernoulli:
      return m_bits.bernoulli(m_half) ? Rational(m_spec.q + m_spec.offset)
                                      : Rational(m_spec.q - m_spec.offset);
    case DistributionSpec::Kind::IrrationalTwoPoint: {
      // Round mu to within eps_i: midpoint of the presentation interval at
      // the least depth m with 2^{-m-1} <= eps_i, i.e. m = max(1, -floor(log2 eps) - 1).
      Rational eps = epsilon_term(m_epsilon, m_position);
      long f = floor_log2(eps);
      std::uint64_t m = (-f - 1 >= 1) ? static_cast<std::uint64_t>(-f - 1) : 1;
      Rational lo, hi;
      m_spec.mu->bounds(1, m, lo, hi);
      Rational mid = (lo + hi) / 2;
      m_last_round_err = (hi - lo) / 2;
      return m_bits.bernoulli(m_half) ? Rational(mid + m_spec.offset)
                                      : Rational(mid - m_spec.offset);
    }
  }
  throw std::logic_error("bad kind");
}

ReadoutStream constant_stream(const Rational& q) {
  return ReadoutStream(DistributionSpec::constant(q), 0);
}

}  // namespace coverlab
