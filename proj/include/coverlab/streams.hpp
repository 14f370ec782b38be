#ifndef COVERLAB_STREAMS_HPP
#define COVERLAB_STREAMS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "coverlab/cauchy.hpp"
#include "coverlab/rational.hpp"

namespace coverlab {

// Per-sample readout error schedule: eps_i = 2^{-i} (default) or i^{-2}.
enum class EpsilonKind { Pow2, InvSquare };

Rational epsilon_term(EpsilonKind kind, std::uint64_t i);

// eta_n = (1/n) * sum_{i<=n} eps_i, exact. Closed form (1 - 2^{-n})/n for the
// dyadic schedule; pairwise-summed exact partial sums for i^{-2}. n is capped
// (per kind) where the exact value stops being materializable; the identifier
// handles larger n by symbolic comparison instead of calling this.
Rational eta(EpsilonKind kind, std::uint64_t n);
Rational eta(std::uint64_t n);  // dyadic schedule

// Exact H2(n) = sum_{i<=n} i^{-2}, pairwise-summed. Also the building block
// for symbolic threshold comparisons past the materializable range.
Rational inv_square_sum(std::uint64_t n);

// i.i.d. sample distributions with exactly known mean and variance.
//   constant(q)                   point mass at q (the one degenerate kind)
//   two_point(a, b, p)            a with probability p, else b
//   shifted_bernoulli(q, d)       q + d or q - d, equiprobable
//   irrational_two_point(mu, d)   mu + d or mu - d, equiprobable; mu given by
//                                 a Cauchy presentation (member 1)
struct DistributionSpec {
  enum class Kind { Constant, TwoPoint, ShiftedBernoulli, IrrationalTwoPoint };

  Kind kind = Kind::Constant;
  Rational a, b, p;    // TwoPoint
  Rational q;          // Constant, ShiftedBernoulli center
  Rational offset;     // ShiftedBernoulli / IrrationalTwoPoint half-gap
  std::shared_ptr<const CauchyPresentation> mu;  // IrrationalTwoPoint mean

  static DistributionSpec constant(Rational q);
  static DistributionSpec two_point(Rational a, Rational b, Rational p);
  static DistributionSpec shifted_bernoulli(Rational q, Rational offset);
  static DistributionSpec irrational_two_point(std::shared_ptr<const CauchyPresentation> mu,
                                               Rational offset);

  bool rational_support() const { return kind != Kind::IrrationalTwoPoint; }
  bool degenerate() const;            // variance == 0
  Rational mean_rational() const;     // throws for the irrational kind
  Rational variance() const;          // exact for every kind
  std::string mean_label() const;     // exact fraction, or the presentation name
  std::string kind_name() const;
};

// The stream's generator, fixed as an external interface so fixtures are
// portable: 64-bit SplitMix64. word(t) for t = 0, 1, ... is
//   z = seed + (t+1) * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   word = z ^ (z >> 31)
// all in wrapping 64-bit arithmetic.
std::uint64_t splitmix64_word(std::uint64_t seed, std::uint64_t t);

// Draws an exact Bernoulli(p) bit, p rational in [0, 1], by comparing a
// uniform bit stream (64-bit generator words) against the binary expansion of
// p, consuming words only while they tie. Never approximates p.
class BitSource {
 public:
  explicit BitSource(std::uint64_t seed) : m_seed(seed) {}
  std::uint64_t next_word() { return splitmix64_word(m_seed, m_counter++); }
  bool bernoulli(const Rational& p);
  std::uint64_t words_consumed() const { return m_counter; }

 private:
  std::uint64_t m_seed;
  std::uint64_t m_counter = 0;
};

// Finite-precision readout sequence: emits rationals X~_i with
// |X~_i - X_i| <= eps_i against the conceptual true sample X_i. Rational
// support kinds are emitted exactly (error 0); the irrational kind rounds its
// mean through the Cauchy presentation at depth m with 2^{-m-1} <= eps_i
// before adding the +-offset noise. Same (spec, seed) => identical sequence.
class ReadoutStream {
 public:
  ReadoutStream(DistributionSpec spec, std::uint64_t seed,
                EpsilonKind epsilon = EpsilonKind::Pow2);

  Rational next_readout();
  std::uint64_t position() const { return m_position; }
  const DistributionSpec& spec() const { return m_spec; }
  std::uint64_t seed() const { return m_seed; }
  EpsilonKind epsilon_kind() const { return m_epsilon; }

  // Exact mean-readout error bound sum_{i<=position} |X~_i - X_i| / n is not
  // tracked per stream; eta() bounds it a priori. The irrational kind exposes
  // its last rounding error bound for tests.
  const Rational& last_rounding_error_bound() const { return m_last_round_err; }

 private:
  DistributionSpec m_spec;
  std::uint64_t m_seed;
  EpsilonKind m_epsilon;
  BitSource m_bits;
  std::uint64_t m_position = 0;
  Rational m_half;  // 1/2, reused
  Rational m_last_round_err;
};

// Degenerate stream q, q, ...; seed-independent.
ReadoutStream constant_stream(const Rational& q);

}  // namespace coverlab

#endif  // COVERLAB_STREAMS_HPP
