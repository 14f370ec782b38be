#include "doctest.h"

#include <stdexcept>

#include "coverlab/streams.hpp"
#include "coverlab/cauchy.hpp"
#include "oracles.hpp"

using namespace coverlab;

TEST_CASE("splitmix64 reference words") {
  // independently computed from the documented recurrence
  CHECK(splitmix64_word(0, 0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64_word(0, 1) == 0x6e789e6aa1b965f4ULL);
  CHECK(splitmix64_word(0, 2) == 0x06c45d188009454fULL);
  CHECK(splitmix64_word(42, 0) == 0xbdd732262feb6e95ULL);
  CHECK(splitmix64_word(42, 1) == 0x28efe333b266f103ULL);
  CHECK(splitmix64_word(42, 2) == 0x47526757130f9f52ULL);
}

TEST_CASE("epsilon schedules") {
  CHECK(epsilon_term(EpsilonKind::Pow2, 1) == Rational(1, 2));
  CHECK(epsilon_term(EpsilonKind::Pow2, 10) == Rational(1, 1024));
  CHECK(epsilon_term(EpsilonKind::InvSquare, 1) == Rational(1));
  CHECK(epsilon_term(EpsilonKind::InvSquare, 7) == Rational(1, 49));
  CHECK_THROWS_AS(epsilon_term(EpsilonKind::Pow2, 0), std::invalid_argument);
}

TEST_CASE("eta exact values and oracle agreement") {
  CHECK(eta(1) == Rational(1, 2));
  CHECK(eta(3) == Rational(7, 24));
  CHECK(eta(10) == Rational(1023, 10240));
  CHECK(eta(EpsilonKind::InvSquare, 1) == Rational(1));
  CHECK(eta(EpsilonKind::InvSquare, 2) == Rational(5, 8));
  CHECK(eta(EpsilonKind::InvSquare, 3) == Rational(49, 108));
  for (std::uint64_t n : {1u, 2u, 5u, 17u, 64u, 200u}) {
    CHECK(eta(EpsilonKind::Pow2, n) == oracles::eta_pow2(n));
    CHECK(eta(EpsilonKind::InvSquare, n) == oracles::eta_inv_square(n));
  }
}

TEST_CASE("eta is bounded by 1/n") {
  for (std::uint64_t n = 1; n <= 300; ++n) {
    Rational bound(1, static_cast<unsigned long>(n));
    CHECK(eta(EpsilonKind::Pow2, n) <= bound);
    CHECK(eta(EpsilonKind::InvSquare, n) <= 2 * bound);  // H2(n) <= 2 - 1/n
  }
}

TEST_CASE("inv_square_sum matches the literal loop") {
  for (std::uint64_t n : {1u, 3u, 10u, 128u}) {
    Rational lit(0);
    for (std::uint64_t i = 1; i <= n; ++i) lit += Rational(1, static_cast<unsigned long>(i * i));
    CHECK(inv_square_sum(n) == lit);
  }
}

TEST_CASE("exact Bernoulli draws") {
  SUBCASE("degenerate probabilities") {
    BitSource bits(7);
    for (int i = 0; i < 50; ++i) CHECK_FALSE(bits.bernoulli(Rational(0)));
    for (int i = 0; i < 50; ++i) CHECK(bits.bernoulli(Rational(1)));
    CHECK(bits.words_consumed() == 0);  // 0 and 1 decide without sampling
  }
  SUBCASE("p=1/2 consumes one word per draw and tracks the word's top bit") {
    BitSource bits(42);
    for (std::uint64_t t = 0; t < 200; ++t) {
      bool hit = bits.bernoulli(Rational(1, 2));
      CHECK(hit == (splitmix64_word(42, t) < (1ULL << 63)));
    }
    CHECK(bits.words_consumed() == 200);
  }
  SUBCASE("frequency sanity for p=1/3") {
    BitSource bits(11);
    int hits = 0;
    const int kDraws = 3000;
    for (int i = 0; i < kDraws; ++i) hits += bits.bernoulli(Rational(1, 3)) ? 1 : 0;
    CHECK(hits > kDraws / 3 - 150);
    CHECK(hits < kDraws / 3 + 150);
  }
  SUBCASE("out-of-range probability throws") {
    BitSource bits(1);
    CHECK_THROWS_AS(bits.bernoulli(Rational(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(bits.bernoulli(Rational(-1, 2)), std::invalid_argument);
  }
}

TEST_CASE("distribution moments") {
  auto tp = DistributionSpec::two_point(Rational(0), Rational(1), Rational(1, 2));
  CHECK(tp.mean_rational() == Rational(1, 2));
  CHECK(tp.variance() == Rational(1, 4));
  CHECK_FALSE(tp.degenerate());
  CHECK(tp.mean_label() == "1/2");
  CHECK(tp.kind_name() == "two_point");

  auto skew = DistributionSpec::two_point(Rational(-1), Rational(3), Rational(3, 4));
  CHECK(skew.mean_rational() == Rational(0));
  CHECK(skew.variance() == Rational(3));

  auto c = DistributionSpec::constant(Rational(5, 8));
  CHECK(c.degenerate());
  CHECK(c.variance() == Rational(0));
  CHECK(c.mean_rational() == Rational(5, 8));

  auto sb = DistributionSpec::shifted_bernoulli(Rational(1, 2), Rational(1, 4));
  CHECK(sb.mean_rational() == Rational(1, 2));
  CHECK(sb.variance() == Rational(1, 16));

  auto itp = DistributionSpec::irrational_two_point(make_sqrt_presentation(2), Rational(1));
  CHECK_FALSE(itp.rational_support());
  CHECK(itp.variance() == Rational(1));
  CHECK(itp.mean_label() == "sqrt2");
  CHECK_THROWS_AS(itp.mean_rational(), std::logic_error);

  CHECK_THROWS_AS(DistributionSpec::two_point(Rational(0), Rational(1), Rational(2)),
                  std::invalid_argument);
}

TEST_CASE("streams are reproducible and exact on rational support") {
  auto spec = DistributionSpec::two_point(Rational(0), Rational(1), Rational(1, 2));
  ReadoutStream s1(spec, 42), s2(spec, 42);
  for (int i = 0; i < 100; ++i) CHECK(s1.next_readout() == s2.next_readout());
  CHECK(s1.last_rounding_error_bound() == Rational(0));

  // pinned first readouts for seed 42: value a=0 on Bernoulli hit, else b=1
  ReadoutStream s3(spec, 42);
  const int expect[12] = {1, 0, 0, 0, 0, 1, 0, 1, 0, 1, 0, 0};
  for (int i = 0; i < 12; ++i) CHECK(s3.next_readout() == Rational(expect[i]));

  ReadoutStream c = constant_stream(Rational(2, 3));
  for (int i = 0; i < 5; ++i) CHECK(c.next_readout() == Rational(2, 3));
}

TEST_CASE("different seeds give different prefixes") {
  auto spec = DistributionSpec::two_point(Rational(0), Rational(1), Rational(1, 2));
  ReadoutStream s1(spec, 1), s2(spec, 2);
  bool differ = false;
  for (int i = 0; i < 64 && !differ; ++i) differ = (s1.next_readout() != s2.next_readout());
  CHECK(differ);
}

TEST_CASE("irrational readouts stay within the declared rounding error") {
  auto spec = DistributionSpec::irrational_two_point(make_sqrt_presentation(2), Rational(1));
  ReadoutStream s(spec, 9);
  Rational slo, shi;
  oracles::sqrt_enclosure(2, 1, 128, slo, shi);
  for (std::uint64_t i = 1; i <= 40; ++i) {
    Rational r = s.next_readout();
    Rational bound = s.last_rounding_error_bound();
    CHECK(bound <= epsilon_term(EpsilonKind::Pow2, i));
    // r = mid +- 1 with |mid - sqrt2| <= bound: one of the two branches must
    // put sqrt2 inside [r -+ 1 - bound, r -+ 1 + bound]
    bool plus_ok = (r - 1 - bound <= shi) && (slo <= r - 1 + bound);
    bool minus_ok = (r + 1 - bound <= shi) && (slo <= r + 1 + bound);
    CHECK((plus_ok || minus_ok));
  }
}

TEST_CASE("irrational readouts under the inv-square schedule") {
  auto spec = DistributionSpec::irrational_two_point(make_e_presentation(), Rational(1, 2));
  ReadoutStream s(spec, 3, EpsilonKind::InvSquare);
  for (std::uint64_t i = 1; i <= 20; ++i) {
    s.next_readout();
    CHECK(s.last_rounding_error_bound() <= epsilon_term(EpsilonKind::InvSquare, i));
  }
}
