#include "doctest.h"

#include <set>
#include <stdexcept>

#include "coverlab/enumeration.hpp"
#include "oracles.hpp"

using namespace coverlab;

TEST_CASE("fixed enumeration values") {
  CHECK(enumerate(1) == Rational(0));
  CHECK(enumerate(2) == Rational(1));
  CHECK(enumerate(3) == Rational(-1));
  CHECK(enumerate(4) == Rational(1, 2));
  CHECK(enumerate(7) == Rational(-2));
  CHECK(enumerate(9) == Rational(-1, 3));
  CHECK(enumerate(28) == Rational(3, 4));
  CHECK(enumerate(50) == Rational(7, 5));
  CHECK_THROWS_AS(enumerate(0), std::invalid_argument);
}

TEST_CASE("enumeration matches the recursive oracle") {
  for (std::uint64_t i = 1; i <= 4000; ++i) CHECK(enumerate(i) == oracles::enumerate(i));
}

TEST_CASE("enumeration has no repeats in a long prefix") {
  std::set<Rational> seen;
  for (std::uint64_t i = 1; i <= 4000; ++i) CHECK(seen.insert(enumerate(i)).second);
}

TEST_CASE("index_of inverts enumerate") {
  CHECK(index_of(Rational(1, 2)) == 4);
  CHECK(index_of(Rational(0)) == 1);
  CHECK(index_of(Rational(-2)) == 7);
  CHECK(index_of(Rational(7, 5)) == 50);
  for (std::uint64_t i = 1; i <= 2000; ++i) {
    Integer idx = index_of(enumerate(i));
    CHECK(idx == Integer(static_cast<unsigned long>(i)));
  }
}

TEST_CASE("index_of handles rationals far down the sequence without scanning") {
  // A continued-fraction-heavy value: three hundred quotient-1 steps put the
  // index near 2^300 (the index's bit length tracks the sum of the partial
  // quotients, so quotients must stay small for the index to stay storable).
  Integer a = 1, b = 1;
  for (int i = 0; i < 300; ++i) {
    Integer next = a + b;
    a = b;
    b = next;
  }
  Rational q{b, a};  // consecutive Fibonacci numbers are coprime
  Integer idx = index_of(q);
  CHECK(idx > 0);
  CHECK(mpz_sizeinbase(idx.get_mpz_t(), 2) >= 290);
  // even index <=> positive value under the interleaving
  CHECK(mpz_even_p(idx.get_mpz_t()));
  CHECK(enumerate(idx) == q);
}

TEST_CASE("enumeration cache grows on demand and stays consistent") {
  EnumerationCache cache;
  CHECK(cache.at(50) == Rational(7, 5));
  CHECK(cache.at(4) == Rational(1, 2));
  CHECK(cache.at(2000) == oracles::enumerate(2000));
  for (std::uint64_t i = 1; i <= 200; ++i) CHECK(cache.at(i) == enumerate(i));
}

TEST_CASE("density: small deltas are eventually hit") {
  // every target is within delta of some enumerated value; the oracle scan
  // terminates well inside the prefix for these cases
  for (const char* target : {"1/3", "-22/7", "5/8", "0"}) {
    Rational t = parse_rational(target);
    CHECK(oracles::least_index(t, Rational(1, 64), 1 << 14) != 0);
  }
}
