#include "doctest.h"

#include <stdexcept>

#include "coverlab/limit_approx.hpp"

using namespace coverlab;

TEST_CASE("decidable approximator is stage-independent") {
  auto even = make_decidable_approximator("even", [](std::uint64_t i) { return i % 2 == 0; });
  CHECK(even->approximate(4, 0) == 1);
  CHECK(even->approximate(4, 1000000) == 1);
  CHECK(even->approximate(7, 0) == 0);
  CHECK(even->approximate(7, 1000000) == 0);
  CHECK(even->change_stages(4, 100000).empty());
  CHECK(!stabilization_stage(*even, 4, 100000).has_value());
}

TEST_CASE("constant approximators") {
  auto zero = make_constant_approximator(0);
  auto one = make_constant_approximator(1);
  CHECK(zero->approximate(123, 456) == 0);
  CHECK(one->approximate(123, 456) == 1);
  CHECK(zero->change_stages(1, 1000).empty());
  CHECK(one->change_stages(1, 1000).empty());
}

TEST_CASE("flip-once approximator pins the transition stage") {
  auto a = make_flip_once_approximator({{3, 10}, {8, 1}});
  CHECK(a->approximate(3, 9) == 0);
  CHECK(a->approximate(3, 10) == 1);
  CHECK(a->approximate(3, 0) == 0);
  CHECK(a->approximate(3, 1u << 30) == 1);
  CHECK(a->approximate(8, 0) == 0);
  CHECK(a->approximate(8, 1) == 1);
  CHECK(a->approximate(5, 1u << 30) == 0);  // unlisted rows are constant 0
  CHECK(a->change_stages(3, 100) == std::vector<std::uint64_t>{10});
  CHECK(a->change_stages(3, 9).empty());
  CHECK(a->change_stages(5, 100).empty());
  CHECK(stabilization_stage(*a, 3, 100) == 10);
  CHECK_THROWS_AS(make_flip_once_approximator({{2, 0}}), std::invalid_argument);
}

TEST_CASE("halting approximator follows the catalog") {
  auto catalog = load_catalog(COVERLAB_CATALOG_PATH);
  HaltingApproximator a(catalog);
  SUBCASE("halting rows flip exactly at the halt step") {
    CHECK(a.approximate(5, 56) == 0);
    CHECK(a.approximate(5, 57) == 1);
    CHECK(a.approximate(2, 0) == 0);
    CHECK(a.approximate(2, 1) == 1);
    CHECK(a.approximate(6, 2) == 0);
    CHECK(a.approximate(6, 3) == 1);
    CHECK(a.approximate(9, 970) == 0);
    CHECK(a.approximate(9, 971) == 1);
    CHECK(a.change_stages(5, 100000) == std::vector<std::uint64_t>{57});
    CHECK(a.change_stages(9, 100) == std::vector<std::uint64_t>{});
    CHECK(stabilization_stage(a, 9, 5000) == 971);
  }
  SUBCASE("looping and absent rows are constantly 0") {
    for (std::uint64_t i : {3u, 4u, 7u, 8u, 1u, 10u, 1000u}) {
      CHECK(a.approximate(i, 0) == 0);
      CHECK(a.approximate(i, 1u << 20) == 0);
      CHECK(a.change_stages(i, 100000).empty());
    }
  }
  SUBCASE("every row has a limit reached within the catalog horizon") {
    for (std::uint64_t i = 1; i <= 12; ++i) {
      auto flips = a.change_stages(i, 1u << 20);
      CHECK(flips.size() <= 1);  // halting is one-way
    }
  }
}

TEST_CASE("halting approximator rejects a cap below a declared halt step") {
  auto catalog = load_catalog(COVERLAB_CATALOG_PATH);
  CHECK_THROWS_AS(HaltingApproximator(catalog, 100), std::invalid_argument);
  CHECK_NOTHROW(HaltingApproximator(catalog, 971));
}

TEST_CASE("default change_stages scan agrees with the structured override") {
  auto a = make_flip_once_approximator({{2, 7}});
  // wrap it so the base-class linear scan runs
  struct Wrap : LimitApproximator {
    const LimitApproximator* inner;
    std::string n = "wrap";
    int approximate(std::uint64_t i, std::uint64_t s) const override {
      return inner->approximate(i, s);
    }
    const std::string& name() const override { return n; }
  } w;
  w.inner = a.get();
  CHECK(w.change_stages(2, 50) == a->change_stages(2, 50));
  CHECK(w.change_stages(1, 50) == a->change_stages(1, 50));
  CHECK(w.change_stages(2, 6) == a->change_stages(2, 6));
}
