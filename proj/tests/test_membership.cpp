#include "doctest.h"

#include <memory>
#include <stdexcept>
#include <string>

#include "coverlab/membership.hpp"
#include "coverlab/cauchy.hpp"

using namespace coverlab;

namespace {

std::shared_ptr<EnumerationCache> cache() {
  static auto c = std::make_shared<EnumerationCache>();
  return c;
}

std::shared_ptr<const LimitApproximator> even_set() {
  static std::shared_ptr<const LimitApproximator> a =
      make_decidable_approximator("even-indices", [](std::uint64_t i) { return i % 2 == 0; });
  return a;
}

// Scripted verdict source for exercising run_trial's bookkeeping in isolation.
class ScriptedTest : public SequentialTest {
 public:
  explicit ScriptedTest(std::vector<int> verdicts) : m_verdicts(std::move(verdicts)) {}
  int update(const Rational&) override {
    int v = m_verdicts.at(m_pos);
    if (m_pos + 1 < m_verdicts.size()) ++m_pos;
    return v;
  }
  const std::string& name() const override { return m_name; }

 private:
  std::vector<int> m_verdicts;
  std::size_t m_pos = 0;
  std::string m_name = "scripted";
};

}  // namespace

TEST_CASE("trial csv round trip") {
  TrialRecord r;
  r.trial_id = 7;
  r.seed = 42;
  r.mu = "1/2";
  r.set_name = "even-indices";
  r.truth = 1;
  r.horizon = 100000;
  r.mistakes = 12;
  r.last_change = 4096;
  r.final_verdict = 1;
  r.stabilized_correct = true;
  TrialRecord back = parse_trial_csv_row(trial_csv_row(r));
  CHECK(back.trial_id == r.trial_id);
  CHECK(back.seed == r.seed);
  CHECK(back.mu == r.mu);
  CHECK(back.set_name == r.set_name);
  CHECK(back.truth == r.truth);
  CHECK(back.horizon == r.horizon);
  CHECK(back.mistakes == r.mistakes);
  CHECK(back.last_change == r.last_change);
  CHECK(back.final_verdict == r.final_verdict);
  CHECK(back.stabilized_correct == r.stabilized_correct);
}

TEST_CASE("trial csv escapes separators in labels") {
  TrialRecord r;
  r.mu = "two_point(0,1;p=1/2)";
  r.set_name = "a,b";
  std::string row = trial_csv_row(r);
  TrialRecord back = parse_trial_csv_row(row);
  CHECK(back.set_name.find(',') == std::string::npos);  // sanitized, not corrupted
  CHECK(parse_trial_csv_row(trial_csv_row(back)).mu == back.mu);
}

TEST_CASE("malformed trial csv rows throw") {
  CHECK_THROWS_AS(parse_trial_csv_row(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_trial_csv_row("1,2,3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trial_csv_row("a,b,c,d,e,f,g,h,i,j"), std::invalid_argument);
}

TEST_CASE("run_trial scores a scripted verdict sequence") {
  // verdicts: 0 0 1 1 0 1 1 1 1 1 ; truth = 1
  ScriptedTest t({0, 0, 1, 1, 0, 1, 1, 1, 1, 1});
  auto stream = constant_stream(Rational(0));
  TrialRecord r = run_trial(t, stream, 10, 1);
  CHECK(r.horizon == 10);
  CHECK(r.truth == 1);
  CHECK(r.final_verdict == 1);
  CHECK(r.stabilized_correct);
  CHECK(r.mistakes == 3);     // n = 1, 2, 5
  CHECK(r.last_change == 6);  // 0 -> 1 at n = 6 was the last flip
}

TEST_CASE("run_trial with constant verdict reports no change") {
  ScriptedTest t({0, 0, 0, 0, 0});
  auto stream = constant_stream(Rational(0));
  TrialRecord r = run_trial(t, stream, 5, 1);
  CHECK(r.last_change == 0);
  CHECK(r.mistakes == 5);
  CHECK(r.final_verdict == 0);
  CHECK(!r.stabilized_correct);
}

TEST_CASE("composed test on a constant rational settles to its membership bit") {
  IdentifierConfig cfg;
  // q = 1/2 is enumeration index 4, an even index -> truth 1
  auto test = compose(cfg, cache(), even_set());
  auto stream = constant_stream(Rational(1, 2));
  TrialRecord r = run_trial(*test, stream, 5000, 1);
  CHECK(r.final_verdict == 1);
  CHECK(r.stabilized_correct);
  CHECK(r.last_change == 4096);  // identifier locks onto index 4 at n = 4^6
  REQUIRE(test->decision_trace() != nullptr);
  CHECK(test->decision_trace()->size() == 4);
}

TEST_CASE("fast constant trial equals the stepwise trial") {
  IdentifierConfig cfg;
  for (const char* s : {"1/2", "-1/3", "0", "2/3"}) {
    Rational q = parse_rational(s);
    int truth = static_cast<int>(index_of(q).get_ui() % 2 == 0);
    auto test = compose(cfg, cache(), even_set());
    auto stream = constant_stream(q);
    TrialRecord slow = run_trial(*test, stream, 20000, truth);
    TrialRecord fast =
        run_constant_composed_trial(cfg, cache(), even_set(), q, 20000, truth);
    CHECK(fast.mistakes == slow.mistakes);
    CHECK(fast.last_change == slow.last_change);
    CHECK(fast.final_verdict == slow.final_verdict);
    CHECK(fast.stabilized_correct == slow.stabilized_correct);
    CHECK(fast.horizon == slow.horizon);
  }
  // odd-indices flips the verdict at n=1 for q = 0 (index 1): the fast path
  // must score that first verdict identically
  std::shared_ptr<const LimitApproximator> odd =
      make_decidable_approximator("odd-indices", [](std::uint64_t i) { return i % 2 == 1; });
  auto test = compose(cfg, cache(), odd);
  auto stream = constant_stream(Rational(0));
  TrialRecord slow = run_trial(*test, stream, 5000, 1);
  TrialRecord fast = run_constant_composed_trial(cfg, cache(), odd, Rational(0), 5000, 1);
  CHECK(slow.final_verdict == 1);
  CHECK(slow.mistakes == 0);
  CHECK(slow.last_change == 0);
  CHECK(fast.mistakes == slow.mistakes);
  CHECK(fast.last_change == slow.last_change);
  CHECK(fast.final_verdict == slow.final_verdict);
}

TEST_CASE("fast constant trial reaches horizons the stepwise path cannot") {
  IdentifierConfig cfg;
  // 10^12 steps in O(decisions): q = 1/2 -> index 4 -> verdict 1 from n=4096 on
  TrialRecord r = run_constant_composed_trial(cfg, cache(), even_set(), Rational(1, 2),
                                              1000000000000ULL, 1);
  CHECK(r.final_verdict == 1);
  CHECK(r.stabilized_correct);
  CHECK(r.last_change == 4096);
  CHECK(r.mistakes < 4096);
}

TEST_CASE("constant identifier run reports decisions and the last output change") {
  IdentifierConfig cfg;
  ConstantIdentifierRun run = run_constant_identifier(cfg, cache(), Rational(1, 2), 5000);
  CHECK(run.final_output == 4);
  CHECK(run.last_output_change == 4096);
  REQUIRE(run.decisions.size() == 4);
  CHECK(run.decisions[0].C == 1);
  CHECK(run.decisions[1].C == 0);
  CHECK(run.decisions[3].C == 4);
  // identity: the run must agree with a literal IdentifierState replay
  IdentifierState id(cfg, cache());
  for (int i = 0; i < 5000; ++i) id.step(Rational(1, 2));
  CHECK(id.output() == run.final_output);
  CHECK(id.trace().size() == run.decisions.size());
}

TEST_CASE("induced approximator rows are the composed test's constant-stream verdicts") {
  IdentifierConfig cfg;
  auto fast = induced_approximator_fast(cfg, cache(), even_set(), "induced-even");
  CHECK(fast->name() == "induced-even");
  // row i, stage n = verdict after n copies of q_i; spot-check against the
  // fast constant trial's final verdict at that horizon
  for (std::uint64_t i : {1u, 2u, 3u, 4u, 7u}) {
    Rational qi = enumerate(Integer(static_cast<unsigned long>(i)));
    for (std::uint64_t n : {1u, 100u, 5000u, 50000u}) {
      TrialRecord r = run_constant_composed_trial(cfg, cache(), even_set(), qi, n, 0);
      CHECK(fast->approximate(i, n) == r.final_verdict);
    }
  }
}

TEST_CASE("generic and fast induced approximators agree") {
  IdentifierConfig cfg;
  auto c = cache();
  auto a = even_set();
  TestFactory factory = [cfg, c, a]() { return compose(cfg, c, a); };
  auto generic = induced_approximator(factory, c, "generic");
  auto fast = induced_approximator_fast(cfg, c, a, "fast");
  for (std::uint64_t i = 1; i <= 6; ++i) {
    auto gc = generic->change_stages(i, 3000);
    auto fc = fast->change_stages(i, 3000);
    CHECK(gc == fc);
    for (std::uint64_t n : {1u, 2u, 63u, 64u, 65u, 728u, 729u, 730u, 3000u})
      CHECK(generic->approximate(i, n) == fast->approximate(i, n));
  }
}

TEST_CASE("induced approximator stabilizes to membership of the indexed rational") {
  IdentifierConfig cfg;
  auto fast = induced_approximator_fast(cfg, cache(), even_set(), "induced");
  for (std::uint64_t i = 1; i <= 10; ++i) {
    int want = static_cast<int>(i % 2 == 0);
    auto st = stabilization_stage(*fast, i, 3000000);
    std::uint64_t settled = st.value_or(1);
    CHECK(fast->approximate(i, settled) == want);
    CHECK(fast->approximate(i, 3000000) == want);
  }
}

TEST_CASE("general composed test over a finite list identifies a member") {
  IdentifierConfig cfg;
  auto family = make_list_presentation(
      "halves", {make_rational_presentation(Rational(1, 2)),
                 make_rational_presentation(Rational(3, 2)),
                 make_rational_presentation(Rational(5, 2))});
  auto odd = make_decidable_approximator("odd-indices", [](std::uint64_t i) { return i % 2 == 1; });
  auto test = compose_general(cfg, family, std::move(odd));
  auto stream = constant_stream(Rational(3, 2));
  TrialRecord r = run_trial(*test, stream, 5000, 0);
  // 3/2 is member 2, an even index of the family -> odd-indices verdict 0
  CHECK(r.final_verdict == 0);
  CHECK(r.stabilized_correct);
  REQUIRE(test->decision_trace() != nullptr);
  CHECK(!test->decision_trace()->empty());
  // and member 1 gives verdict 1
  auto test2 = compose_general(
      cfg, family,
      make_decidable_approximator("odd-indices", [](std::uint64_t i) { return i % 2 == 1; }));
  auto stream2 = constant_stream(Rational(1, 2));
  TrialRecord r2 = run_trial(*test2, stream2, 5000, 1);
  CHECK(r2.final_verdict == 1);
  CHECK(r2.stabilized_correct);
}
