#include "coverlab/membership.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace coverlab {

namespace {

std::string sanitize_field(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

class ComposedTest final : public SequentialTest {
 public:
  ComposedTest(IdentifierConfig cfg, std::shared_ptr<EnumerationCache> cache,
               std::shared_ptr<const LimitApproximator> a)
      : m_id(cfg, std::move(cache)),
        m_a(std::move(a)),
        m_name("compose(" + m_a->name() + ")") {}

  int update(const Rational& readout) override {
    m_id.step(readout);
    std::uint64_t c = m_id.output();
    if (c == 0) return 0;
    return m_a->approximate(c, m_id.position());
  }

  const std::string& name() const override { return m_name; }
  const std::vector<DecisionRecord>* decision_trace() const override { return &m_id.trace(); }

 private:
  IdentifierState m_id;
  std::shared_ptr<const LimitApproximator> m_a;
  std::string m_name;
};

class GeneralComposedTest final : public SequentialTest {
 public:
  GeneralComposedTest(IdentifierConfig cfg, std::shared_ptr<const CauchyPresentation> pres,
                      std::shared_ptr<const LimitApproximator> a)
      : m_id(cfg, std::move(pres)),
        m_a(std::move(a)),
        m_name("compose(" + m_id.presentation().name() + "; " + m_a->name() + ")") {}

  int update(const Rational& readout) override {
    m_id.step(readout);
    std::uint64_t c = m_id.output();
    if (c == 0) return 0;
    return m_a->approximate(c, m_id.position());
  }

  const std::string& name() const override { return m_name; }
  const std::vector<DecisionRecord>* decision_trace() const override { return &m_id.trace(); }

 private:
  GeneralIdentifierState m_id;
  std::shared_ptr<const LimitApproximator> m_a;
  std::string m_name;
};

}  // namespace

std::string trial_csv_header() {
  return "trial_id,seed,mu,set_name,truth,horizon,mistakes,last_change,final,stabilized_correct";
}

std::string trial_csv_row(const TrialRecord& r) {
  std::ostringstream out;
  out << r.trial_id << ',' << r.seed << ',' << sanitize_field(r.mu) << ','
      << sanitize_field(r.set_name) << ',' << r.truth << ',' << r.horizon << ',' << r.mistakes
      << ',' << r.last_change << ',' << r.final_verdict << ','
      << (r.stabilized_correct ? 1 : 0);
  return out.str();
}

TrialRecord parse_trial_csv_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  if (fields.size() != 10) throw std::invalid_argument("malformed trial row: " + line);
  TrialRecord r;
  try {
    r.trial_id = std::stoull(fields[0]);
    r.seed = std::stoull(fields[1]);
    r.mu = fields[2];
    r.set_name = fields[3];
    r.truth = std::stoi(fields[4]);
    r.horizon = std::stoull(fields[5]);
    r.mistakes = std::stoull(fields[6]);
    r.last_change = std::stoull(fields[7]);
    r.final_verdict = std::stoi(fields[8]);
    r.stabilized_correct = std::stoi(fields[9]) != 0;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed trial row: " + line);
  }
  return r;
}

std::unique_ptr<SequentialTest> compose(IdentifierConfig cfg,
                                        std::shared_ptr<EnumerationCache> cache,
                                        std::shared_ptr<const LimitApproximator> approximator) {
  return std::make_unique<ComposedTest>(std::move(cfg), std::move(cache),
                                        std::move(approximator));
}

std::unique_ptr<SequentialTest> compose_general(
    IdentifierConfig cfg, std::shared_ptr<const CauchyPresentation> presentation,
    std::shared_ptr<const LimitApproximator> approximator) {
  return std::make_unique<GeneralComposedTest>(std::move(cfg), std::move(presentation),
                                               std::move(approximator));
}

TrialRecord run_trial(SequentialTest& test, ReadoutStream& stream, std::uint64_t horizon,
                      int truth) {
  TrialRecord r;
  r.seed = stream.seed();
  r.mu = stream.spec().mean_label();
  r.truth = truth;
  r.horizon = horizon;
  int prev = 0;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    int f = test.update(stream.next_readout());
    if (f != truth) ++r.mistakes;
    if (n >= 2 && f != prev) r.last_change = n;
    prev = f;
  }
  r.final_verdict = prev;
  r.stabilized_correct = (prev == truth);
  return r;
}

ConstantIdentifierRun run_constant_identifier(const IdentifierConfig& cfg,
                                              const std::shared_ptr<EnumerationCache>& cache,
                                              const Rational& q, std::uint64_t horizon) {
  IdentifierState id(cfg, cache);
  id.advance_constant(q, horizon);
  ConstantIdentifierRun run;
  run.decisions = id.trace();
  run.final_output = id.output();
  std::uint64_t prev = 0;
  for (const auto& d : run.decisions) {
    if (d.C != prev) run.last_output_change = d.n;
    prev = d.C;
  }
  return run;
}

TrialRecord run_constant_composed_trial(const IdentifierConfig& cfg,
                                        const std::shared_ptr<EnumerationCache>& cache,
                                        const std::shared_ptr<const LimitApproximator>& a,
                                        const Rational& q, std::uint64_t horizon, int truth) {
  TrialRecord r;
  r.mu = to_fraction_string(q);
  r.truth = truth;
  r.horizon = horizon;
  if (horizon == 0) {
    r.stabilized_correct = (0 == truth);
    return r;
  }

  ConstantIdentifierRun run = run_constant_identifier(cfg, cache, q, horizon);

  // Constant-C segments [start, end] of the horizon in order. C = 0 before
  // the first decision (empty here since n(1) = 1, but kept for generality).
  struct Segment {
    std::uint64_t start, end, C;
  };
  std::vector<Segment> segments;
  std::uint64_t cursor = 1;
  std::uint64_t current_c = 0;
  for (const auto& d : run.decisions) {
    if (d.n > horizon) break;
    if (d.n > cursor) segments.push_back({cursor, d.n - 1, current_c});
    cursor = d.n;
    current_c = d.C;
  }
  if (cursor <= horizon) segments.push_back({cursor, horizon, current_c});

  int prev = 0;       // F_{n-1}; F_0 := 0 and changes only count from n = 2
  bool first = true;  // current boundary is n = 1
  for (const auto& seg : segments) {
    if (seg.C == 0) {
      if (truth != 0) r.mistakes += seg.end - seg.start + 1;
      if (!first && prev != 0) r.last_change = seg.start;
      prev = 0;
      first = false;
      continue;
    }
    int v = a->approximate(seg.C, seg.start);
    if (!first && v != prev) r.last_change = seg.start;
    first = false;
    std::uint64_t cur = seg.start;
    auto flips = a->change_stages(seg.C, seg.end);
    for (std::uint64_t t : flips) {
      if (t <= seg.start) continue;
      if (v != truth) r.mistakes += t - cur;  // [cur, t-1]
      v = a->approximate(seg.C, t);
      r.last_change = t;
      cur = t;
    }
    if (v != truth) r.mistakes += seg.end - cur + 1;
    prev = v;
  }
  r.final_verdict = prev;
  r.stabilized_correct = (prev == truth);
  return r;
}

namespace {

// Shared induced-approximator core: rows are built lazily by replaying a
// per-row process up to the queried stage and recording verdict changes
// ((stage, new value), ascending; value 0 before the first entry).
class InducedBase : public LimitApproximator {
 public:
  InducedBase(std::shared_ptr<EnumerationCache> cache, std::string name)
      : m_cache(std::move(cache)), m_name(std::move(name)) {}

  int approximate(std::uint64_t i, std::uint64_t s) const override {
    if (i == 0) throw std::invalid_argument("induced approximator row index must be >= 1");
    if (s == 0) return 0;
    std::lock_guard<std::mutex> lock(m_mutex);
    Row& row = m_rows[i];
    extend_row(i, row, s);
    return value_at(row, s);
  }

  std::vector<std::uint64_t> change_stages(std::uint64_t i, std::uint64_t s_max) const override {
    std::vector<std::uint64_t> out;
    if (i == 0 || s_max == 0) return out;
    std::lock_guard<std::mutex> lock(m_mutex);
    Row& row = m_rows[i];
    extend_row(i, row, s_max);
    for (const auto& [stage, value] : row.changes) {
      if (stage > s_max) break;
      out.push_back(stage);
    }
    return out;
  }

  const std::string& name() const override { return m_name; }

 protected:
  struct Row {
    std::uint64_t simulated_to = 0;
    int last_value = 0;
    std::vector<std::pair<std::uint64_t, int>> changes;
  };

  // Advance the row's process through stages (row.simulated_to, target].
  virtual void extend_row(std::uint64_t i, Row& row, std::uint64_t target) const = 0;

  static int value_at(const Row& row, std::uint64_t s) {
    int v = 0;
    for (const auto& [stage, value] : row.changes) {
      if (stage > s) break;
      v = value;
    }
    return v;
  }

  std::shared_ptr<EnumerationCache> m_cache;
  std::string m_name;
  mutable std::mutex m_mutex;
  mutable std::map<std::uint64_t, Row> m_rows;
};

// Replays an arbitrary sequential test one readout at a time.
class InducedApproximator final : public InducedBase {
 public:
  InducedApproximator(TestFactory factory, std::shared_ptr<EnumerationCache> cache,
                      std::string name)
      : InducedBase(std::move(cache), std::move(name)), m_factory(std::move(factory)) {}

 private:
  void extend_row(std::uint64_t i, Row& row, std::uint64_t target) const override {
    if (target <= row.simulated_to) return;
    auto& test = m_tests[i];
    if (!test) test = m_factory();
    const Rational& q = m_cache->at(i);
    for (std::uint64_t s = row.simulated_to + 1; s <= target; ++s) {
      int v = test->update(q);
      if (v != row.last_value) {
        row.changes.emplace_back(s, v);
        row.last_value = v;
      }
    }
    row.simulated_to = target;
  }

  TestFactory m_factory;
  mutable std::map<std::uint64_t, std::unique_ptr<SequentialTest>> m_tests;
};

// Same row semantics for the composed test on constant input q_i, but driven
// through the identifier's constant fast-forward, so a stage jump costs the
// decisions it crosses instead of one update per stage.
class InducedFastApproximator final : public InducedBase {
 public:
  InducedFastApproximator(IdentifierConfig cfg, std::shared_ptr<EnumerationCache> cache,
                          std::shared_ptr<const LimitApproximator> a, std::string name)
      : InducedBase(std::move(cache), std::move(name)), m_cfg(cfg), m_a(std::move(a)) {}

 private:
  void extend_row(std::uint64_t i, Row& row, std::uint64_t target) const override {
    if (target <= row.simulated_to) return;
    auto& id = m_ids[i];
    if (!id) id = std::make_unique<IdentifierState>(m_cfg, m_cache);
    const Rational& q = m_cache->at(i);

    std::uint64_t pos = id->position();
    std::uint64_t held_c = id->output();
    for (std::uint64_t s = row.simulated_to + 1; s <= target;) {
      // C is constant until the next decision; within the span the verdict
      // follows the approximator row (constant 0 when C = 0).
      std::uint64_t next_dec = id->next_decision_time();
      std::uint64_t span_end = std::min(target, next_dec - 1);
      if (span_end >= s) {
        record_span(row, held_c, s, span_end);
        s = span_end + 1;
      }
      if (s > target) break;
      // s == next_dec: execute exactly one decision
      id->advance_constant(q, next_dec - pos);
      pos = next_dec;
      held_c = id->output();
      record_span(row, held_c, s, s);
      ++s;
    }
    if (pos < target) {
      // flush the identifier to the target so position stays in sync
      id->advance_constant(q, target - pos);
    }
    row.simulated_to = target;
  }

  void record_span(Row& row, std::uint64_t c, std::uint64_t from, std::uint64_t to) const {
    if (c == 0) {
      if (row.last_value != 0) {
        row.changes.emplace_back(from, 0);
        row.last_value = 0;
      }
      return;
    }
    int v = m_a->approximate(c, from);
    if (v != row.last_value) {
      row.changes.emplace_back(from, v);
      row.last_value = v;
    }
    for (std::uint64_t t : m_a->change_stages(c, to)) {
      if (t <= from) continue;
      int nv = m_a->approximate(c, t);
      if (nv != row.last_value) {
        row.changes.emplace_back(t, nv);
        row.last_value = nv;
      }
    }
  }

  IdentifierConfig m_cfg;
  std::shared_ptr<const LimitApproximator> m_a;
  mutable std::map<std::uint64_t, std::unique_ptr<IdentifierState>> m_ids;
};

}  // namespace

std::unique_ptr<LimitApproximator> induced_approximator(TestFactory factory,
                                                        std::shared_ptr<EnumerationCache> cache,
                                                        std::string name) {
  return std::make_unique<InducedApproximator>(std::move(factory), std::move(cache),
                                               std::move(name));
}

std::unique_ptr<LimitApproximator> induced_approximator_fast(
    IdentifierConfig cfg, std::shared_ptr<EnumerationCache> cache,
    std::shared_ptr<const LimitApproximator> a, std::string name) {
  return std::make_unique<InducedFastApproximator>(std::move(cfg), std::move(cache), std::move(a),
                                                   std::move(name));
}

}  // namespace coverlab
