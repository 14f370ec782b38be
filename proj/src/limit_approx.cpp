#include "coverlab/limit_approx.hpp"

#include <stdexcept>
#include <utility>

namespace coverlab {

std::vector<std::uint64_t> LimitApproximator::change_stages(std::uint64_t i,
                                                            std::uint64_t s_max) const {
  std::vector<std::uint64_t> stages;
  int prev = approximate(i, 0);
  for (std::uint64_t s = 1; s <= s_max; ++s) {
    int cur = approximate(i, s);
    if (cur != prev) stages.push_back(s);
    prev = cur;
  }
  return stages;
}

std::optional<std::uint64_t> stabilization_stage(const LimitApproximator& a, std::uint64_t i,
                                                 std::uint64_t s_max) {
  auto stages = a.change_stages(i, s_max);
  if (stages.empty()) return std::nullopt;
  return stages.back();
}

namespace {

class DecidableApproximator : public LimitApproximator {
 public:
  DecidableApproximator(std::string name, std::function<bool(std::uint64_t)> predicate)
      : m_name(std::move(name)), m_predicate(std::move(predicate)) {}

  int approximate(std::uint64_t i, std::uint64_t) const override { return m_predicate(i) ? 1 : 0; }
  const std::string& name() const override { return m_name; }
  std::vector<std::uint64_t> change_stages(std::uint64_t, std::uint64_t) const override {
    return {};
  }

 private:
  std::string m_name;
  std::function<bool(std::uint64_t)> m_predicate;
};

class ConstantApproximator : public LimitApproximator {
 public:
  explicit ConstantApproximator(int bit)
      : m_bit(bit), m_name(bit ? "constant-1" : "constant-0") {}

  int approximate(std::uint64_t, std::uint64_t) const override { return m_bit; }
  const std::string& name() const override { return m_name; }
  std::vector<std::uint64_t> change_stages(std::uint64_t, std::uint64_t) const override {
    return {};
  }

 private:
  int m_bit;
  std::string m_name;
};

class FlipOnceApproximator : public LimitApproximator {
 public:
  explicit FlipOnceApproximator(std::map<std::uint64_t, std::uint64_t> flips)
      : m_flips(std::move(flips)), m_name("flip-once") {
    for (const auto& [i, stage] : m_flips) {
      (void)i;
      if (stage == 0) throw std::invalid_argument("flip stage must be >= 1");
    }
  }

  int approximate(std::uint64_t i, std::uint64_t s) const override {
    auto it = m_flips.find(i);
    if (it == m_flips.end()) return 0;
    return s >= it->second ? 1 : 0;
  }
  const std::string& name() const override { return m_name; }
  std::vector<std::uint64_t> change_stages(std::uint64_t i, std::uint64_t s_max) const override {
    auto it = m_flips.find(i);
    if (it == m_flips.end() || it->second > s_max) return {};
    return {it->second};
  }

 private:
  std::map<std::uint64_t, std::uint64_t> m_flips;
  std::string m_name;
};

}  // namespace

std::unique_ptr<LimitApproximator> make_decidable_approximator(
    std::string name, std::function<bool(std::uint64_t)> predicate) {
  return std::make_unique<DecidableApproximator>(std::move(name), std::move(predicate));
}

std::unique_ptr<LimitApproximator> make_constant_approximator(int bit) {
  return std::make_unique<ConstantApproximator>(bit);
}

std::unique_ptr<LimitApproximator> make_flip_once_approximator(
    std::map<std::uint64_t, std::uint64_t> flips) {
  return std::make_unique<FlipOnceApproximator>(std::move(flips));
}

HaltingApproximator::HaltingApproximator(std::vector<CatalogEntry> catalog,
                                         std::uint64_t step_cap)
    : m_catalog(std::move(catalog)), m_step_cap(step_cap), m_name("halting-catalog") {
  for (const auto& e : m_catalog) {
    if (e.halts && e.halt_step > m_step_cap)
      throw std::invalid_argument("catalog halt step exceeds the probe cap");
  }
}

const CatalogEntry* HaltingApproximator::entry(std::uint64_t i) const {
  for (const auto& e : m_catalog)
    if (e.index == i) return &e;
  return nullptr;
}

std::optional<std::uint64_t> HaltingApproximator::halt_step(std::uint64_t i) const {
  {
    std::lock_guard<std::mutex> lock(m_mutex);
    auto it = m_memo.find(i);
    if (it != m_memo.end()) return it->second;
  }
  const CatalogEntry* e = entry(i);
  std::optional<std::uint64_t> result;
  if (e != nullptr) result = run_halting_step(e->program, m_step_cap);
  std::lock_guard<std::mutex> lock(m_mutex);
  m_memo[i] = result;
  return result;
}

int HaltingApproximator::approximate(std::uint64_t i, std::uint64_t s) const {
  auto t = halt_step(i);
  return (t.has_value() && s >= *t) ? 1 : 0;
}

const std::string& HaltingApproximator::name() const { return m_name; }

std::vector<std::uint64_t> HaltingApproximator::change_stages(std::uint64_t i,
                                                              std::uint64_t s_max) const {
  auto t = halt_step(i);
  if (!t.has_value() || *t > s_max) return {};
  return {*t};
}

}  // namespace coverlab
