#ifndef COVERLAB_LIMIT_APPROX_HPP
#define COVERLAB_LIMIT_APPROX_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "coverlab/counter_machine.hpp"

namespace coverlab {

// Stage-indexed bit approximation a(i, s): total, and for every row i the
// sequence s -> a(i, s) changes value only finitely often, so each row has a
// limit. Rows are pure functions of (i, s).
class LimitApproximator {
 public:
  virtual ~LimitApproximator() = default;

  virtual int approximate(std::uint64_t i, std::uint64_t s) const = 0;
  virtual const std::string& name() const = 0;

  // All s in [1, s_max] with a(i,s) != a(i,s-1), ascending. The default scans
  // every stage; implementations with known flip structure override.
  virtual std::vector<std::uint64_t> change_stages(std::uint64_t i, std::uint64_t s_max) const;
};

// Largest s <= s_max with a(i,s) != a(i,s-1), or nullopt if the row is
// constant over [0, s_max]. Observational only; never feeds back into any
// decision rule.
std::optional<std::uint64_t> stabilization_stage(const LimitApproximator& a, std::uint64_t i,
                                                 std::uint64_t s_max);

// Row i is constantly `predicate(i)`, independent of s.
std::unique_ptr<LimitApproximator> make_decidable_approximator(
    std::string name, std::function<bool(std::uint64_t)> predicate);

std::unique_ptr<LimitApproximator> make_constant_approximator(int bit);

// Rows listed in `flips` are 0 before their stage and 1 from it on; all other
// rows are constantly 0. Stages must be >= 1.
std::unique_ptr<LimitApproximator> make_flip_once_approximator(
    std::map<std::uint64_t, std::uint64_t> flips);

// a(i, s) = 1 iff the catalog program attached to index i halts within s
// steps. Indices without a program are constantly 0. Halting runs are
// memoized; the step cap bounds a single probe and must exceed every halt
// step in the catalog (entries carry ground truth, so this is checkable).
class HaltingApproximator : public LimitApproximator {
 public:
  explicit HaltingApproximator(std::vector<CatalogEntry> catalog,
                               std::uint64_t step_cap = 1000000);

  int approximate(std::uint64_t i, std::uint64_t s) const override;
  const std::string& name() const override;
  std::vector<std::uint64_t> change_stages(std::uint64_t i, std::uint64_t s_max) const override;

  const std::vector<CatalogEntry>& catalog() const { return m_catalog; }
  const CatalogEntry* entry(std::uint64_t i) const;

 private:
  // Halt step of the program at index i, nullopt if it never halts (within
  // the cap; catalog ground truth keeps the cap honest).
  std::optional<std::uint64_t> halt_step(std::uint64_t i) const;

  std::vector<CatalogEntry> m_catalog;
  std::uint64_t m_step_cap;
  std::string m_name;
  mutable std::mutex m_mutex;
  mutable std::map<std::uint64_t, std::optional<std::uint64_t>> m_memo;
};

}  // namespace coverlab

#endif  // COVERLAB_LIMIT_APPROX_HPP
