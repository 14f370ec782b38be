#ifndef COVERLAB_REGISTRY_HPP
#define COVERLAB_REGISTRY_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>

#include "coverlab/cauchy.hpp"
#include "coverlab/enumeration.hpp"
#include "coverlab/limit_approx.hpp"

namespace coverlab {

// Bad user-supplied configuration (unknown names, malformed values). The CLI
// maps this to its "config error" exit status.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A target index set: ground truth for scoring plus the stage-indexed
// approximation the composed test actually consumes.
struct TargetSet {
  std::string name;
  std::function<int(std::uint64_t)> truth;  // indicator of the index set
  std::shared_ptr<const LimitApproximator> approximator;
};

// Name resolution for sets, approximators, and presentations, plus the shared
// process-wide resources (rational enumeration cache, halting catalog).
class Registry {
 public:
  explicit Registry(std::string catalog_path);

  const std::shared_ptr<EnumerationCache>& enumeration() const { return m_cache; }

  // The catalog-backed approximator; loaded from the catalog file on first
  // use, then shared.
  std::shared_ptr<const HaltingApproximator> halting() const;

  // Set names: "even-indices" | "odd-indices" | "halting-catalog" |
  // "decidable:even" | "decidable:odd" | "indices:i1;i2;..."
  TargetSet resolve_set(const std::string& name) const;

  // Presentation names: "sqrt<d>" | "sqrt<d>/<k>" | "e" | "rational:<n>/<d>"
  // | "general-demo" (the finite built-in list sqrt2, sqrt3, 3/2, sqrt5, e).
  std::shared_ptr<const CauchyPresentation> resolve_presentation(const std::string& name) const;

 private:
  std::string m_catalog_path;
  std::shared_ptr<EnumerationCache> m_cache;
  mutable std::mutex m_mutex;
  mutable std::shared_ptr<const HaltingApproximator> m_halting;
};

}  // namespace coverlab

#endif  // COVERLAB_REGISTRY_HPP
