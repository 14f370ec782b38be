#ifndef COVERLAB_HARNESS_HPP
#define COVERLAB_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "coverlab/identifier.hpp"
#include "coverlab/registry.hpp"
#include "coverlab/streams.hpp"

namespace coverlab {

// Knobs for the self-check command; defaults are the full-scale sweep, small
// configs select cheaper smoke coverage.
struct VerifyConfig {
  std::uint64_t union_k_max = 1000;
  unsigned union_delta_min_exp = 1;  // delta = 2^-e over [min_exp, max_exp]
  unsigned union_delta_max_exp = 20;
  std::uint64_t summability_j = 10000;
  std::uint64_t coverage_horizon = 100000;
  std::vector<std::uint64_t> coverage_seeds;  // default 1..50
  std::uint64_t necessity_max_index = 50;
  std::uint64_t necessity_window = 10000;
  std::uint64_t equivalence_rows = 8;
  std::uint64_t equivalence_stages = 3000;
  std::string inject_fault;  // "" or "radius-under" (detector self-test)
};

// One experiment, fully resolved: every field has its final value and the
// canonical JSON dump of this struct is what run headers embed.
struct ExperimentConfig {
  std::string catalog_path;
  DistributionSpec distribution =
      DistributionSpec::two_point(Rational(0), Rational(1), Rational(1, 2));
  std::string set_name = "even-indices";
  std::string approximator_name = "auto";  // "auto" | "constant-0" | "constant-1"
  std::string general_presentation;        // nonempty: identify within this family
  IdentifierConfig identifier;
  std::uint64_t horizon = 1000;
  std::vector<std::uint64_t> seeds = {1};
  bool trace = false;
  std::string out_dir = "out";
  VerifyConfig verify;
};

// Reads a JSON config file, filling defaults for absent keys; rejects unknown
// keys and unresolvable names (ConfigError). `default_catalog` supplies
// catalog_path when the file does not.
ExperimentConfig load_config(const std::string& path, const std::string& default_catalog);

// The full resolved config as one line of JSON with sorted keys.
std::string canonical_config_json(const ExperimentConfig& cfg);

// Worker cap: COVERLAB_THREADS when set and valid, else hardware concurrency.
unsigned worker_count();

// Executes one trial per seed (in parallel, merged deterministically by
// seed), writes <out_dir>/trials.csv and <out_dir>/summary.json, and with
// cfg.trace also <out_dir>/trace_<seed>.csv per seed. Returns a process exit
// status; diagnostics go to `log`.
int cmd_run(const ExperimentConfig& cfg, const Registry& registry, std::ostream& log);

// Runs the self-checks (radius contract grid, union-measure sweep,
// summability, coverage table, necessity round-trip, induced-approximator
// route equivalence). Prints one line per check; exit 0 iff every exact
// invariant holds.
int cmd_verify(const ExperimentConfig& cfg, const Registry& registry, std::ostream& log);

// Aggregates trial CSV files into a table keyed by (mu, set, horizon):
// count, fraction stabilized_correct, median last_change, max mistakes.
// Writes the table to `log`; with non-empty out_path also writes it as CSV.
int cmd_report(const std::vector<std::string>& files, const std::string& out_path,
               std::ostream& log);

}  // namespace coverlab

#endif  // COVERLAB_HARNESS_HPP
