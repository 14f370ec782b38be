#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coverlab/harness.hpp"
#include "coverlab/registry.hpp"

#ifndef COVERLAB_CATALOG_PATH
#define COVERLAB_CATALOG_PATH "data/halting_catalog.txt"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfigError = 2;

coverlab::ExperimentConfig make_config(const std::string& config_path, const std::string& out_dir,
                                       const std::vector<std::uint64_t>& seeds,
                                       std::uint64_t horizon, bool trace) {
  coverlab::ExperimentConfig cfg;
  if (!config_path.empty())
    cfg = coverlab::load_config(config_path, COVERLAB_CATALOG_PATH);
  else
    cfg.catalog_path = COVERLAB_CATALOG_PATH;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (!seeds.empty()) cfg.seeds = seeds;
  if (horizon != 0) cfg.horizon = horizon;
  if (trace) cfg.trace = true;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coverlab: sequential membership tests over the rational enumeration"};
  app.require_subcommand(1);

  std::string config_path, out_dir, report_out;
  std::vector<std::uint64_t> seeds;
  std::uint64_t horizon = 0;
  bool trace = false;
  std::vector<std::string> report_files;

  CLI::App* run = app.add_subcommand("run", "execute trials and write trials.csv/summary.json");
  run->add_option("--config", config_path, "JSON experiment config");
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--seeds", seeds, "seed list (overrides config)")->delimiter(',');
  run->add_option("--horizon", horizon, "steps per trial (overrides config)");
  run->add_flag("--trace", trace, "also write per-seed decision traces");

  CLI::App* verify = app.add_subcommand("verify", "run exact self-checks; exit 0 iff all hold");
  verify->add_option("--config", config_path, "JSON config (verify section sets the knobs)");
  std::string inject_fault;
  verify->add_option("--inject-fault", inject_fault,
                     "deliberately break an invariant to prove the check detects it");

  CLI::App* report = app.add_subcommand("report", "aggregate trial CSVs by (mu, set, horizon)");
  report->add_option("files", report_files, "trials.csv files");
  report->add_option("--out", report_out, "also write the aggregate table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfigError : kExitOk;
  }

  try {
    if (run->parsed()) {
      coverlab::ExperimentConfig cfg = make_config(config_path, out_dir, seeds, horizon, trace);
      coverlab::Registry registry(cfg.catalog_path);
      return coverlab::cmd_run(cfg, registry, std::cout);
    }
    if (verify->parsed()) {
      coverlab::ExperimentConfig cfg = make_config(config_path, "", {}, 0, false);
      if (!inject_fault.empty()) cfg.verify.inject_fault = inject_fault;
      coverlab::Registry registry(cfg.catalog_path);
      return coverlab::cmd_verify(cfg, registry, std::cout);
    }
    if (report->parsed()) {
      if (report_files.empty()) {
        std::cerr << "usage error: report requires at least one trials.csv file\n";
        return kExitConfigError;
      }
      return coverlab::cmd_report(report_files, report_out, std::cout);
    }
  } catch (const coverlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfigError;
}
