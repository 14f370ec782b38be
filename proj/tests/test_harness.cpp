#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "coverlab/harness.hpp"
#include "coverlab/membership.hpp"
#include "json.hpp"

using namespace coverlab;
namespace fs = std::filesystem;

#ifndef COVERLAB_CATALOG_PATH
#error "COVERLAB_CATALOG_PATH must be defined for harness tests"
#endif

namespace {

const char* kCatalog = COVERLAB_CATALOG_PATH;

fs::path fresh_dir(const std::string& leaf) {
  fs::path p = fs::temp_directory_path() / "coverlab_harness_tests" / leaf;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream out(p);
  out << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// File contents with volatile comment lines (timestamps) removed.
std::string stable_body(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# timestamp:", 0) != 0) out << line << "\n";
  return out.str();
}

Registry& registry() {
  static Registry r(kCatalog);
  return r;
}

}  // namespace

TEST_CASE("registry resolves the built-in set names") {
  auto even = registry().resolve_set("even-indices");
  CHECK(even.name == "even-indices");
  CHECK(even.truth(4) == 1);
  CHECK(even.truth(7) == 0);
  CHECK(even.approximator->approximate(4, 1) == 1);

  auto odd = registry().resolve_set("odd-indices");
  CHECK(odd.truth(4) == 0);
  CHECK(odd.truth(7) == 1);

  auto halting = registry().resolve_set("halting-catalog");
  CHECK(halting.truth(2) == 1);   // catalog: program 2 halts
  CHECK(halting.truth(3) == 0);   // program 3 loops
  CHECK(halting.truth(1) == 0);   // no program at index 1
  // approximator is the staged halting probe, not the oracle: early stages 0
  CHECK(halting.approximator->approximate(9, 1) == 0);
  CHECK(halting.approximator->approximate(9, 971) == 1);

  auto listed = registry().resolve_set("indices:4;9");
  CHECK(listed.truth(4) == 1);
  CHECK(listed.truth(9) == 1);
  CHECK(listed.truth(5) == 0);
  CHECK(listed.approximator->approximate(9, 1) == 1);

  CHECK_THROWS_AS(registry().resolve_set("no-such-set"), ConfigError);
  CHECK_THROWS_AS(registry().resolve_set("indices:"), ConfigError);
  CHECK_THROWS_AS(registry().resolve_set("indices:4;x"), ConfigError);
}

TEST_CASE("registry resolves presentation names") {
  auto s2 = registry().resolve_presentation("sqrt2");
  CHECK(s2->name() == "sqrt2");
  auto half_root = registry().resolve_presentation("sqrt2/2");
  Rational lo, hi;
  half_root->bounds(1, 20, lo, hi);
  CHECK(lo > Rational(7, 10));
  CHECK(hi < Rational(71, 100));
  auto e = registry().resolve_presentation("e");
  e->bounds(1, 10, lo, hi);
  CHECK(lo > Rational(27, 10));
  auto q = registry().resolve_presentation("rational:3/2");
  q->bounds(1, 5, lo, hi);
  CHECK(lo == Rational(3, 2));
  CHECK(hi == Rational(3, 2));
  auto demo = registry().resolve_presentation("general-demo");
  REQUIRE(demo->member_count().has_value());
  CHECK(*demo->member_count() == 5);
  demo->bounds(3, 10, lo, hi);  // member 3 of the demo family is 3/2
  CHECK(lo == Rational(3, 2));
  CHECK(hi == Rational(3, 2));
  CHECK_THROWS_AS(registry().resolve_presentation("sqrtx"), ConfigError);
  CHECK_THROWS_AS(registry().resolve_presentation("nope"), ConfigError);
}

TEST_CASE("load_config fills defaults from an empty object") {
  auto dir = fresh_dir("cfg_defaults");
  auto p = write_file(dir, "c.json", "{}");
  ExperimentConfig cfg = load_config(p.string(), kCatalog);
  CHECK(cfg.catalog_path == kCatalog);
  CHECK(cfg.set_name == "even-indices");
  CHECK(cfg.approximator_name == "auto");
  CHECK(cfg.general_presentation.empty());
  CHECK(cfg.horizon == 1000);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{1});
  CHECK(!cfg.trace);
  CHECK(cfg.identifier.p == 6);
  CHECK(cfg.identifier.alpha == Rational(1, 2));
  CHECK(cfg.identifier.epsilon == EpsilonKind::Pow2);
  CHECK(cfg.verify.union_k_max == 1000);
  CHECK(cfg.verify.coverage_seeds.size() == 50);
  CHECK(cfg.verify.coverage_seeds.front() == 1);
  CHECK(cfg.verify.coverage_seeds.back() == 50);
}

TEST_CASE("load_config honors every override") {
  auto dir = fresh_dir("cfg_full");
  auto p = write_file(dir, "c.json", R"({
    "distribution": {"kind": "two_point", "a": "-1/3", "b": "2/3", "p": "1/4"},
    "set": "odd-indices",
    "approximator": "constant-1",
    "identifier": {"alpha": "1/4", "p": 5, "epsilon": "inv-square", "depth_budget": 500000},
    "horizon": 777,
    "seeds": [5, 3, 8],
    "trace": true,
    "out_dir": "elsewhere",
    "verify": {"union_k_max": 7, "summability_j": 9, "coverage_seeds": [2, 4],
               "necessity_max_index": 3, "inject_fault": "radius-under"}
  })");
  ExperimentConfig cfg = load_config(p.string(), kCatalog);
  CHECK(cfg.distribution.kind == DistributionSpec::Kind::TwoPoint);
  CHECK(cfg.distribution.a == Rational(-1, 3));
  CHECK(cfg.distribution.b == Rational(2, 3));
  CHECK(cfg.distribution.p == Rational(1, 4));
  CHECK(cfg.set_name == "odd-indices");
  CHECK(cfg.approximator_name == "constant-1");
  CHECK(cfg.identifier.alpha == Rational(1, 4));
  CHECK(cfg.identifier.p == 5);
  CHECK(cfg.identifier.epsilon == EpsilonKind::InvSquare);
  CHECK(cfg.identifier.depth_budget == 500000);
  CHECK(cfg.horizon == 777);
  CHECK(cfg.seeds == std::vector<std::uint64_t>{5, 3, 8});
  CHECK(cfg.trace);
  CHECK(cfg.out_dir == "elsewhere");
  CHECK(cfg.verify.union_k_max == 7);
  CHECK(cfg.verify.summability_j == 9);
  CHECK(cfg.verify.coverage_seeds == std::vector<std::uint64_t>{2, 4});
  CHECK(cfg.verify.necessity_max_index == 3);
  CHECK(cfg.verify.inject_fault == "radius-under");
}

TEST_CASE("load_config rejects what it cannot honor") {
  auto dir = fresh_dir("cfg_bad");
  auto throws = [&](const std::string& name, const std::string& text) {
    auto p = write_file(dir, name, text);
    CHECK_THROWS_AS(load_config(p.string(), kCatalog), ConfigError);
  };
  CHECK_THROWS_AS(load_config((dir / "missing.json").string(), kCatalog), ConfigError);
  throws("parse.json", "{ not json");
  throws("root.json", "[1,2]");
  throws("unknown.json", R"({"horizons": 5})");
  throws("unknown2.json", R"({"identifier": {"q": 6}})");
  throws("unknown3.json", R"({"verify": {"union_kmax": 5}})");
  throws("dist.json", R"({"distribution": {"kind": "gaussian"}})");
  throws("distp.json", R"({"distribution": {"kind": "two_point", "p": "3/2"}})");
  throws("mu.json", R"({"distribution": {"kind": "irrational_two_point", "mu": "nope"}})");
  throws("eps.json", R"({"identifier": {"epsilon": "float"}})");
  throws("p4.json", R"({"identifier": {"p": 4}})");
  throws("alpha.json", R"({"identifier": {"alpha": "0"}})");
  throws("horizon.json", R"({"horizon": 0})");
  throws("seeds.json", R"({"seeds": []})");
  throws("seeds2.json", R"({"seeds": [-1]})");
  throws("trace.json", R"({"trace": "yes"})");
  throws("pres.json", R"({"general_presentation": "sqrt-2"})");
  throws("verify.json", R"({"verify": {"union_delta_min_exp": 0}})");
  throws("verify2.json", R"({"verify": {"union_delta_min_exp": 9, "union_delta_max_exp": 3}})");
  throws("badq.json", R"({"distribution": {"kind": "constant", "q": "1/0"}})");
}

TEST_CASE("canonical config json is deterministic and parseable") {
  auto dir = fresh_dir("cfg_canon");
  auto p = write_file(dir, "c.json", R"({"horizon": 42, "seeds": [9, 1]})");
  ExperimentConfig cfg = load_config(p.string(), kCatalog);
  std::string a = canonical_config_json(cfg);
  std::string b = canonical_config_json(cfg);
  CHECK(a == b);
  CHECK(a.find('\n') == std::string::npos);
  auto j = nlohmann::json::parse(a);
  CHECK(j["horizon"] == 42);
  CHECK(j["seeds"] == nlohmann::json::array({9, 1}));
  CHECK(j["set"] == "even-indices");
  CHECK(j["identifier"]["p"] == 6);
  CHECK(j["distribution"]["kind"] == "two_point");
  CHECK(j["verify"]["union_k_max"] == 1000);
}

TEST_CASE("worker count obeys the environment override") {
  setenv("COVERLAB_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("COVERLAB_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  setenv("COVERLAB_THREADS", "0", 1);  // invalid: fall back
  CHECK(worker_count() >= 1);
  setenv("COVERLAB_THREADS", "junk", 1);
  CHECK(worker_count() >= 1);
  unsetenv("COVERLAB_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("cmd_run writes scored trials and a summary") {
  auto dir = fresh_dir("run_basic");
  ExperimentConfig cfg;
  cfg.catalog_path = kCatalog;
  cfg.horizon = 5000;
  cfg.seeds = {3, 1, 2};
  cfg.trace = true;
  cfg.out_dir = (dir / "out").string();
  setenv("COVERLAB_THREADS", "2", 1);
  std::ostringstream log;
  int rc = cmd_run(cfg, registry(), log);
  unsetenv("COVERLAB_THREADS");
  CHECK(rc == 0);
  CHECK(log.str().find("wrote") != std::string::npos);

  // trials.csv: 3 comment/header lines, then one row per seed in seed order
  std::istringstream in(slurp(dir / "out" / "trials.csv"));
  std::string line;
  std::vector<TrialRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == trial_csv_header()) continue;
    rows.push_back(parse_trial_csv_row(line));
  }
  REQUIRE(rows.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(rows[k].trial_id == k + 1);
    CHECK(rows[k].seed == k + 1);
    CHECK(rows[k].mu == "1/2");
    CHECK(rows[k].set_name == "even-indices");
    CHECK(rows[k].truth == 1);  // 1/2 is enumeration index 4, an even index
    CHECK(rows[k].horizon == 5000);
  }

  auto s = nlohmann::json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(s["trials"] == 3);
  CHECK(s["config"]["horizon"] == 5000);
  CHECK(s.contains("stabilized_correct_count"));
  CHECK(s.contains("stabilized_correct_fraction"));
  CHECK(s.contains("median_last_change"));
  CHECK(s.contains("max_mistakes"));

  // per-seed traces exist and carry the decision header
  for (int seed = 1; seed <= 3; ++seed) {
    std::string t = slurp(dir / "out" / ("trace_" + std::to_string(seed) + ".csv"));
    CHECK(t.find("j,n,mean,s_sq,delta_hat,delta_prime,i_j,C,materialized") != std::string::npos);
    CHECK(t.find("\n1,1,") != std::string::npos);  // first decision row at n=1
  }
}

TEST_CASE("cmd_run is deterministic apart from timestamps") {
  // literally the same config twice: same out_dir, capture between runs
  auto dir = fresh_dir("run_det");
  ExperimentConfig cfg;
  cfg.catalog_path = kCatalog;
  cfg.horizon = 1200;
  cfg.seeds = {7, 11};
  cfg.out_dir = (dir / "out").string();
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, registry(), log) == 0);
  std::string trials_first = stable_body(dir / "out" / "trials.csv");
  std::string summary_first = slurp(dir / "out" / "summary.json");
  REQUIRE(cmd_run(cfg, registry(), log) == 0);
  CHECK(trials_first == stable_body(dir / "out" / "trials.csv"));
  CHECK(summary_first == slurp(dir / "out" / "summary.json"));
  CHECK(!trials_first.empty());
  CHECK(!summary_first.empty());
}

TEST_CASE("cmd_run on a constant distribution uses exact fast-forward scoring") {
  auto dir = fresh_dir("run_const");
  ExperimentConfig cfg;
  cfg.catalog_path = kCatalog;
  cfg.distribution = DistributionSpec::constant(Rational(1, 2));
  cfg.horizon = 1000000000;  // far beyond stepwise reach
  cfg.seeds = {1};
  cfg.out_dir = (dir / "out").string();
  std::ostringstream log;
  REQUIRE(cmd_run(cfg, registry(), log) == 0);
  std::istringstream in(slurp(dir / "out" / "trials.csv"));
  std::string line;
  std::vector<TrialRecord> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line == trial_csv_header()) continue;
    rows.push_back(parse_trial_csv_row(line));
  }
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].final_verdict == 1);
  CHECK(rows[0].stabilized_correct);
  CHECK(rows[0].last_change == 4096);
  CHECK(rows[0].mistakes == 4095);
}

TEST_CASE("cmd_run rejects unresolvable names before writing anything") {
  auto dir = fresh_dir("run_bad");
  ExperimentConfig cfg;
  cfg.catalog_path = kCatalog;
  cfg.set_name = "no-such-set";
  cfg.out_dir = (dir / "out").string();
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_run(cfg, registry(), log), ConfigError);
  CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("cmd_verify passes on a smoke-sized sweep") {
  ExperimentConfig cfg;
  cfg.catalog_path = kCatalog;
  cfg.verify.union_k_max = 40;
  cfg.verify.union_delta_min_exp = 1;
  cfg.verify.union_delta_max_exp = 5;
  cfg.verify.summability_j = 60;
  cfg.verify.coverage_horizon = 1500;
  cfg.verify.coverage_seeds = {1, 2, 3};
  cfg.verify.necessity_max_index = 10;
  cfg.verify.necessity_window = 4096;
  cfg.verify.equivalence_rows = 5;
  cfg.verify.equivalence_stages = 1200;
  std::ostringstream log;
  int rc = cmd_verify(cfg, registry(), log);
  INFO(log.str());
  CHECK(rc == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
  CHECK(log.str().find("ok: radius contract") != std::string::npos);
  CHECK(log.str().find("ok: union measure bound") != std::string::npos);
  CHECK(log.str().find("necessity round-trip") != std::string::npos);
}

TEST_CASE("cmd_verify catches an injected radius fault") {
  ExperimentConfig cfg;
  cfg.catalog_path = kCatalog;
  cfg.verify.union_k_max = 5;
  cfg.verify.union_delta_max_exp = 2;
  cfg.verify.summability_j = 5;
  cfg.verify.coverage_horizon = 200;
  cfg.verify.coverage_seeds = {1};
  cfg.verify.necessity_max_index = 2;
  cfg.verify.necessity_window = 256;
  cfg.verify.equivalence_rows = 2;
  cfg.verify.equivalence_stages = 100;
  cfg.verify.inject_fault = "radius-under";
  std::ostringstream log;
  int rc = cmd_verify(cfg, registry(), log);
  CHECK(rc == 1);
  CHECK(log.str().find("FAIL") != std::string::npos);
  CHECK(log.str().find("radius") != std::string::npos);
}

TEST_CASE("cmd_report groups trials and takes the lower median") {
  auto dir = fresh_dir("report");
  auto make_row = [](std::uint64_t id, std::uint64_t seed, const std::string& mu,
                     const std::string& set, std::uint64_t horizon, std::uint64_t mistakes,
                     std::uint64_t last_change, int final_verdict, bool ok) {
    TrialRecord r;
    r.trial_id = id;
    r.seed = seed;
    r.mu = mu;
    r.set_name = set;
    r.truth = ok ? final_verdict : 1 - final_verdict;
    r.horizon = horizon;
    r.mistakes = mistakes;
    r.last_change = last_change;
    r.final_verdict = final_verdict;
    r.stabilized_correct = ok;
    return trial_csv_row(r);
  };
  std::ostringstream body;
  body << "# comment\n" << trial_csv_header() << "\n";
  body << make_row(1, 1, "1/2", "even-indices", 100, 9, 40, 1, true) << "\n";
  body << make_row(2, 2, "1/2", "even-indices", 100, 2, 10, 1, true) << "\n";
  body << make_row(3, 3, "1/2", "even-indices", 100, 5, 30, 1, true) << "\n";
  body << make_row(4, 4, "1/2", "even-indices", 100, 7, 20, 0, false) << "\n";
  body << make_row(5, 1, "1/3", "even-indices", 100, 1, 5, 0, true) << "\n";
  auto f = write_file(dir, "t.csv", body.str());

  std::ostringstream log;
  std::string out_csv = (dir / "report.csv").string();
  int rc = cmd_report({f.string()}, out_csv, log);
  CHECK(rc == 0);
  std::string rep = slurp(out_csv);
  // group (1/2, even-indices, 100): 4 trials, 3 correct, lower median of
  // {10,20,30,40} is 20, max mistakes 9
  CHECK(rep.find("1/2,even-indices,100,4,3,3/4,20,9") != std::string::npos);
  CHECK(rep.find("1/3,even-indices,100,1,1,1/1,5,1") != std::string::npos);

  // splitting the same rows across two files changes nothing
  auto f1 = write_file(dir, "t1.csv", make_row(1, 1, "1/2", "even-indices", 100, 9, 40, 1, true) + "\n");
  std::ostringstream log2;
  CHECK(cmd_report({f1.string(), f.string()}, "", log2) == 0);
  CHECK(log2.str().find("1/2") != std::string::npos);
}

TEST_CASE("cmd_report rejects rubbish") {
  auto dir = fresh_dir("report_bad");
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_report({}, "", log), ConfigError);
  CHECK(cmd_report({(dir / "missing.csv").string()}, "", log) == 1);
  auto f = write_file(dir, "junk.csv", "not,a,trial,row\n");
  CHECK(cmd_report({f.string()}, "", log) == 1);
  auto empty = write_file(dir, "empty.csv", "# nothing here\n");
  CHECK(cmd_report({empty.string()}, "", log) == 1);
}
