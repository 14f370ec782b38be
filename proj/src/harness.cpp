#include "coverlab/harness.hpp"

#include <mpfr.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

#include "coverlab/diagnostics.hpp"
#include "coverlab/membership.hpp"
#include "coverlab/radius.hpp"

namespace coverlab {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError("unknown config key '" + it.key() + "' in " + where);
  }
}

Rational rational_field(const json& obj, const char* key, const Rational& def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_string())
    throw ConfigError(std::string("config key '") + key + "' must be a rational string");
  try {
    return parse_rational(obj[key].get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad rational for '") + key + "': " + e.what());
  }
}

std::uint64_t uint_field(const json& obj, const char* key, std::uint64_t def) {
  if (!obj.contains(key)) return def;
  if (!obj[key].is_number_unsigned())
    throw ConfigError(std::string("config key '") + key + "' must be a nonnegative integer");
  return obj[key].get<std::uint64_t>();
}

EpsilonKind parse_epsilon(const std::string& s) {
  if (s == "pow2") return EpsilonKind::Pow2;
  if (s == "inv-square" || s == "inv_square") return EpsilonKind::InvSquare;
  throw ConfigError("unknown epsilon schedule: " + s + " (expected pow2 or inv-square)");
}

const char* epsilon_name(EpsilonKind k) {
  return k == EpsilonKind::Pow2 ? "pow2" : "inv-square";
}

DistributionSpec parse_distribution(const json& d, const Registry& registry) {
  check_keys(d, {"kind", "q", "a", "b", "p", "mu", "offset"}, "distribution");
  std::string kind = d.value("kind", std::string("two_point"));
  try {
    if (kind == "constant") return DistributionSpec::constant(rational_field(d, "q", Rational(0)));
    if (kind == "two_point")
      return DistributionSpec::two_point(rational_field(d, "a", Rational(0)),
                                         rational_field(d, "b", Rational(1)),
                                         rational_field(d, "p", Rational(1, 2)));
    if (kind == "shifted_bernoulli")
      return DistributionSpec::shifted_bernoulli(rational_field(d, "q", Rational(0)),
                                                 rational_field(d, "offset", Rational(1)));
    if (kind == "irrational_two_point") {
      if (!d.contains("mu") || !d["mu"].is_string())
        throw ConfigError("irrational_two_point needs a presentation name under 'mu'");
      auto mu = registry.resolve_presentation(d["mu"].get<std::string>());
      return DistributionSpec::irrational_two_point(std::move(mu),
                                                    rational_field(d, "offset", Rational(1)));
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad distribution: ") + e.what());
  }
  throw ConfigError("unknown distribution kind: " + kind);
}

std::string utc_timestamp() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json distribution_json(const DistributionSpec& spec) {
  json d;
  d["kind"] = spec.kind_name();
  switch (spec.kind) {
    case DistributionSpec::Kind::Constant:
      d["q"] = to_fraction_string(spec.q);
      break;
    case DistributionSpec::Kind::TwoPoint:
      d["a"] = to_fraction_string(spec.a);
      d["b"] = to_fraction_string(spec.b);
      d["p"] = to_fraction_string(spec.p);
      break;
    case DistributionSpec::Kind::ShiftedBernoulli:
      d["q"] = to_fraction_string(spec.q);
      d["offset"] = to_fraction_string(spec.offset);
      break;
    case DistributionSpec::Kind::IrrationalTwoPoint:
      d["mu"] = spec.mu->name();
      d["offset"] = to_fraction_string(spec.offset);
      break;
  }
  return d;
}

std::shared_ptr<const LimitApproximator> pick_approximator(const std::string& name,
                                                           const TargetSet& set) {
  if (name == "auto") return set.approximator;
  if (name == "constant-0") return make_constant_approximator(0);
  if (name == "constant-1") return make_constant_approximator(1);
  throw ConfigError("unknown approximator name: " + name);
}

// Ground truth for scoring: whether the stream's mean is a set member. For
// the enumeration identifier that is truth(index_of(mu)); for a presented
// family it is truth(j) of the member exactly equal to mu, when one is
// recognizable (zero-width bounds), else 0. Irrational means are never in an
// indexed rational/list family unless presented, and score as 0.
int resolve_truth(const DistributionSpec& spec, const TargetSet& set,
                  const std::shared_ptr<const CauchyPresentation>& general) {
  if (!spec.rational_support()) return 0;
  Rational mu = spec.mean_rational();
  if (general) {
    auto count = general->member_count();
    std::uint64_t limit = count ? *count : 64;
    for (std::uint64_t j = 1; j <= limit; ++j) {
      Rational lo, hi;
      general->bounds(j, 64, lo, hi);
      if (lo == hi && lo == mu) return set.truth(j);
    }
    return 0;
  }
  Integer idx = index_of(mu);
  if (!idx.fits_ulong_p())
    throw ConfigError("mean " + to_fraction_string(mu) +
                      " has an enumeration index beyond addressable range");
  return set.truth(idx.get_ui());
}

struct TrialSlot {
  TrialRecord record;
  std::vector<DecisionRecord> trace;
  std::exception_ptr error;
};

void write_trace_file(const std::filesystem::path& path, const std::vector<DecisionRecord>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "j,n,mean,s_sq,delta_hat,delta_prime,i_j,C,materialized\n";
  for (const auto& d : trace) {
    out << d.j << ',' << d.n << ',' << to_fraction_string(d.mean) << ','
        << to_fraction_string(d.s_sq) << ',' << to_fraction_string(d.delta_hat) << ','
        << to_fraction_string(d.delta_prime) << ',' << d.i_j << ',' << d.C << ','
        << (d.materialized ? 1 : 0) << '\n';
  }
}

ExperimentConfig load_config_fields(const json& j, const std::string& default_catalog) {
  ExperimentConfig cfg;
  cfg.catalog_path = j.value("catalog", default_catalog);
  Registry registry(cfg.catalog_path);

  if (j.contains("distribution")) cfg.distribution = parse_distribution(j["distribution"], registry);
  cfg.set_name = j.value("set", cfg.set_name);
  cfg.approximator_name = j.value("approximator", cfg.approximator_name);
  cfg.general_presentation = j.value("general_presentation", cfg.general_presentation);
  if (!cfg.general_presentation.empty())
    registry.resolve_presentation(cfg.general_presentation);  // fail fast on bad names

  if (j.contains("identifier")) {
    const json& id = j["identifier"];
    check_keys(id, {"alpha", "p", "epsilon", "depth_budget"}, "identifier");
    cfg.identifier.alpha = rational_field(id, "alpha", cfg.identifier.alpha);
    std::uint64_t p = uint_field(id, "p", cfg.identifier.p);
    if (p > 64) throw ConfigError("identifier p out of range");
    cfg.identifier.p = static_cast<unsigned>(p);
    if (id.contains("epsilon")) cfg.identifier.epsilon = parse_epsilon(id["epsilon"]);
    cfg.identifier.depth_budget = uint_field(id, "depth_budget", cfg.identifier.depth_budget);
  }
  try {
    cfg.identifier.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad identifier config: ") + e.what());
  }

  cfg.horizon = uint_field(j, "horizon", cfg.horizon);
  if (cfg.horizon == 0) throw ConfigError("horizon must be >= 1");
  if (j.contains("seeds")) {
    if (!j["seeds"].is_array() || j["seeds"].empty())
      throw ConfigError("seeds must be a nonempty array");
    cfg.seeds.clear();
    for (const auto& s : j["seeds"]) {
      if (!s.is_number_unsigned()) throw ConfigError("seeds must be nonnegative integers");
      cfg.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  if (j.contains("trace")) {
    if (!j["trace"].is_boolean()) throw ConfigError("trace must be a boolean");
    cfg.trace = j["trace"].get<bool>();
  }
  cfg.out_dir = j.value("out_dir", cfg.out_dir);

  if (j.contains("verify")) {
    const json& v = j["verify"];
    check_keys(v,
               {"union_k_max", "union_delta_min_exp", "union_delta_max_exp", "summability_j",
                "coverage_horizon", "coverage_seeds", "necessity_max_index", "necessity_window",
                "equivalence_rows", "equivalence_stages", "inject_fault"},
               "verify");
    VerifyConfig& vc = cfg.verify;
    vc.union_k_max = uint_field(v, "union_k_max", vc.union_k_max);
    vc.union_delta_min_exp =
        static_cast<unsigned>(uint_field(v, "union_delta_min_exp", vc.union_delta_min_exp));
    vc.union_delta_max_exp =
        static_cast<unsigned>(uint_field(v, "union_delta_max_exp", vc.union_delta_max_exp));
    vc.summability_j = uint_field(v, "summability_j", vc.summability_j);
    vc.coverage_horizon = uint_field(v, "coverage_horizon", vc.coverage_horizon);
    if (v.contains("coverage_seeds")) {
      if (!v["coverage_seeds"].is_array()) throw ConfigError("coverage_seeds must be an array");
      vc.coverage_seeds.clear();
      for (const auto& s : v["coverage_seeds"]) {
        if (!s.is_number_unsigned())
          throw ConfigError("coverage_seeds must be nonnegative integers");
        vc.coverage_seeds.push_back(s.get<std::uint64_t>());
      }
    }
    vc.necessity_max_index = uint_field(v, "necessity_max_index", vc.necessity_max_index);
    vc.necessity_window = uint_field(v, "necessity_window", vc.necessity_window);
    vc.equivalence_rows = uint_field(v, "equivalence_rows", vc.equivalence_rows);
    vc.equivalence_stages = uint_field(v, "equivalence_stages", vc.equivalence_stages);
    vc.inject_fault = v.value("inject_fault", vc.inject_fault);
    if (vc.union_k_max == 0 || vc.summability_j == 0 || vc.coverage_horizon == 0 ||
        vc.necessity_max_index == 0)
      throw ConfigError("verify sizes must be >= 1");
    if (vc.union_delta_min_exp == 0 || vc.union_delta_min_exp > vc.union_delta_max_exp ||
        vc.union_delta_max_exp > 4096)
      throw ConfigError("bad union delta exponent range");
  }
  if (cfg.verify.coverage_seeds.empty())
    for (std::uint64_t s = 1; s <= 50; ++s) cfg.verify.coverage_seeds.push_back(s);
  return cfg;
}

}  // namespace

ExperimentConfig load_config(const std::string& path, const std::string& default_catalog) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  check_keys(j,
             {"catalog", "distribution", "set", "approximator", "general_presentation",
              "identifier", "horizon", "seeds", "trace", "out_dir", "verify"},
             "config root");
  try {
    return load_config_fields(j, default_catalog);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

std::string canonical_config_json(const ExperimentConfig& cfg) {
  json j;
  j["catalog"] = cfg.catalog_path;
  j["distribution"] = distribution_json(cfg.distribution);
  j["set"] = cfg.set_name;
  j["approximator"] = cfg.approximator_name;
  j["general_presentation"] = cfg.general_presentation;
  j["identifier"] = {{"alpha", to_fraction_string(cfg.identifier.alpha)},
                     {"p", cfg.identifier.p},
                     {"epsilon", epsilon_name(cfg.identifier.epsilon)},
                     {"depth_budget", cfg.identifier.depth_budget}};
  j["horizon"] = cfg.horizon;
  j["seeds"] = cfg.seeds;
  j["trace"] = cfg.trace;
  j["out_dir"] = cfg.out_dir;
  const VerifyConfig& v = cfg.verify;
  j["verify"] = {{"union_k_max", v.union_k_max},
                 {"union_delta_min_exp", v.union_delta_min_exp},
                 {"union_delta_max_exp", v.union_delta_max_exp},
                 {"summability_j", v.summability_j},
                 {"coverage_horizon", v.coverage_horizon},
                 {"coverage_seeds", v.coverage_seeds},
                 {"necessity_max_index", v.necessity_max_index},
                 {"necessity_window", v.necessity_window},
                 {"equivalence_rows", v.equivalence_rows},
                 {"equivalence_stages", v.equivalence_stages},
                 {"inject_fault", v.inject_fault}};
  return j.dump();
}

unsigned worker_count() {
  if (const char* env = std::getenv("COVERLAB_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1 && v <= 1024) return static_cast<unsigned>(v);
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc ? hc : 1;
}

int cmd_run(const ExperimentConfig& cfg, const Registry& registry, std::ostream& log) {
  // Resolve everything before touching the filesystem: config errors must not
  // leave partial results behind.
  TargetSet set = registry.resolve_set(cfg.set_name);
  auto approx = pick_approximator(cfg.approximator_name, set);
  std::shared_ptr<const CauchyPresentation> general;
  if (!cfg.general_presentation.empty())
    general = registry.resolve_presentation(cfg.general_presentation);
  const int truth = resolve_truth(cfg.distribution, set, general);
  const auto& cache = registry.enumeration();

  std::vector<TrialSlot> slots(cfg.seeds.size());
  const bool constant_fast = !general && cfg.distribution.kind == DistributionSpec::Kind::Constant;

  auto run_one = [&](std::size_t k) {
    TrialSlot& slot = slots[k];
    std::uint64_t seed = cfg.seeds[k];
    try {
      if (constant_fast) {
        slot.record = run_constant_composed_trial(cfg.identifier, cache, approx,
                                                  cfg.distribution.q, cfg.horizon, truth);
        slot.record.seed = seed;
        slot.record.mu = cfg.distribution.mean_label();
        if (cfg.trace)
          slot.trace =
              run_constant_identifier(cfg.identifier, cache, cfg.distribution.q, cfg.horizon)
                  .decisions;
      } else {
        auto test = general ? compose_general(cfg.identifier, general, approx)
                            : compose(cfg.identifier, cache, approx);
        ReadoutStream stream(cfg.distribution, seed, cfg.identifier.epsilon);
        slot.record = run_trial(*test, stream, cfg.horizon, truth);
        if (cfg.trace && test->decision_trace() != nullptr)
          slot.trace = *test->decision_trace();
      }
      slot.record.set_name = set.name;
    } catch (...) {
      slot.error = std::current_exception();
    }
  };

  unsigned workers = static_cast<unsigned>(
      std::min<std::size_t>(worker_count(), cfg.seeds.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < cfg.seeds.size(); ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t k = next.fetch_add(1);
          if (k >= cfg.seeds.size()) break;
          run_one(k);
        }
      });
    for (auto& t : pool) t.join();
  }
  for (const auto& slot : slots)
    if (slot.error) std::rethrow_exception(slot.error);

  // Deterministic merge order regardless of scheduling: by seed, stable.
  std::vector<std::size_t> order(slots.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return slots[a].record.seed < slots[b].record.seed;
  });

  std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);
  const std::string config_line = canonical_config_json(cfg);

  std::filesystem::path trials_path = out_dir / "trials.csv";
  {
    std::ofstream out(trials_path);
    if (!out) throw std::runtime_error("cannot write " + trials_path.string());
    out << "# coverlab-run v1\n";
    out << "# timestamp: " << utc_timestamp() << "\n";
    out << "# config: " << config_line << "\n";
    out << trial_csv_header() << "\n";
    std::uint64_t id = 0;
    for (std::size_t k : order) {
      TrialRecord r = slots[k].record;
      r.trial_id = ++id;
      out << trial_csv_row(r) << "\n";
    }
  }

  std::uint64_t correct = 0, max_mistakes = 0;
  std::vector<std::uint64_t> last_changes;
  for (const auto& slot : slots) {
    if (slot.record.stabilized_correct) ++correct;
    max_mistakes = std::max(max_mistakes, slot.record.mistakes);
    last_changes.push_back(slot.record.last_change);
  }
  std::sort(last_changes.begin(), last_changes.end());
  std::uint64_t median_last_change = last_changes[(last_changes.size() - 1) / 2];
  Rational fraction(static_cast<unsigned long>(correct),
                    static_cast<unsigned long>(slots.size()));
  fraction.canonicalize();

  std::filesystem::path summary_path = out_dir / "summary.json";
  {
    json s;
    s["config"] = json::parse(config_line);
    s["trials"] = slots.size();
    s["stabilized_correct_count"] = correct;
    s["stabilized_correct_fraction"] = to_fraction_string(fraction);
    s["stabilized_correct_value"] = fraction.get_d();
    s["median_last_change"] = median_last_change;  // lower median
    s["max_mistakes"] = max_mistakes;
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot write " + summary_path.string());
    out << s.dump(2) << "\n";
  }

  if (cfg.trace) {
    for (std::size_t k : order) {
      std::filesystem::path p = out_dir / ("trace_" + std::to_string(slots[k].record.seed) + ".csv");
      write_trace_file(p, slots[k].trace);
    }
  }

  log << "run: " << slots.size() << " trial(s), stabilized_correct "
      << to_fraction_string(fraction) << ", median last_change " << median_last_change
      << ", max mistakes " << max_mistakes << "\n";
  log << "wrote " << trials_path.string() << " and " << summary_path.string() << "\n";
  return 0;
}

namespace {

// Certified enclosure of the exact radius delta_n (before the dyadic
// over-approximation): L <= delta_n <= U with U - L <= 2^-(n+8). Independent
// of radius(); used to cross-check it.
void radius_enclosure(std::uint64_t n, const Rational& s_sq, const Rational& alpha, Rational& L,
                      Rational& U) {
  Rational floor_term = pow2(-static_cast<long>(n));
  if (n <= 3 || sgn(s_sq) == 0) {
    L = U = floor_term;
    return;
  }
  Rational one_plus_alpha = alpha + 1;
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(n) + 96;
  mpfr_t lo, hi, scratch;
  mpfr_init2(lo, prec);
  mpfr_init2(hi, prec);
  mpfr_init2(scratch, prec);
  auto eval = [&](mpfr_t out, mpfr_rnd_t rnd) {
    mpfr_set_ui(scratch, static_cast<unsigned long>(n), rnd);
    mpfr_log(scratch, scratch, rnd);
    mpfr_log(scratch, scratch, rnd);
    mpfr_mul_2ui(scratch, scratch, 1, rnd);
    mpfr_set_q(out, s_sq.get_mpq_t(), rnd);
    mpfr_mul(scratch, scratch, out, rnd);
    mpfr_div_ui(scratch, scratch, static_cast<unsigned long>(n), rnd);
    mpfr_sqrt(scratch, scratch, rnd);
    mpfr_set_q(out, one_plus_alpha.get_mpq_t(), rnd);
    mpfr_mul(out, out, scratch, rnd);
  };
  for (;;) {
    eval(lo, MPFR_RNDD);
    eval(hi, MPFR_RNDU);
    mpfr_sub(scratch, hi, lo, MPFR_RNDU);
    if (mpfr_zero_p(scratch) ||
        mpfr_get_exp(scratch) <= -static_cast<mpfr_exp_t>(n + 8))
      break;
    prec *= 2;
    mpfr_set_prec(lo, prec);
    mpfr_set_prec(hi, prec);
    mpfr_set_prec(scratch, prec);
  }
  mpfr_get_q(L.get_mpq_t(), lo);
  mpfr_get_q(U.get_mpq_t(), hi);
  L.canonicalize();
  U.canonicalize();
  mpfr_clear(lo);
  mpfr_clear(hi);
  mpfr_clear(scratch);
  if (L < floor_term) L = floor_term;
  if (U < floor_term) U = floor_term;
}

struct CheckLog {
  std::ostream& out;
  bool ok = true;
  void pass(const std::string& line) { out << "ok: " << line << "\n"; }
  void fail(const std::string& line) {
    out << "FAIL: " << line << "\n";
    ok = false;
  }
};

}  // namespace

int cmd_verify(const ExperimentConfig& cfg, const Registry& registry, std::ostream& log) {
  const VerifyConfig& v = cfg.verify;
  if (!v.inject_fault.empty() && v.inject_fault != "radius-under")
    throw ConfigError("unknown fault name: " + v.inject_fault);
  const bool fault_radius = (v.inject_fault == "radius-under");
  CheckLog check{log};

  // Radius contract: the returned delta_hat must land in
  // [delta_n, delta_n + 2^-n], checked against an independent enclosure.
  {
    const std::uint64_t ns[] = {1, 2, 3, 4, 10, 100, 1000, 4096, 65536};
    const Rational s2s[] = {Rational(0), Rational(1, 4), Rational(1), Rational(9, 2)};
    const Rational alphas[] = {Rational(1, 10), Rational(1, 2)};
    std::uint64_t cases = 0;
    bool section_ok = true;
    for (std::uint64_t n : ns)
      for (const Rational& s2 : s2s)
        for (const Rational& alpha : alphas) {
          Rational delta_hat = radius(n, s2, alpha);
          if (fault_radius) delta_hat /= 2;
          Rational L, U;
          radius_enclosure(n, s2, alpha, L, U);
          Rational budget = U + pow2(-static_cast<long>(n));
          ++cases;
          if (delta_hat < L || delta_hat > budget) {
            std::ostringstream msg;
            msg << "radius invariant violated at n=" << n << " s2=" << to_fraction_string(s2)
                << " alpha=" << to_fraction_string(alpha) << ": delta_hat="
                << to_fraction_string(delta_hat) << " outside [" << to_fraction_string(L) << ", "
                << to_fraction_string(budget) << "]";
            check.fail(msg.str());
            section_ok = false;
          }
        }
    if (section_ok)
      check.pass("radius contract (" + std::to_string(cases) + " cases)");
  }

  // Union measure bound, incrementally over k for each delta.
  {
    auto& cache = *registry.enumeration();
    bool section_ok = true;
    for (unsigned e = v.union_delta_min_exp; e <= v.union_delta_max_exp; ++e) {
      Rational delta = pow2(-static_cast<long>(e));
      std::uint64_t bad = union_measure_sweep_violation(v.union_k_max, delta, cache);
      if (bad != 0) {
        check.fail("union measure bound broken at k=" + std::to_string(bad) +
                   " delta=2^-" + std::to_string(e));
        section_ok = false;
      }
      Rational total = union_measure(v.union_k_max, delta, cache);
      if (total > Rational(static_cast<unsigned long>(2 * v.union_k_max)) * delta) {
        check.fail("union measure exceeds 2k*delta at delta=2^-" + std::to_string(e));
        section_ok = false;
      }
    }
    if (section_ok)
      check.pass("union measure bound (k<=" + std::to_string(v.union_k_max) + ", delta=2^-" +
                 std::to_string(v.union_delta_min_exp) + "..2^-" +
                 std::to_string(v.union_delta_max_exp) + ")");
  }

  // Summability partial sums.
  {
    Rational profile = cfg.distribution.variance();
    SummabilityReport rep = summability_report(cfg.identifier, v.summability_j, profile);
    bool section_ok = true;
    if (!(rep.eta_sum_lower <= rep.eta_sum_upper)) {
      check.fail("summability enclosure inverted");
      section_ok = false;
    }
    if (!rep.eta_bound_holds) {
      check.fail("eta sum exceeds c * comparison series");
      section_ok = false;
    }
    if (v.summability_j >= 2) {
      SummabilityReport half = summability_report(cfg.identifier, v.summability_j / 2, profile);
      if (!(half.eta_sum_upper <= rep.eta_sum_upper &&
            half.comparison_sum <= rep.comparison_sum)) {
        check.fail("summability partial sums not monotone in J");
        section_ok = false;
      }
    }
    if (section_ok) {
      std::ostringstream line;
      line << "summability (J=" << rep.J << ", eta sum <= " << rep.eta_sum_upper.get_d()
           << ", comparison " << rep.comparison_sum.get_d() << ", c="
           << to_fraction_string(rep.c_constant) << ")";
      check.pass(line.str());
    }
  }

  // Radius coverage table (statistical; reported, not gated).
  {
    DistributionSpec spec =
        DistributionSpec::two_point(Rational(0), Rational(1), Rational(1, 2));
    auto rows = lil_coverage(spec, v.coverage_seeds, v.coverage_horizon, cfg.identifier);
    bool section_ok = true;
    std::vector<std::uint64_t> lasts;
    for (const auto& row : rows) {
      lasts.push_back(row.last_violation);
      if (row.violations == 0 && row.last_violation != 0) {
        check.fail("coverage row with zero violations but nonzero last-violation time");
        section_ok = false;
      }
      if (row.last_violation > v.coverage_horizon) {
        check.fail("coverage last-violation past the horizon");
        section_ok = false;
      }
    }
    std::sort(lasts.begin(), lasts.end());
    if (section_ok) {
      std::ostringstream line;
      line << "radius coverage (seeds=" << rows.size() << ", horizon=" << v.coverage_horizon
           << "): last violation median " << lasts[(lasts.size() - 1) / 2] << ", max "
           << lasts.back();
      check.pass(line.str());
    }
  }

  // Necessity round-trip on both catalog sets: induced rows stabilize to the
  // index-set indicator, with no changes after the row's own decision time.
  {
    const auto& cache = registry.enumeration();
    for (const char* set_name : {"even-indices", "halting-catalog"}) {
      TargetSet set = registry.resolve_set(set_name);
      auto induced = induced_approximator_fast(cfg.identifier, cache, set.approximator,
                                               std::string("induced(") + set_name + ")");
      bool section_ok = true;
      for (std::uint64_t i = 1; i <= v.necessity_max_index; ++i) {
        std::uint64_t settle = decision_time(cfg.identifier, i);
        std::uint64_t stage_max = settle + v.necessity_window;
        int final_value = induced->approximate(i, stage_max);
        int expected = set.truth(i);
        auto changes = induced->change_stages(i, stage_max);
        std::uint64_t last_change = changes.empty() ? 0 : changes.back();
        if (final_value != expected || last_change > settle) {
          std::ostringstream msg;
          msg << "necessity round-trip failed for " << set_name << " at i=" << i << ": final "
              << final_value << " (expected " << expected << "), last change " << last_change
              << " (settle by " << settle << ")";
          check.fail(msg.str());
          section_ok = false;
        }
      }
      if (section_ok)
        check.pass(std::string("necessity round-trip (") + set_name + ", i<=" +
                   std::to_string(v.necessity_max_index) + ")");
    }
  }

  // Route equivalence: the stepwise induced approximator and the fast-forward
  // one must agree row by row.
  {
    const auto& cache = registry.enumeration();
    TargetSet set = registry.resolve_set("even-indices");
    IdentifierConfig id_cfg = cfg.identifier;
    auto approx = set.approximator;
    auto generic = induced_approximator(
        [id_cfg, cache, approx]() { return compose(id_cfg, cache, approx); }, cache,
        "induced-generic");
    auto fast = induced_approximator_fast(id_cfg, cache, approx, "induced-fast");
    bool section_ok = true;
    for (std::uint64_t i = 1; i <= v.equivalence_rows && section_ok; ++i) {
      auto cg = generic->change_stages(i, v.equivalence_stages);
      auto cf = fast->change_stages(i, v.equivalence_stages);
      if (cg != cf) {
        check.fail("induced route mismatch (change stages) at row " + std::to_string(i));
        section_ok = false;
        break;
      }
      for (std::uint64_t s : cg)
        if (generic->approximate(i, s) != fast->approximate(i, s)) {
          check.fail("induced route mismatch (values) at row " + std::to_string(i) + " stage " +
                     std::to_string(s));
          section_ok = false;
          break;
        }
      if (generic->approximate(i, v.equivalence_stages) !=
          fast->approximate(i, v.equivalence_stages)) {
        check.fail("induced route mismatch (final value) at row " + std::to_string(i));
        section_ok = false;
      }
    }
    if (section_ok)
      check.pass("induced-approximator route equivalence (rows<=" +
                 std::to_string(v.equivalence_rows) + ", stages<=" +
                 std::to_string(v.equivalence_stages) + ")");
  }

  log << (check.ok ? "verify: PASS" : "verify: FAIL") << "\n";
  return check.ok ? 0 : 1;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out_path,
               std::ostream& log) {
  if (files.empty()) throw ConfigError("report requires at least one input file");
  std::vector<TrialRecord> all;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) {
      log << "error: cannot read " << file << "\n";
      return 1;
    }
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#' || line == trial_csv_header()) continue;
      try {
        all.push_back(parse_trial_csv_row(line));
      } catch (const std::exception& e) {
        log << "error: " << file << ": " << e.what() << "\n";
        return 1;
      }
    }
  }
  if (all.empty()) {
    log << "error: no trial rows found\n";
    return 1;
  }

  std::map<std::tuple<std::string, std::string, std::uint64_t>, std::vector<const TrialRecord*>>
      groups;
  for (const auto& r : all) groups[{r.mu, r.set_name, r.horizon}].push_back(&r);

  std::ostringstream csv;
  csv << "mu,set_name,horizon,trials,stabilized_correct,fraction,median_last_change,"
         "max_mistakes\n";
  log << std::left << std::setw(24) << "mu" << std::setw(22) << "set" << std::setw(10) << "horizon"
      << std::setw(8) << "trials" << std::setw(12) << "fraction" << std::setw(14) << "median_chg"
      << "max_mistakes\n";
  for (const auto& [key, rows] : groups) {
    const auto& [mu, set_name, horizon] = key;
    std::uint64_t correct = 0, max_mistakes = 0;
    std::vector<std::uint64_t> lasts;
    for (const TrialRecord* r : rows) {
      if (r->stabilized_correct) ++correct;
      max_mistakes = std::max(max_mistakes, r->mistakes);
      lasts.push_back(r->last_change);
    }
    std::sort(lasts.begin(), lasts.end());
    std::uint64_t median = lasts[(lasts.size() - 1) / 2];
    Rational fraction(static_cast<unsigned long>(correct),
                      static_cast<unsigned long>(rows.size()));
    fraction.canonicalize();
    csv << mu << ',' << set_name << ',' << horizon << ',' << rows.size() << ',' << correct << ','
        << to_fraction_string(fraction) << ',' << median << ',' << max_mistakes << "\n";
    std::ostringstream frac;
    frac << correct << '/' << rows.size();
    log << std::left << std::setw(24) << mu << std::setw(22) << set_name << std::setw(10)
        << horizon << std::setw(8) << rows.size() << std::setw(12) << frac.str() << std::setw(14)
        << median << max_mistakes << "\n";
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) {
      log << "error: cannot write " << out_path << "\n";
      return 1;
    }
    out << csv.str();
    log << "wrote " << out_path << "\n";
  }
  return 0;
}

}  // namespace coverlab
