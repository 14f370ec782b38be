#include "coverlab/diagnostics.hpp"

#include <mpfr.h>

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "coverlab/radius.hpp"

namespace coverlab {

Rational union_measure(std::uint64_t k, const Rational& delta, EnumerationCache& cache) {
  if (k == 0) throw std::invalid_argument("union_measure: k must be >= 1");
  if (sgn(delta) <= 0) throw std::invalid_argument("union_measure: delta must be > 0");
  std::vector<Rational> centers;
  centers.reserve(k);
  for (std::uint64_t i = 1; i <= k; ++i) centers.push_back(cache.at(i));
  std::sort(centers.begin(), centers.end());
  Rational total(0);
  Rational cur_lo = centers[0] - delta;
  Rational cur_hi = centers[0] + delta;
  for (std::uint64_t i = 1; i < k; ++i) {
    Rational lo = centers[i] - delta;
    if (lo <= cur_hi) {
      Rational hi = centers[i] + delta;
      if (hi > cur_hi) cur_hi = hi;
    } else {
      total += cur_hi - cur_lo;
      cur_lo = lo;
      cur_hi = centers[i] + delta;
    }
  }
  total += cur_hi - cur_lo;
  return total;
}

std::uint64_t union_measure_sweep_violation(std::uint64_t k_max, const Rational& delta,
                                            EnumerationCache& cache) {
  if (k_max == 0) throw std::invalid_argument("union_measure_sweep_violation: k_max must be >= 1");
  if (sgn(delta) <= 0)
    throw std::invalid_argument("union_measure_sweep_violation: delta must be > 0");
  std::map<Rational, Rational> merged;  // disjoint intervals, start -> end
  Rational total(0);
  Rational bound(0);
  Rational two_delta = delta * 2;
  for (std::uint64_t i = 1; i <= k_max; ++i) {
    Rational lo = cache.at(i) - delta;
    Rational hi = cache.at(i) + delta;
    // absorb every stored interval that touches [lo, hi]
    auto it = merged.lower_bound(lo);
    if (it != merged.begin()) {
      auto prev = std::prev(it);
      if (prev->second >= lo) it = prev;
    }
    while (it != merged.end() && it->first <= hi) {
      if (it->first < lo) lo = it->first;
      if (it->second > hi) hi = it->second;
      total -= it->second - it->first;
      it = merged.erase(it);
    }
    merged.emplace(lo, hi);
    total += hi - lo;
    bound += two_delta;
    if (total > bound) return i;
  }
  return 0;
}

namespace {

// sum_{j=lo..hi} j^-e, exact, pairwise to keep intermediate fractions small
Rational sum_inv_pow(std::uint64_t lo, std::uint64_t hi, unsigned long e) {
  if (lo > hi) return Rational(0);
  if (lo == hi) {
    Integer b;
    mpz_ui_pow_ui(b.get_mpz_t(), static_cast<unsigned long>(lo), e);
    return Rational(Integer(1), b);
  }
  std::uint64_t mid = lo + (hi - lo) / 2;
  return sum_inv_pow(lo, mid, e) + sum_inv_pow(mid + 1, hi, e);
}

// Largest decision index whose time j^p stays under the exact-materialization
// threshold for eta terms.
std::uint64_t exact_term_count(std::uint64_t J, unsigned p, std::uint64_t n_cap) {
  std::uint64_t j = 0;
  while (j < J) {
    Integer next;
    mpz_ui_pow_ui(next.get_mpz_t(), static_cast<unsigned long>(j + 1), p);
    if (next > Integer(static_cast<unsigned long>(n_cap))) break;
    ++j;
  }
  return j;
}

}  // namespace

SummabilityReport summability_report(const IdentifierConfig& cfg, std::uint64_t J,
                                     const Rational& s_sq_profile) {
  if (J == 0) throw std::invalid_argument("summability_report: J must be >= 1");
  if (sgn(s_sq_profile) < 0)
    throw std::invalid_argument("summability_report: variance profile must be >= 0");
  cfg.validate();

  SummabilityReport rep;
  rep.J = J;
  rep.p = cfg.p;
  rep.kind = cfg.epsilon;
  rep.s_sq_profile = s_sq_profile;
  rep.comparison_sum = sum_inv_pow(1, J, cfg.p - 1);

  constexpr std::uint64_t kExactCap = 8192;  // materialize eta at n(j) <= this
  std::uint64_t j_exact = exact_term_count(J, cfg.p, kExactCap);

  Rational exact_part(0);
  for (std::uint64_t j = 1; j <= j_exact; ++j) {
    std::uint64_t nj = decision_time(cfg, j);
    exact_part += Rational(static_cast<unsigned long>(j)) * eta(cfg.epsilon, nj);
  }

  // Tail terms j > j_exact: j * eta_{j^p} = j^{1-p} * scale(j^p) with the
  // scale enclosed termwise. Dyadic schedule: scale = 1 - 2^{-n} in
  // (1 - 2^-64, 1) once n >= 64. Inverse-square schedule: scale = H2(n) in
  // [H2(m), H2(m) + 1/m] for any m <= n; m = kExactCap.
  Rational tail_zeta = sum_inv_pow(j_exact + 1, J, cfg.p - 1);
  Rational scale_lo, scale_hi;
  if (cfg.epsilon == EpsilonKind::Pow2) {
    scale_lo = 1 - pow2(-64);
    scale_hi = Rational(1);
    rep.c_constant = Rational(1);
  } else {
    Rational h2 = inv_square_sum(kExactCap);
    scale_lo = h2;
    scale_hi = h2 + Rational(1, static_cast<unsigned long>(kExactCap));
    rep.c_constant = Rational(2);  // H2(n) <= 2 - 1/n < 2 for every n
  }
  rep.eta_sum_lower = exact_part + scale_lo * tail_zeta;
  rep.eta_sum_upper = exact_part + scale_hi * tail_zeta;
  rep.eta_terms_exact = (j_exact >= J);
  if (rep.eta_terms_exact) rep.eta_sum_lower = rep.eta_sum_upper;
  rep.eta_bound_holds = (rep.eta_sum_upper <= rep.c_constant * rep.comparison_sum);

  // sum_j j * delta'_{n(j)} <= sum_j j*(lil upper + 2^{-n(j)}) + eta upper sum.
  // The 2^{-n} part: exact while n(j) <= 1024, then one lump that dominates
  // the whole remainder (J^2 * 2^-1025 < 2^-512 for any J below 2^256).
  Rational dyadic_part(0);
  std::uint64_t j_dyadic = exact_term_count(J, cfg.p, 1024);
  for (std::uint64_t j = 1; j <= j_dyadic; ++j)
    dyadic_part +=
        Rational(static_cast<unsigned long>(j)) * pow2(-static_cast<long>(decision_time(cfg, j)));
  if (j_dyadic < J) dyadic_part += pow2(-512);

  Rational lil_part(0);
  if (sgn(s_sq_profile) > 0) {
    for (std::uint64_t j = 1; j <= J; ++j) {
      Integer nj;
      mpz_ui_pow_ui(nj.get_mpz_t(), static_cast<unsigned long>(j), cfg.p);
      lil_part += Rational(static_cast<unsigned long>(j)) *
                  radius_upper(nj, s_sq_profile, cfg.alpha, 96);
    }
  }
  rep.delta_prime_sum_upper = lil_part + dyadic_part + rep.eta_sum_upper;

  std::ostringstream notes;
  notes << "partial sums to J=" << J << "; eta terms exact through j=" << j_exact
        << "; termwise bound eta_n <= c/n with c=" << to_fraction_string(rep.c_constant);
  rep.notes = notes.str();
  return rep;
}

std::vector<CoverageRow> lil_coverage(const DistributionSpec& spec,
                                      const std::vector<std::uint64_t>& seeds,
                                      std::uint64_t horizon, const IdentifierConfig& cfg) {
  if (spec.degenerate())
    throw std::invalid_argument("lil_coverage: distribution must have positive variance");
  if (!spec.rational_support())
    throw std::invalid_argument("lil_coverage: distribution must have rational support");
  if (horizon == 0) throw std::invalid_argument("lil_coverage: horizon must be >= 1");
  cfg.validate();

  const Rational mu = spec.mean_rational();
  const Rational one_plus_alpha = cfg.alpha + 1;
  std::vector<CoverageRow> rows;
  rows.reserve(seeds.size());

  // Per-step deciding d >= delta_hat exactly would force n-bit precision at
  // every n; instead bracket [radius floor, radius ceiling] cheaply and fall
  // back to the exact radius only when d lands inside the bracket.
  constexpr mpfr_prec_t kPrec = 128;
  mpfr_t lo, hi, scratch, floor_term;
  mpfr_init2(lo, kPrec);
  mpfr_init2(hi, kPrec);
  mpfr_init2(scratch, kPrec);
  mpfr_init2(floor_term, kPrec);

  auto lil_dir = [&](mpfr_t out, std::uint64_t n, const Rational& s_sq, mpfr_rnd_t rnd) {
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

  for (std::uint64_t seed : seeds) {
    ReadoutStream stream(spec, seed, cfg.epsilon);
    RunningStats stats;
    CoverageRow row;
    row.seed = seed;
    for (std::uint64_t n = 1; n <= horizon; ++n) {
      stats.add(stream.next_readout());
      Rational d = abs_rational(stats.mean() - mu);
      Rational s2 = stats.variance();
      bool violated;
      if (n <= 3 || sgn(s2) == 0) {
        violated = (d >= pow2(-static_cast<long>(n)));
      } else {
        mpfr_set_ui_2exp(floor_term, 1, -static_cast<mpfr_exp_t>(n), MPFR_RNDU);
        lil_dir(lo, n, s2, MPFR_RNDD);
        lil_dir(hi, n, s2, MPFR_RNDU);
        if (mpfr_cmp(lo, floor_term) < 0) mpfr_set(lo, floor_term, MPFR_RNDD);
        if (mpfr_cmp(hi, floor_term) < 0) mpfr_set(hi, floor_term, MPFR_RNDU);
        mpfr_add(hi, hi, floor_term, MPFR_RNDU);  // delta_hat <= delta + 2^-n
        if (mpfr_cmp_q(lo, d.get_mpq_t()) > 0) {
          violated = false;
        } else if (mpfr_cmp_q(hi, d.get_mpq_t()) <= 0) {
          violated = true;
        } else {
          violated = (d >= radius(n, s2, cfg.alpha));
        }
      }
      if (violated) {
        ++row.violations;
        row.last_violation = n;
      }
    }
    rows.push_back(row);
  }

  mpfr_clear(lo);
  mpfr_clear(hi);
  mpfr_clear(scratch);
  mpfr_clear(floor_term);
  return rows;
}

}  // namespace coverlab
