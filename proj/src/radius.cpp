#include "coverlab/radius.hpp"

#include <mpfr.h>

#include <stdexcept>

namespace coverlab {

namespace {

// One directed evaluation of (1+alpha)*sqrt(2*s_sq*loglog(n)/n) at the given
// precision. rnd must be MPFR_RNDU or MPFR_RNDD; every intermediate is rounded
// the same way, and the expression is monotone in each intermediate, so the
// result brackets the exact value from that side.
void lil_term(mpfr_t out, const Integer& n, const Rational& s_sq, const Rational& alpha,
              mpfr_prec_t prec, mpfr_rnd_t rnd) {
  mpfr_t t;
  mpfr_init2(t, prec);
  mpfr_set_prec(out, prec);
  mpfr_set_z(t, n.get_mpz_t(), rnd);
  mpfr_log(t, t, rnd);   // ln n > 1 for n >= 4
  mpfr_log(t, t, rnd);   // ln ln n > 0 for n >= 4
  mpfr_mul_2ui(t, t, 1, rnd);
  mpfr_set_q(out, s_sq.get_mpq_t(), rnd);
  mpfr_mul(t, t, out, rnd);
  mpfr_set_z(out, n.get_mpz_t(), rnd == MPFR_RNDU ? MPFR_RNDD : MPFR_RNDU);
  mpfr_div(t, t, out, rnd);
  mpfr_sqrt(t, t, rnd);
  Rational one_plus = alpha + 1;
  mpfr_set_q(out, one_plus.get_mpq_t(), rnd);
  mpfr_mul(out, out, t, rnd);
  mpfr_clear(t);
}

Rational mpfr_to_rational(mpfr_t x) {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x);
  q.canonicalize();
  return q;
}

}  // namespace

Rational radius(std::uint64_t n, const Rational& s_sq, const Rational& alpha) {
  if (n == 0) throw std::invalid_argument("radius: n must be >= 1");
  if (sgn(s_sq) < 0) throw std::invalid_argument("radius: s_sq must be >= 0");
  if (sgn(alpha) <= 0) throw std::invalid_argument("radius: alpha must be > 0");
  Rational floor_term = pow2(-static_cast<long>(n));
  if (n <= 3 || sgn(s_sq) == 0) return floor_term;

  Integer nz(static_cast<unsigned long>(n));
  // Start a little above the 2^-n width budget; the loop doubles on a miss.
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(n) + 64;
  if (sgn(s_sq) > 0 && s_sq > 1)
    prec += static_cast<mpfr_prec_t>(mpz_sizeinbase(s_sq.get_num().get_mpz_t(), 2));
  mpfr_t up, down;
  mpfr_init2(up, prec);
  mpfr_init2(down, prec);
  for (;;) {
    lil_term(up, nz, s_sq, alpha, prec, MPFR_RNDU);
    lil_term(down, nz, s_sq, alpha, prec, MPFR_RNDD);
    mpfr_sub(down, up, down, MPFR_RNDU);
    // width < 2^-n iff its exponent is <= -n (value in [2^(e-1), 2^e))
    if (mpfr_zero_p(down) || mpfr_get_exp(down) <= -static_cast<mpfr_exp_t>(n)) break;
    prec *= 2;
  }
  Rational result = mpfr_to_rational(up);
  mpfr_clear(up);
  mpfr_clear(down);
  if (result < floor_term) return floor_term;
  return result;
}

Rational radius_upper(const Integer& n, const Rational& s_sq, const Rational& alpha,
                      unsigned long prec_bits) {
  if (n < 1) throw std::invalid_argument("radius_upper: n must be >= 1");
  if (sgn(s_sq) < 0) throw std::invalid_argument("radius_upper: s_sq must be >= 0");
  bool lil_zero = (n <= 3 || sgn(s_sq) == 0);
  if (!lil_zero) {
    mpfr_t up;
    mpfr_init2(up, prec_bits);
    lil_term(up, n, s_sq, alpha, static_cast<mpfr_prec_t>(prec_bits), MPFR_RNDU);
    mpfr_exp_t e = mpfr_get_exp(up);
    Rational result = mpfr_to_rational(up);
    mpfr_clear(up);
    // The upper bound dominates max(lil, 2^-n) as soon as it is >= 2^-n.
    if (n > Integer(static_cast<unsigned long>(e < 0 ? -e : 0))) return result;
    if (!n.fits_ulong_p())
      throw std::domain_error("radius_upper: floor term dominates at non-materializable n");
    Rational floor_term = pow2(-static_cast<long>(n.get_ui()));
    return result > floor_term ? result : floor_term;
  }
  if (!n.fits_ulong_p())
    throw std::domain_error("radius_upper: floor term dominates at non-materializable n");
  return pow2(-static_cast<long>(n.get_ui()));
}

}  // namespace coverlab
