#include "coverlab/rational.hpp"

#include <stdexcept>

namespace coverlab {

Rational pow2(long e) {
  Rational r;
  if (e >= 0) {
    mpq_set_z(r.get_mpq_t(), Integer(Integer(1) << static_cast<unsigned long>(e)).get_mpz_t());
  } else {
    Integer den = Integer(1) << static_cast<unsigned long>(-e);
    r = Rational(1, den);
  }
  return r;
}

Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational literal");
  Rational q;
  if (mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
    throw std::invalid_argument("malformed rational literal: " + text);
  if (mpz_sgn(mpq_denref(q.get_mpq_t())) == 0)
    throw std::invalid_argument("zero denominator: " + text);
  q.canonicalize();
  return q;
}

std::string to_fraction_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational abs_rational(const Rational& q) { return q < 0 ? Rational(-q) : q; }

bool is_dyadic(const Rational& q, unsigned long* exponent_out) {
  const Integer& den = q.get_den();
  // canonical => den >= 1; power of two iff popcount == 1
  if (mpz_popcount(den.get_mpz_t()) != 1) return false;
  if (exponent_out) *exponent_out = mpz_scan1(den.get_mpz_t(), 0);
  return true;
}

long floor_log2(const Rational& q) {
  if (sgn(q) <= 0) throw std::invalid_argument("floor_log2 needs q > 0");
  const Integer& num = q.get_num();
  const Integer& den = q.get_den();
  long bn = static_cast<long>(mpz_sizeinbase(num.get_mpz_t(), 2));
  long bd = static_cast<long>(mpz_sizeinbase(den.get_mpz_t(), 2));
  long e = bn - bd;  // 2^e <= q < 2^(e+2); refine
  // q >= 2^(e+1) iff num >= den << (e+1)
  Integer shifted;
  if (e + 1 >= 0)
    shifted = den << static_cast<unsigned long>(e + 1);
  else
    shifted = den >> static_cast<unsigned long>(-(e + 1));
  if (num >= shifted) return e + 1;
  // q >= 2^e iff num >= den << e
  if (e >= 0)
    shifted = den << static_cast<unsigned long>(e);
  else {
    // compare num * 2^-e >= den
    shifted = num << static_cast<unsigned long>(-e);
    return shifted >= den ? e : e - 1;
  }
  return num >= shifted ? e : e - 1;
}

Rational dyadic_to_rational(const Integer& num, unsigned long exp) {
  Rational r(num, Integer(1) << exp);
  r.canonicalize();
  return r;
}

}  // namespace coverlab
