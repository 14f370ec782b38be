#include "coverlab/enumeration.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace coverlab {

Rational calkin_wilf(const Integer& m) {
  if (m < 1) throw std::invalid_argument("calkin_wilf index must be >= 1");
  // Walk the bits of m below the leading one: 1 -> x+1, 0 -> x/(x+1).
  size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
  Rational x(1);
  for (size_t k = bits - 1; k-- > 0;) {
    if (mpz_tstbit(m.get_mpz_t(), k))
      x += 1;
    else
      x = x / (x + 1);
  }
  return x;
}

Rational enumerate(const Integer& i) {
  if (i < 1) throw std::invalid_argument("enumeration index must be >= 1");
  if (i == 1) return Rational(0);
  Integer half = i / 2;
  Rational c = calkin_wilf(half);
  return mpz_even_p(i.get_mpz_t()) ? c : Rational(-c);
}

Rational enumerate(std::uint64_t i) { return enumerate(Integer(static_cast<unsigned long>(i))); }

namespace {

// Calkin-Wilf index of a positive rational, by stripping continued-fraction
// runs (batched inverse steps; one big-integer op per CF coefficient).
Integer cw_index(Rational x) {
  Integer idx(1);
  std::vector<std::pair<Integer, bool>> runs;  // (count, bit) outermost-last
  while (x != 1) {
    if (x > 1) {
      // strip k "+1" steps (bit 1)
      Integer k;
      Integer num = x.get_num(), den = x.get_den();
      if (den == 1)
        k = num - 1;  // land exactly on 1
      else
        k = num / den;  // floor(x), lands in (0,1)
      runs.emplace_back(k, true);
      x -= Rational(k);
    } else {
      // strip k "x/(x+1)" steps (bit 0): predecessor y = x/(1-kx), smallest
      // k with y >= 1 is ceil(1/x - 1)
      Integer num = x.get_num(), den = x.get_den();
      Integer k = (den - num) / num;  // floor((1-x)/x)
      if ((den - num) % num != 0) k += 1;
      runs.emplace_back(k, false);
      x = x / (1 - Rational(k) * x);
    }
  }
  for (auto it = runs.rbegin(); it != runs.rend(); ++it) {
    unsigned long k = it->first.get_ui();
    if (!it->first.fits_ulong_p())
      throw std::overflow_error("calkin-wilf run length beyond addressable range");
    idx <<= k;
    if (it->second) idx += (Integer(1) << k) - 1;
  }
  return idx;
}

}  // namespace

Integer index_of(const Rational& q) {
  if (q == 0) return Integer(1);
  if (q > 0) return 2 * cw_index(q);
  return 2 * cw_index(-q) + 1;
}

const Rational& EnumerationCache::at(std::uint64_t i) {
  if (i == 0) throw std::invalid_argument("enumeration index must be >= 1");
  std::lock_guard<std::mutex> lock(m_mutex);
  while (m_values.size() < i) {
    std::uint64_t next = m_values.size() + 1;
    if (next == 1) {
      m_values.emplace_back(0);
    } else if ((next & 1) == 0) {
      m_values.push_back(calkin_wilf(Integer(static_cast<unsigned long>(next / 2))));
    } else {
      // -cw(m) mirrors the already-computed +cw(m) at index 2m
      m_values.push_back(-m_values[next / 2 * 2 - 1]);
    }
  }
  return m_values[i - 1];
}

}  // namespace coverlab
