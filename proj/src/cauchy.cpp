#include "coverlab/cauchy.hpp"

#include <stdexcept>
#include <utility>

namespace coverlab {

void nested_bounds(const CauchyPresentation& p, std::uint64_t j, std::uint64_t m,
                   Rational& lower, Rational& upper) {
  if (m == 0) throw std::invalid_argument("depth must be >= 1");
  p.bounds(j, 1, lower, upper);
  Rational lo, hi;
  for (std::uint64_t d = 2; d <= m; ++d) {
    p.bounds(j, d, lo, hi);
    if (lo > lower) lower = lo;
    if (hi < upper) upper = hi;
  }
}

bool certified_in(const CauchyPresentation& p, std::uint64_t j, const Rational& x,
                  const Rational& delta, std::uint64_t n) {
  if (delta <= 0) throw std::invalid_argument("delta must be > 0");
  if (n == 0) return false;
  Rational left = x - delta;
  Rational right = x + delta;
  Rational lower, upper, lo, hi;
  for (std::uint64_t m = 1; m <= n; ++m) {
    p.bounds(j, m, lo, hi);
    if (m == 1) {
      lower = lo;
      upper = hi;
    } else {
      if (lo > lower) lower = lo;
      if (hi < upper) upper = hi;
    }
    if (left < lower && upper < right) return true;
  }
  return false;
}

std::uint64_t bounded_least_index(const CauchyPresentation& p, std::uint64_t k, std::uint64_t n,
                                  const Rational& x, const Rational& delta) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  auto count = p.member_count();
  if (count.has_value() && *count < k) k = *count;
  for (std::uint64_t j = 1; j <= k; ++j)
    if (certified_in(p, j, x, delta, n)) return j;
  return 0;
}

namespace {

class RationalPresentation : public CauchyPresentation {
 public:
  explicit RationalPresentation(Rational q)
      : m_value(std::move(q)), m_name("rational:" + to_fraction_string(m_value)) {}

  const std::string& name() const override { return m_name; }
  std::optional<std::uint64_t> member_count() const override { return 1; }
  void bounds(std::uint64_t j, std::uint64_t m, Rational& lower, Rational& upper) const override {
    if (j != 1) throw std::out_of_range("member index out of range");
    if (m == 0) throw std::invalid_argument("depth must be >= 1");
    lower = m_value;
    upper = m_value;
  }

 private:
  Rational m_value;
  std::string m_name;
};

// Digit-by-digit dyadic sqrt: maintains a_m = floor(2^m * sqrt(d)) together
// with the defect rem_m = d*4^m - a_m^2 >= 0, so deepening never multiplies
// big integers: a_{m+1} = 2a_m (+1), rem via shifts and one subtraction.
class SqrtPresentation : public CauchyPresentation {
 public:
  SqrtPresentation(std::uint64_t d, std::uint64_t divisor) : m_d(d), m_divisor(divisor) {
    if (divisor == 0) throw std::invalid_argument("divisor must be >= 1");
    m_name = "sqrt" + std::to_string(d);
    if (divisor != 1) m_name += "/" + std::to_string(divisor);
    m_root = Integer(static_cast<unsigned long>(0));
    mpz_sqrt(m_root.get_mpz_t(), Integer(static_cast<unsigned long>(d)).get_mpz_t());
    m_rem = Integer(static_cast<unsigned long>(d)) - m_root * m_root;
    m_depth = 0;
  }

  const std::string& name() const override { return m_name; }
  std::optional<std::uint64_t> member_count() const override { return 1; }

  void bounds(std::uint64_t j, std::uint64_t m, Rational& lower, Rational& upper) const override {
    if (j != 1) throw std::out_of_range("member index out of range");
    if (m == 0) throw std::invalid_argument("depth must be >= 1");
    Integer a;
    {
      std::lock_guard<std::mutex> lock(m_mutex);
      extend(m);
      // floor(2^m*sqrt(d)) from the deeper cached root: shifting floors exactly,
      // so the answer depends on m alone, not on how deep the cache happens to be.
      a = m_root >> static_cast<unsigned long>(m_depth - m);
    }
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, static_cast<unsigned long>(m));
    den *= Integer(static_cast<unsigned long>(m_divisor));
    lower = Rational(a, den);
    lower.canonicalize();
    upper = Rational(a + 1, den);
    upper.canonicalize();
  }

 private:
  void extend(std::uint64_t m) const {
    while (m_depth < m) {
      // invariant: rem = d*4^depth - root^2, 0 <= rem <= 2*root
      m_root <<= 1;
      m_rem <<= 2;
      Integer trial = (m_root << 1) + 1;
      if (m_rem >= trial) {
        m_rem -= trial;
        m_root += 1;
      }
      ++m_depth;
    }
  }

  std::uint64_t m_d;
  std::uint64_t m_divisor;
  std::string m_name;
  mutable std::mutex m_mutex;
  mutable Integer m_root;
  mutable Integer m_rem;
  mutable std::uint64_t m_depth;
};

class EPresentation : public CauchyPresentation {
 public:
  EPresentation() : m_name("e") {
    m_partials.push_back(Rational(1));  // S_0 = 1/0!
    m_partials.push_back(Rational(2));  // S_1
    m_factorials.push_back(Integer(1));
    m_factorials.push_back(Integer(1));
  }

  const std::string& name() const override { return m_name; }
  std::optional<std::uint64_t> member_count() const override { return 1; }

  void bounds(std::uint64_t j, std::uint64_t m, Rational& lower, Rational& upper) const override {
    if (j != 1) throw std::out_of_range("member index out of range");
    if (m == 0) throw std::invalid_argument("depth must be >= 1");
    // least M with tail bound 2/(M+1)! <= 2^{-m}; a pure function of m, so the
    // returned interval never depends on what deeper queries already cached.
    Rational budget = pow2(-static_cast<long>(m));
    std::lock_guard<std::mutex> lock(m_mutex);
    std::size_t M = 0;
    while (true) {
      while (M + 1 >= m_factorials.size()) grow();
      Rational tail(Integer(2), m_factorials[M + 1]);
      tail.canonicalize();
      if (tail <= budget) {
        lower = m_partials[M];
        upper = m_partials[M] + tail;
        return;
      }
      ++M;
    }
  }

 private:
  void grow() const {
    std::size_t k = m_factorials.size();  // next index
    m_factorials.push_back(m_factorials[k - 1] * Integer(static_cast<unsigned long>(k)));
    Rational term(Integer(1), m_factorials[k]);
    term.canonicalize();
    m_partials.push_back(m_partials[k - 1] + term);
  }

  std::string m_name;
  mutable std::mutex m_mutex;
  mutable std::vector<Rational> m_partials;    // m_partials[k] = sum_{i<=k} 1/i!
  mutable std::vector<Integer> m_factorials;   // m_factorials[k] = k!
};

class ListPresentation : public CauchyPresentation {
 public:
  ListPresentation(std::string name, std::vector<std::shared_ptr<CauchyPresentation>> members)
      : m_name(std::move(name)), m_members(std::move(members)) {
    if (m_members.empty()) throw std::invalid_argument("empty presentation list");
    for (const auto& p : m_members)
      if (!p || p->member_count() != std::optional<std::uint64_t>(1))
        throw std::invalid_argument("list entries must be single-member presentations");
  }

  const std::string& name() const override { return m_name; }
  std::optional<std::uint64_t> member_count() const override { return m_members.size(); }
  void bounds(std::uint64_t j, std::uint64_t m, Rational& lower, Rational& upper) const override {
    if (j == 0 || j > m_members.size()) throw std::out_of_range("member index out of range");
    m_members[j - 1]->bounds(1, m, lower, upper);
  }

 private:
  std::string m_name;
  std::vector<std::shared_ptr<CauchyPresentation>> m_members;
};

}  // namespace

std::shared_ptr<CauchyPresentation> make_rational_presentation(const Rational& q) {
  return std::make_shared<RationalPresentation>(q);
}

std::shared_ptr<CauchyPresentation> make_sqrt_presentation(std::uint64_t d,
                                                           std::uint64_t divisor) {
  return std::make_shared<SqrtPresentation>(d, divisor);
}

std::shared_ptr<CauchyPresentation> make_e_presentation() {
  return std::make_shared<EPresentation>();
}

std::shared_ptr<CauchyPresentation> make_list_presentation(
    std::string name, std::vector<std::shared_ptr<CauchyPresentation>> members) {
  return std::make_shared<ListPresentation>(std::move(name), std::move(members));
}

}  // namespace coverlab
