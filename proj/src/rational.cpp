#include "forge/rational.hpp"

#include <cstddef>
#include <stdexcept>

namespace forge {

Rational make_rational(long num, long den) {
  if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational rational_from_double(double x) {
  Rational q;
  mpq_set_d(q.get_mpq_t(), x);  // exact: doubles are dyadic rationals
  return q;
}

double to_double(const Rational& q) { return q.get_d(); }

Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rational_from_string: empty");
  const auto dot = s.find('.');
  if (dot != std::string::npos) {
    // Decimal literal: shift the point away and divide by the power of ten.
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    const std::size_t frac_len = s.size() - dot - 1;
    Integer num;
    if (num.set_str(digits, 10) != 0)
      throw std::invalid_argument("rational_from_string: bad decimal '" + s + "'");
    Integer den = 1;
    for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  Rational q;
  if (q.set_str(s, 10) != 0)
    throw std::invalid_argument("rational_from_string: bad rational '" + s + "'");
  if (q.get_den() == 0)
    throw std::invalid_argument("rational_from_string: zero denominator in '" + s + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Integer binomial(unsigned long n, unsigned long k) {
  Integer r;
  if (k > n) return 0;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

Integer multinomial(const std::vector<int>& parts) {
  unsigned long n = 0;
  for (int p : parts) {
    if (p < 0) throw std::invalid_argument("multinomial: negative part");
    n += static_cast<unsigned long>(p);
  }
  Integer r = 1;
  unsigned long used = 0;
  for (int p : parts) {
    used += static_cast<unsigned long>(p);
    r *= binomial(used, static_cast<unsigned long>(p));
  }
  (void)n;
  return r;
}

void canonicalize_rational_vector(std::vector<Rational>& v) {
  Integer den_lcm = 1;
  bool any = false;
  for (const auto& q : v) {
    if (q == 0) continue;
    any = true;
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den().get_mpz_t());
  }
  if (!any) return;
  Integer content = 0;
  std::vector<Integer> nums;
  nums.reserve(v.size());
  for (const auto& q : v) {
    Integer n = q.get_num() * (den_lcm / q.get_den());
    mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), n.get_mpz_t());
    nums.push_back(std::move(n));
  }
  // Leading (last nonzero) entry positive.
  for (std::size_t i = nums.size(); i-- > 0;) {
    if (nums[i] == 0) continue;
    if (nums[i] < 0) content = -content;
    break;
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = Rational(nums[i] / content);
}

}  // namespace forge
