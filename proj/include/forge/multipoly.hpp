#pragma once

// Sparse multivariate polynomials over exact rationals or doubles, plus
// monomial enumeration in the fixed term order used throughout the library
// (lexicographic with the last variable taking highest priority).

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/rational.hpp"

namespace forge {

using MultiIndex = std::vector<int>;

int total_degree(const MultiIndex& e);

// Strict order: compares the last variable's exponent first, then the
// next-to-last, and so on; smaller exponent sorts earlier.
bool monomial_less(const MultiIndex& a, const MultiIndex& b);

struct MonomialLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const {
    return monomial_less(a, b);
  }
};

// All monomials of exact total degree `degree` in `nvars` variables,
// sorted by monomial_less. Size is C(nvars+degree-1, degree).
struct MonomialBasis {
  int nvars = 0;
  int degree = 0;
  std::vector<MultiIndex> exponents;

  static MonomialBasis build(int nvars, int degree);
  std::size_t size() const { return exponents.size(); }
  // Position of e in the basis; throws std::out_of_range if absent.
  std::size_t index_of(const MultiIndex& e) const;
};

struct TermCapExceeded : std::runtime_error {
  explicit TermCapExceeded(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
template <class T, class C>
T coeff_cast(const C& c);
template <>
inline double coeff_cast<double, double>(const double& c) { return c; }
template <>
inline double coeff_cast<double, Rational>(const Rational& c) { return to_double(c); }
template <>
inline Rational coeff_cast<Rational, Rational>(const Rational& c) { return c; }
template <>
inline Rational coeff_cast<Rational, double>(const double& c) {
  return rational_from_double(c);
}
}  // namespace detail

template <class C>
class MultiPoly {
 public:
  using TermMap = std::map<MultiIndex, C, MonomialLess>;

  MultiPoly() : nvars_(0) {}
  explicit MultiPoly(int nvars) : nvars_(nvars) {
    if (nvars < 0) throw std::invalid_argument("MultiPoly: negative nvars");
  }

  int nvars() const { return nvars_; }
  const TermMap& terms() const { return terms_; }

  bool operator==(const MultiPoly& o) const {
    return nvars_ == o.nvars_ && terms_ == o.terms_;
  }
  bool operator!=(const MultiPoly& o) const { return !(*this == o); }
  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }

  // Adds c * x^e; drops the term if the coefficient cancels to zero.
  void add_term(const MultiIndex& e, const C& c) {
    check_index(e);
    if (c == C(0)) return;
    auto it = terms_.find(e);
    if (it == terms_.end()) {
      terms_.emplace(e, c);
    } else {
      it->second += c;
      if (it->second == C(0)) terms_.erase(it);
    }
  }

  void set_term(const MultiIndex& e, const C& c) {
    check_index(e);
    if (c == C(0))
      terms_.erase(e);
    else
      terms_[e] = c;
  }

  C coefficient(const MultiIndex& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? C(0) : it->second;
  }

  // Max total degree over terms; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
    return d;
  }

  bool is_homogeneous() const {
    int d = -1;
    for (const auto& [e, c] : terms_) {
      const int t = total_degree(e);
      if (d < 0)
        d = t;
      else if (t != d)
        return false;
    }
    return true;
  }

  MultiPoly& operator+=(const MultiPoly& o) {
    require_same_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }
  MultiPoly& operator-=(const MultiPoly& o) {
    require_same_arity(o);
    for (const auto& [e, c] : o.terms_) add_term(e, C(0) - c);
    return *this;
  }
  friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
  friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }

  MultiPoly operator*(const MultiPoly& o) const { return multiply(o, 0); }

  // Product with a term-count cap (0 = unlimited); throws TermCapExceeded.
  MultiPoly multiply(const MultiPoly& o, std::size_t term_cap) const {
    require_same_arity(o);
    MultiPoly r(nvars_);
    MultiIndex e(static_cast<std::size_t>(nvars_), 0);
    for (const auto& [ea, ca] : terms_) {
      for (const auto& [eb, cb] : o.terms_) {
        for (int j = 0; j < nvars_; ++j) e[j] = ea[j] + eb[j];
        r.add_term(e, ca * cb);
        if (term_cap != 0 && r.terms_.size() > term_cap)
          throw TermCapExceeded("MultiPoly::multiply: term cap exceeded");
      }
    }
    return r;
  }

  MultiPoly scaled(const C& c) const {
    MultiPoly r(nvars_);
    if (c == C(0)) return r;
    for (const auto& [e, v] : terms_) r.terms_.emplace(e, v * c);
    return r;
  }

  MultiPoly pow(unsigned k, std::size_t term_cap = 0) const {
    MultiPoly r = constant(nvars_, C(1));
    for (unsigned i = 0; i < k; ++i) r = r.multiply(*this, term_cap);
    return r;
  }

  template <class T>
  T eval(const std::vector<T>& x) const {
    if (static_cast<int>(x.size()) != nvars_)
      throw std::invalid_argument("MultiPoly::eval: point arity mismatch");
    T total(0);
    for (const auto& [e, c] : terms_) {
      T term = detail::coeff_cast<T, C>(c);
      for (int j = 0; j < nvars_; ++j)
        for (int p = 0; p < e[j]; ++p) term *= x[j];
      total += term;
    }
    return total;
  }

  static MultiPoly constant(int nvars, const C& c) {
    MultiPoly r(nvars);
    r.add_term(MultiIndex(static_cast<std::size_t>(nvars), 0), c);
    return r;
  }

  static MultiPoly variable(int nvars, int j, const C& c = C(1)) {
    if (j < 0 || j >= nvars)
      throw std::invalid_argument("MultiPoly::variable: index out of range");
    MultiPoly r(nvars);
    MultiIndex e(static_cast<std::size_t>(nvars), 0);
    e[j] = 1;
    r.add_term(e, c);
    return r;
  }

  static MultiPoly monomial(int nvars, const MultiIndex& e, const C& c) {
    MultiPoly r(nvars);
    r.add_term(e, c);
    return r;
  }

 private:
  void check_index(const MultiIndex& e) const {
    if (static_cast<int>(e.size()) != nvars_)
      throw std::invalid_argument("MultiPoly: multi-index arity mismatch");
    for (int v : e)
      if (v < 0) throw std::invalid_argument("MultiPoly: negative exponent");
  }
  void require_same_arity(const MultiPoly& o) const {
    if (nvars_ != o.nvars_)
      throw std::invalid_argument("MultiPoly: arity mismatch between operands");
  }

  int nvars_;
  TermMap terms_;
};

using PolyQ = MultiPoly<Rational>;
using PolyD = MultiPoly<double>;

PolyD to_double_poly(const PolyQ& p);
PolyQ to_rational_poly(const PolyD& p);

// Coefficients of p with respect to MonomialBasis(p.nvars, degree); throws
// if p has a term outside that degree.
std::vector<Rational> coefficients_in_basis(const PolyQ& p, const MonomialBasis& basis);

}  // namespace forge
