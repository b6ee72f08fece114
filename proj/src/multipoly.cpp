#include "forge/multipoly.hpp"

#include <algorithm>

namespace forge {

int total_degree(const MultiIndex& e) {
  int d = 0;
  for (int v : e) d += v;
  return d;
}

bool monomial_less(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t j = a.size(); j-- > 0;)
    if (a[j] != b[j]) return a[j] < b[j];
  return false;
}

namespace {

void enumerate(int nvars, int remaining, int pos, MultiIndex& cur,
               std::vector<MultiIndex>& out) {
  if (pos == nvars - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int v = remaining; v >= 0; --v) {
    cur[pos] = v;
    enumerate(nvars, remaining - v, pos + 1, cur, out);
  }
}

}  // namespace

MonomialBasis MonomialBasis::build(int nvars, int degree) {
  if (nvars < 1) throw std::invalid_argument("MonomialBasis: nvars must be >= 1");
  if (degree < 0) throw std::invalid_argument("MonomialBasis: negative degree");
  MonomialBasis b;
  b.nvars = nvars;
  b.degree = degree;
  MultiIndex cur(static_cast<std::size_t>(nvars), 0);
  enumerate(nvars, degree, 0, cur, b.exponents);
  std::sort(b.exponents.begin(), b.exponents.end(), MonomialLess{});
  return b;
}

std::size_t MonomialBasis::index_of(const MultiIndex& e) const {
  const auto it =
      std::lower_bound(exponents.begin(), exponents.end(), e, MonomialLess{});
  if (it == exponents.end() || *it != e)
    throw std::out_of_range("MonomialBasis::index_of: monomial not in basis");
  return static_cast<std::size_t>(it - exponents.begin());
}

PolyD to_double_poly(const PolyQ& p) {
  PolyD r(p.nvars());
  for (const auto& [e, c] : p.terms()) r.add_term(e, to_double(c));
  return r;
}

PolyQ to_rational_poly(const PolyD& p) {
  PolyQ r(p.nvars());
  for (const auto& [e, c] : p.terms()) r.add_term(e, rational_from_double(c));
  return r;
}

std::vector<Rational> coefficients_in_basis(const PolyQ& p,
                                            const MonomialBasis& basis) {
  if (p.nvars() != basis.nvars)
    throw std::invalid_argument("coefficients_in_basis: arity mismatch");
  std::vector<Rational> out(basis.size(), Rational(0));
  for (const auto& [e, c] : p.terms()) out[basis.index_of(e)] = c;
  return out;
}

}  // namespace forge
