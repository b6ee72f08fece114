#pragma once

// Veronese lifts, kernel computation (exact rational elimination and
// float SVD with thresholding), and exact polynomial composition. This is
// the linear-algebra substrate for every vanishing-polynomial search.

#include <cstddef>
#include <optional>
#include <vector>

#include "forge/multipoly.hpp"
#include "forge/rational.hpp"

namespace forge {

template <class T>
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, T(0)) {}

  T& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const T& at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
};

using MatQ = Matrix<Rational>;
using MatD = Matrix<double>;

// Rows = points, columns = MonomialBasis(d, degree) monomials evaluated at
// the points. degree >= 1 (a constant column is useless for variety search).
MatQ veronese_lift(const std::vector<std::vector<Rational>>& points, int degree);
MatD veronese_lift(const std::vector<std::vector<double>>& points, int degree);

// Exact kernel basis via fraction-free-ish Gauss-Jordan over the rationals.
// Vectors come back canonicalized: integer entries, content 1, first
// nonzero entry positive. Empty result = trivial kernel.
std::vector<std::vector<Rational>> nullspace(const MatQ& m);

std::size_t rank_exact(const MatQ& m);

struct FloatNullspace {
  std::vector<std::vector<double>> basis;  // right singular vectors kept
  std::vector<double> singular_values;     // all of them, descending
  double threshold_abs = 0.0;              // threshold * largest singular value
};

// Float kernel: right singular vectors whose singular value is at most
// rel_threshold times the largest one. rel_threshold must be > 0.
FloatNullspace nullspace(const MatD& m, double rel_threshold);

// Exact expansion of r(args[0], ..., args[N-1]); r has N variables, every
// argument the same arity k. term_cap = 0 means unlimited; otherwise
// TermCapExceeded is thrown when any intermediate exceeds the cap.
PolyQ poly_compose_expand(const PolyQ& r, const std::vector<PolyQ>& args,
                          std::size_t term_cap = 0);

// Univariate polynomials with rational coefficients (ascending powers),
// used by the rational-transform curve families.
struct UniPolyQ {
  std::vector<Rational> coeffs;  // coeffs[k] multiplies s^k; no trailing zeros

  static UniPolyQ constant(const Rational& c);
  static UniPolyQ from_coeffs(std::vector<Rational> c);
  bool is_zero() const { return coeffs.empty(); }
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
  Rational eval(const Rational& s) const;
  double eval(double s) const;
  // Substitutes s -> c*s (rescales the argument).
  UniPolyQ scale_arg(const Rational& c) const;
};

UniPolyQ operator+(const UniPolyQ& a, const UniPolyQ& b);
UniPolyQ operator-(const UniPolyQ& a, const UniPolyQ& b);
UniPolyQ operator*(const UniPolyQ& a, const UniPolyQ& b);
UniPolyQ unipoly_pow(const UniPolyQ& a, unsigned k);

}  // namespace forge
