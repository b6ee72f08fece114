#include "forge/polycore.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>

namespace forge {

namespace {

template <class T>
Matrix<T> veronese_lift_impl(const std::vector<std::vector<T>>& points, int degree) {
  if (points.empty()) throw std::invalid_argument("veronese_lift: no points");
  if (degree < 1) throw std::invalid_argument("veronese_lift: degree must be >= 1");
  const std::size_t d = points.front().size();
  if (d == 0) throw std::invalid_argument("veronese_lift: zero-dimensional points");
  for (const auto& p : points)
    if (p.size() != d) throw std::invalid_argument("veronese_lift: ragged point list");
  const MonomialBasis basis = MonomialBasis::build(static_cast<int>(d), degree);
  Matrix<T> m(points.size(), basis.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    // Power table: powers[j][p] = x_j^p for p <= degree.
    std::vector<std::vector<T>> powers(d);
    for (std::size_t j = 0; j < d; ++j) {
      powers[j].resize(static_cast<std::size_t>(degree) + 1, T(1));
      for (int p = 1; p <= degree; ++p) powers[j][p] = powers[j][p - 1] * points[i][j];
    }
    for (std::size_t c = 0; c < basis.size(); ++c) {
      T v(1);
      const MultiIndex& e = basis.exponents[c];
      for (std::size_t j = 0; j < d; ++j) v *= powers[j][e[j]];
      m.at(i, c) = v;
    }
  }
  return m;
}

// Reduced row echelon form in place; returns pivot column per pivot row.
std::vector<std::size_t> rref(MatQ& m) {
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < m.cols && row < m.rows; ++col) {
    std::size_t piv = row;
    while (piv < m.rows && m.at(piv, col) == 0) ++piv;
    if (piv == m.rows) continue;
    if (piv != row)
      for (std::size_t j = col; j < m.cols; ++j)
        std::swap(m.at(piv, j), m.at(row, j));
    const Rational inv = Rational(1) / m.at(row, col);
    for (std::size_t j = col; j < m.cols; ++j) m.at(row, j) *= inv;
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (i == row || m.at(i, col) == 0) continue;
      const Rational f = m.at(i, col);
      for (std::size_t j = col; j < m.cols; ++j) m.at(i, j) -= f * m.at(row, j);
    }
    pivot_cols.push_back(col);
    ++row;
  }
  return pivot_cols;
}

}  // namespace

MatQ veronese_lift(const std::vector<std::vector<Rational>>& points, int degree) {
  return veronese_lift_impl(points, degree);
}

MatD veronese_lift(const std::vector<std::vector<double>>& points, int degree) {
  return veronese_lift_impl(points, degree);
}

std::vector<std::vector<Rational>> nullspace(const MatQ& m) {
  if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("nullspace: empty matrix");
  MatQ r = m;
  const std::vector<std::size_t> pivot_cols = rref(r);
  std::vector<bool> is_pivot(m.cols, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;

  std::vector<std::vector<Rational>> kernel;
  for (std::size_t free_col = 0; free_col < m.cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rational> v(m.cols, Rational(0));
    v[free_col] = 1;
    for (std::size_t prow = 0; prow < pivot_cols.size(); ++prow)
      v[pivot_cols[prow]] = -r.at(prow, free_col);
    canonicalize_rational_vector(v);
    kernel.push_back(std::move(v));
  }
  return kernel;
}

std::size_t rank_exact(const MatQ& m) {
  if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("rank_exact: empty matrix");
  MatQ r = m;
  return rref(r).size();
}

FloatNullspace nullspace(const MatD& m, double rel_threshold) {
  if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("nullspace: empty matrix");
  if (rel_threshold <= 0.0)
    throw std::invalid_argument("nullspace: float mode needs a positive threshold");
  Eigen::MatrixXd a(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m.at(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd sigma = svd.singularValues();
  FloatNullspace out;
  out.singular_values.assign(sigma.data(), sigma.data() + sigma.size());
  const double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  out.threshold_abs = rel_threshold * smax;
  const Eigen::MatrixXd v = svd.matrixV();
  // Right singular vectors for sigma <= threshold, plus the columns beyond
  // rank(m can have more columns than rows) which have no singular value.
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    const bool below = j >= sigma.size() || sigma(j) <= out.threshold_abs;
    if (!below) continue;
    std::vector<double> vec(v.rows());
    for (Eigen::Index i = 0; i < v.rows(); ++i) vec[i] = v(i, j);
    // Deterministic sign: first entry of largest magnitude made positive.
    Eigen::Index lead = 0;
    for (Eigen::Index i = 1; i < v.rows(); ++i)
      if (std::abs(vec[i]) > std::abs(vec[lead])) lead = i;
    if (vec[lead] < 0)
      for (auto& x : vec) x = -x;
    out.basis.push_back(std::move(vec));
  }
  return out;
}

PolyQ poly_compose_expand(const PolyQ& r, const std::vector<PolyQ>& args,
                          std::size_t term_cap) {
  if (static_cast<int>(args.size()) != r.nvars())
    throw std::invalid_argument("poly_compose_expand: argument count mismatch");
  if (args.empty()) throw std::invalid_argument("poly_compose_expand: no arguments");
  const int k = args.front().nvars();
  for (const auto& a : args)
    if (a.nvars() != k)
      throw std::invalid_argument("poly_compose_expand: argument arity mismatch");

  // Memoized powers of each argument.
  std::vector<std::vector<PolyQ>> powers(args.size());
  for (std::size_t j = 0; j < args.size(); ++j)
    powers[j].push_back(PolyQ::constant(k, Rational(1)));
  const auto power = [&](std::size_t j, int e) -> const PolyQ& {
    while (static_cast<int>(powers[j].size()) <= e)
      powers[j].push_back(powers[j].back().multiply(args[j], term_cap));
    return powers[j][static_cast<std::size_t>(e)];
  };

  PolyQ out(k);
  for (const auto& [e, c] : r.terms()) {
    PolyQ term = PolyQ::constant(k, c);
    for (std::size_t j = 0; j < args.size(); ++j)
      if (e[j] > 0) term = term.multiply(power(j, e[j]), term_cap);
    out += term;
    if (term_cap != 0 && out.term_count() > term_cap)
      throw TermCapExceeded("poly_compose_expand: term cap exceeded");
  }
  return out;
}

UniPolyQ UniPolyQ::constant(const Rational& c) {
  UniPolyQ p;
  if (c != 0) p.coeffs.push_back(c);
  return p;
}

UniPolyQ UniPolyQ::from_coeffs(std::vector<Rational> c) {
  UniPolyQ p;
  p.coeffs = std::move(c);
  while (!p.coeffs.empty() && p.coeffs.back() == 0) p.coeffs.pop_back();
  return p;
}

Rational UniPolyQ::eval(const Rational& s) const {
  Rational v(0);
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * s + coeffs[k];
  return v;
}

double UniPolyQ::eval(double s) const {
  double v = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) v = v * s + to_double(coeffs[k]);
  return v;
}

UniPolyQ UniPolyQ::scale_arg(const Rational& c) const {
  std::vector<Rational> out(coeffs.size());
  Rational f(1);
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    out[k] = coeffs[k] * f;
    f *= c;
  }
  return from_coeffs(std::move(out));
}

UniPolyQ operator+(const UniPolyQ& a, const UniPolyQ& b) {
  std::vector<Rational> c(std::max(a.coeffs.size(), b.coeffs.size()), Rational(0));
  for (std::size_t k = 0; k < a.coeffs.size(); ++k) c[k] += a.coeffs[k];
  for (std::size_t k = 0; k < b.coeffs.size(); ++k) c[k] += b.coeffs[k];
  return UniPolyQ::from_coeffs(std::move(c));
}

UniPolyQ operator-(const UniPolyQ& a, const UniPolyQ& b) {
  std::vector<Rational> c(std::max(a.coeffs.size(), b.coeffs.size()), Rational(0));
  for (std::size_t k = 0; k < a.coeffs.size(); ++k) c[k] += a.coeffs[k];
  for (std::size_t k = 0; k < b.coeffs.size(); ++k) c[k] -= b.coeffs[k];
  return UniPolyQ::from_coeffs(std::move(c));
}

UniPolyQ operator*(const UniPolyQ& a, const UniPolyQ& b) {
  if (a.is_zero() || b.is_zero()) return UniPolyQ{};
  std::vector<Rational> c(a.coeffs.size() + b.coeffs.size() - 1, Rational(0));
  for (std::size_t i = 0; i < a.coeffs.size(); ++i)
    for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
  return UniPolyQ::from_coeffs(std::move(c));
}

UniPolyQ unipoly_pow(const UniPolyQ& a, unsigned k) {
  UniPolyQ r = UniPolyQ::constant(Rational(1));
  for (unsigned i = 0; i < k; ++i) r = r * a;
  return r;
}

}  // namespace forge
