#include <doctest.h>

#include <cmath>
#include <vector>

#include "forge/multipoly.hpp"
#include "forge/polycore.hpp"
#include "forge/rational.hpp"
#include "forge/rng.hpp"

using namespace forge;

namespace {

PolyQ conic_witness() {
  // x0*x2 - x1^2
  PolyQ p(3);
  p.add_term({1, 0, 1}, Rational(1));
  p.add_term({0, 2, 0}, Rational(-1));
  return p;
}

std::vector<std::vector<Rational>> conic_samples(int from, int count) {
  std::vector<std::vector<Rational>> pts;
  for (int k = 0; k < count; ++k) {
    Rational y(from + k);
    pts.push_back({Rational(1), y, y * y});
  }
  return pts;
}

}  // namespace

TEST_SUITE("polycore") {

TEST_CASE("rational helpers") {
  CHECK(to_string(rational_from_string("3/6")) == "1/2");
  CHECK(to_string(rational_from_string("-0.25")) == "-1/4");
  CHECK(rational_from_string("7") == Rational(7));
  CHECK_THROWS(rational_from_string("1/0"));
  CHECK_THROWS(rational_from_string("abc"));
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(0.1) != Rational(1, 10));  // 0.1 is not dyadic

  CHECK(binomial(29, 15) == Integer("77558760"));
  CHECK(binomial(4, 2) == 6);
  CHECK(multinomial({1, 2}) == 3);
  CHECK(multinomial({2, 2, 2}) == 90);

  std::vector<Rational> v{Rational(1, 2), Rational(-1, 3)};
  canonicalize_rational_vector(v);
  CHECK(v[0] == Rational(-3));
  CHECK(v[1] == Rational(2));  // leading entry positive
}

TEST_CASE("rng is deterministic and substreams differ") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c = Rng(42).substream(1);
  Rng d = Rng(42).substream(2);
  CHECK(c.next_u64() != d.next_u64());
  Rng u(7);
  for (int i = 0; i < 1000; ++i) {
    const double x = u.uniform01();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
  // Seeded moments stay in loose bounds (stream is fixed, so this is stable).
  Rng g(11);
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) mean += g.normal();
  mean /= 20000;
  CHECK(std::abs(mean) < 0.03);
  Rng p(13);
  double pm = 0.0;
  for (int i = 0; i < 20000; ++i) pm += static_cast<double>(p.poisson(3.0));
  pm /= 20000;
  CHECK(pm == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("monomial order matches the fixed convention") {
  const MonomialBasis b = MonomialBasis::build(3, 2);
  const std::vector<MultiIndex> expected = {{2, 0, 0}, {1, 1, 0}, {0, 2, 0},
                                            {1, 0, 1}, {0, 1, 1}, {0, 0, 2}};
  REQUIRE(b.exponents == expected);
  for (std::size_t i = 0; i < expected.size(); ++i)
    CHECK(b.index_of(expected[i]) == i);
}

TEST_CASE("monomial basis size matches the binomial formula") {
  for (int n = 1; n <= 6; ++n)
    for (int d = 0; d <= 8; ++d) {
      const MonomialBasis b = MonomialBasis::build(n, d);
      CHECK(Integer(static_cast<long>(b.size())) ==
            binomial(static_cast<unsigned long>(n + d - 1),
                     static_cast<unsigned long>(d)));
      for (const auto& e : b.exponents) CHECK(total_degree(e) == d);
    }
}

TEST_CASE("veronese lift basic rows") {
  std::vector<std::vector<Rational>> pts{{Rational(1), Rational(0)},
                                         {Rational(0), Rational(1)}};
  const MatQ id = veronese_lift(pts, 1);
  REQUIRE(id.rows == 2);
  REQUIRE(id.cols == 2);
  CHECK(id.at(0, 0) == 1);
  CHECK(id.at(0, 1) == 0);
  CHECK(id.at(1, 0) == 0);
  CHECK(id.at(1, 1) == 1);

  const MatQ row = veronese_lift({{Rational(2), Rational(3)}}, 2);
  REQUIRE(row.cols == 3);
  CHECK(row.at(0, 0) == 4);
  CHECK(row.at(0, 1) == 6);
  CHECK(row.at(0, 2) == 9);

  CHECK_THROWS(veronese_lift(pts, 0));
  CHECK_THROWS(veronese_lift(std::vector<std::vector<Rational>>{}, 1));
}

TEST_CASE("conic samples have rank 5 and the expected kernel") {
  const MatQ m = veronese_lift(conic_samples(1, 6), 2);
  REQUIRE(m.cols == 6);
  CHECK(rank_exact(m) == 5);

  const auto kernel = nullspace(m);
  REQUIRE(kernel.size() == 1);
  const MonomialBasis b = MonomialBasis::build(3, 2);
  const auto witness = coefficients_in_basis(conic_witness(), b);
  CHECK(kernel[0] == witness);  // canonical form is exactly x0*x2 - x1^2

  // Exact vanishing on fresh samples.
  for (const auto& pt : conic_samples(7, 10)) {
    Rational v(0);
    const MatQ lift = veronese_lift({pt}, 2);
    for (std::size_t j = 0; j < lift.cols; ++j) v += lift.at(0, j) * kernel[0][j];
    CHECK(v == 0);
  }
}

TEST_CASE("twisted cubic samples give a 3-dimensional degree-2 kernel") {
  std::vector<std::vector<Rational>> pts;
  for (int k = 1; k <= 12; ++k) {
    const Rational y = make_rational(k, 3);
    pts.push_back({Rational(1), y, y * y, y * y * y});
  }
  const MatQ m = veronese_lift(pts, 2);
  REQUIRE(m.cols == 10);
  CHECK(rank_exact(m) == 7);
  const auto kernel = nullspace(m);
  REQUIRE(kernel.size() == 3);
  for (const auto& v : kernel) {
    for (const auto& pt : pts) {
      const MatQ lift = veronese_lift({pt}, 2);
      Rational s(0);
      for (std::size_t j = 0; j < lift.cols; ++j) s += lift.at(0, j) * v[j];
      CHECK(s == 0);
    }
  }
}

TEST_CASE("exact nullspace on simple matrices") {
  MatQ id(3, 3);
  for (int i = 0; i < 3; ++i) id.at(i, i) = 1;
  CHECK(nullspace(id).empty());

  MatQ dup(2, 3);
  dup.at(0, 0) = 1; dup.at(0, 1) = 1; dup.at(0, 2) = -2;
  dup.at(1, 0) = 1; dup.at(1, 1) = 1; dup.at(1, 2) = -2;
  const auto k = nullspace(dup);
  REQUIRE(k.size() == 2);
  const auto in_kernel = [&](std::vector<Rational> v) {
    for (std::size_t i = 0; i < 2; ++i) {
      Rational s(0);
      for (std::size_t j = 0; j < 3; ++j) s += dup.at(i, j) * v[j];
      if (s != 0) return false;
    }
    return true;
  };
  CHECK(in_kernel({Rational(2), Rational(0), Rational(1)}));
  CHECK(in_kernel({Rational(0), Rational(2), Rational(1)}));

  CHECK_THROWS(nullspace(MatQ{}));
}

TEST_CASE("float nullspace finds the conic witness") {
  std::vector<std::vector<double>> pts;
  for (int k = 1; k <= 24; ++k) {
    const double y = 0.15 * k - 1.9;
    pts.push_back({1.0, y, y * y});
  }
  const MatD m = veronese_lift(pts, 2);
  const FloatNullspace ns = nullspace(m, 1e-9);
  REQUIRE(ns.basis.size() == 1);
  REQUIRE(ns.singular_values.size() == 6);
  for (std::size_t i = 1; i < ns.singular_values.size(); ++i)
    CHECK(ns.singular_values[i - 1] >= ns.singular_values[i]);
  // Residual of the kernel vector against the matrix.
  double max_resid = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += m.at(i, j) * ns.basis[0][j];
    max_resid = std::max(max_resid, std::abs(s));
  }
  CHECK(max_resid <= ns.singular_values[0] * 1e-9);
  // Direction matches x0*x2 - x1^2 up to scale.
  const std::vector<double> w = {0, 0, -1, 1, 0, 0};
  double dot = 0.0, nw = 0.0, nv = 0.0;
  for (std::size_t j = 0; j < 6; ++j) {
    dot += w[j] * ns.basis[0][j];
    nw += w[j] * w[j];
    nv += ns.basis[0][j] * ns.basis[0][j];
  }
  CHECK(std::abs(dot) / std::sqrt(nw * nv) == doctest::Approx(1.0).epsilon(1e-9));

  MatD idm(3, 3);
  for (int i = 0; i < 3; ++i) idm.at(i, i) = 1.0;
  CHECK(nullspace(idm, 1e-9).basis.empty());
  CHECK_THROWS(nullspace(idm, 0.0));
}

TEST_CASE("poly_compose_expand") {
  // r = x0*x2 - x1^2 at (1, y, y^2) -> 0
  PolyQ one = PolyQ::constant(1, Rational(1));
  PolyQ y = PolyQ::variable(1, 0);
  const PolyQ zero = poly_compose_expand(conic_witness(), {one, y, y * y});
  CHECK(zero.is_zero());

  // r = x0 + x1 at (s, t) -> s + t
  PolyQ sum(2);
  sum.add_term({1, 0}, Rational(1));
  sum.add_term({0, 1}, Rational(1));
  PolyQ s = PolyQ::variable(2, 0), t = PolyQ::variable(2, 1);
  const PolyQ st = poly_compose_expand(sum, {s, t});
  CHECK(st.coefficient({1, 0}) == 1);
  CHECK(st.coefficient({0, 1}) == 1);
  CHECK(st.term_count() == 2);

  // r = x0^2 at (y + 1) -> y^2 + 2y + 1
  PolyQ sq(1);
  sq.add_term({2}, Rational(1));
  PolyQ yp1 = PolyQ::variable(1, 0) + PolyQ::constant(1, Rational(1));
  const PolyQ expanded = poly_compose_expand(sq, {yp1});
  CHECK(expanded.coefficient({0}) == 1);
  CHECK(expanded.coefficient({1}) == 2);
  CHECK(expanded.coefficient({2}) == 1);

  CHECK_THROWS_AS(poly_compose_expand(sum, {s}), std::invalid_argument);
  CHECK_THROWS_AS(poly_compose_expand(sq, {yp1}, 2), TermCapExceeded);
}

TEST_CASE("homogeneous scaling identity") {
  Rng rng(2024);
  // Exact: random homogeneous degree-3 polynomial in 3 variables.
  PolyQ p(3);
  const MonomialBasis b = MonomialBasis::build(3, 3);
  for (const auto& e : b.exponents)
    p.add_term(e, Rational(static_cast<long>(rng.uniform_index(19)) - 9));
  REQUIRE(p.is_homogeneous());
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> x;
    for (int j = 0; j < 3; ++j)
      x.push_back(make_rational(static_cast<long>(rng.uniform_index(21)) - 10, 7));
    const Rational c = make_rational(static_cast<long>(rng.uniform_index(9)) + 1, 3);
    std::vector<Rational> cx;
    for (const auto& v : x) cx.push_back(c * v);
    CHECK(p.eval(cx) == c * c * c * p.eval(x));
  }
  // Float: 1000 random points, relative tolerance 1e-10.
  const PolyD pd = to_double_poly(p);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> x{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
    const double c = rng.uniform(0.1, 3.0);
    std::vector<double> cx{c * x[0], c * x[1], c * x[2]};
    const double lhs = pd.eval(cx);
    const double rhs = c * c * c * pd.eval(x);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-30});
    CHECK(std::abs(lhs - rhs) / scale <= 1e-10);
  }
}

TEST_CASE("multipoly invariants") {
  PolyQ p(2);
  p.add_term({1, 1}, Rational(2));
  p.add_term({1, 1}, Rational(-2));
  CHECK(p.is_zero());  // cancelled coefficients are not stored
  p.add_term({2, 0}, Rational(1));
  CHECK(p.degree() == 2);
  CHECK(p.is_homogeneous());
  p.add_term({0, 1}, Rational(1));
  CHECK_FALSE(p.is_homogeneous());
  CHECK_THROWS(p.add_term({1}, Rational(1)));
  CHECK_THROWS(PolyQ::variable(2, 5));
}

TEST_CASE("unipoly arithmetic") {
  const UniPolyQ one_plus = UniPolyQ::from_coeffs({Rational(1), Rational(1)});
  const UniPolyQ one_minus = UniPolyQ::from_coeffs({Rational(1), Rational(-1)});
  const UniPolyQ prod = one_plus * one_minus;
  REQUIRE(prod.degree() == 2);
  CHECK(prod.coeffs[0] == 1);
  CHECK(prod.coeffs[1] == 0);
  CHECK(prod.coeffs[2] == -1);
  CHECK(prod.eval(Rational(3)) == -8);
  CHECK(prod.eval(2.0) == doctest::Approx(-3.0));
  const UniPolyQ scaled = one_plus.scale_arg(Rational(2));  // 1 + 2s
  CHECK(scaled.eval(Rational(1)) == 3);
  CHECK(unipoly_pow(one_plus, 3).eval(Rational(1)) == 8);
  CHECK((one_plus - one_plus).is_zero());
}

}  // TEST_SUITE
