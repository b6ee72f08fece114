#include <cmath>

#include "doctest.h"
#include "forge/detset.hpp"

using namespace forge;

namespace {

PolyQ conic_poly() {
  // x0*x2 - x1^2
  PolyQ p(3);
  p.add_term({1, 0, 1}, Rational(1));
  p.add_term({0, 2, 0}, Rational(-1));
  return p;
}

PolyQ quad_cross_poly() {
  // x0*x3 - x1*x2 in four variables
  PolyQ p(4);
  p.add_term({1, 0, 0, 1}, Rational(1));
  p.add_term({0, 1, 1, 0}, Rational(-1));
  return p;
}

}  // namespace

TEST_SUITE("detset") {

TEST_CASE("curve samples match closed forms") {
  const auto mom = sample_curve(CurveSpec::moment(3), {{2.0}});
  REQUIRE(mom.size() == 1);
  CHECK(mom[0] == std::vector<double>{1.0, 2.0, 4.0});

  const auto pow = sample_curve(CurveSpec::power({1, 2, 4, 8}), {{2.0}});
  CHECK(pow[0] == std::vector<double>{1.0, 4.0, 16.0, 64.0});

  const auto poi = sample_curve(CurveSpec::poisson(1.0, 2), {{0.0}});
  CHECK(poi[0] == std::vector<double>{1.0, 1.0});

  const auto atoms = sample_curve(CurveSpec::laplace({1.0, 2.0}), {{std::log(2.0)}});
  CHECK(atoms[0][0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(atoms[0][1] == doctest::Approx(0.25).epsilon(1e-12));

  // Convolution family: j-th coordinate is the j-th power of the base value.
  const auto conv =
      sample_curve(CurveSpec::convolution({0.0, 1.0}, {0.5, 0.5}, 3), {{std::log(2.0)}});
  CHECK(conv[0][0] == doctest::Approx(1.0));
  CHECK(conv[0][1] == doctest::Approx(0.75));
  CHECK(conv[0][2] == doctest::Approx(0.5625));

  // Scaled family evaluates the same transform at j*s.
  const auto sc =
      sample_curve(CurveSpec::scaled({0.0, 1.0}, {0.5, 0.5}, 3), {{std::log(2.0)}});
  CHECK(sc[0][0] == doctest::Approx(1.0));
  CHECK(sc[0][1] == doctest::Approx(0.75));
  CHECK(sc[0][2] == doctest::Approx(0.625));

  // Real/imaginary recurrence: z = x + iy, coordinates s*Re(z^n) + t*Im(z^n).
  const auto cp = sample_curve(CurveSpec::complex_pq(3), {{1.0, 2.0, 0.0, 1.0}});
  CHECK(cp[0][0] == doctest::Approx(1.0));   // s*1 + t*0
  CHECK(cp[0][1] == doctest::Approx(2.0));   // z = i: s*0 + t*1
  CHECK(cp[0][2] == doctest::Approx(-1.0));  // z^2 = -1
}

TEST_CASE("laplace-type samples require s >= 0") {
  CHECK_THROWS_AS(sample_curve(CurveSpec::laplace({1.0}), {{-0.5}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(sample_curve(CurveSpec::poisson(1.0, 3), {{-1.0}}),
                  std::invalid_argument);
  CHECK_NOTHROW(sample_curve(CurveSpec::moment(3), {{-1.0}}));
}

TEST_CASE("exact sampler agrees with float sampler") {
  const CurveSpec spec = CurveSpec::power({2, 3, 5});
  const auto ex = sample_curve_exact(spec, {{Rational(3)}});
  CHECK(ex[0][0] == 8);
  CHECK(ex[0][1] == 27);
  CHECK(ex[0][2] == 125);
  CHECK_THROWS_AS(sample_curve_exact(CurveSpec::poisson(1.0, 2), {{Rational(1)}}),
                  std::invalid_argument);
}

TEST_CASE("moment curve yields the conic witness exactly") {
  const auto rep = find_vanishing_polynomial(CurveSpec::moment(3), 2, KernelMode::exact);
  REQUIRE(rep.verdict == DeterminationReport::Verdict::witness_found);
  CHECK(rep.witness_degree == 2);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == conic_poly());
  CHECK(rep.held_out_residual == 0.0);
}

TEST_CASE("moment curve has no linear witness") {
  const auto rep = find_vanishing_polynomial(CurveSpec::moment(3), 1, KernelMode::exact);
  CHECK(rep.verdict == DeterminationReport::Verdict::no_witness_up_to);
}

TEST_CASE("power curve kernel contains the cross-term witness") {
  const auto rep =
      find_vanishing_polynomial(CurveSpec::power({1, 2, 4, 8}), 2, KernelMode::exact);
  REQUIRE(rep.verdict == DeterminationReport::Verdict::witness_found);
  CHECK(rep.witness_degree == 2);
  // Frozen from an independent exact run: the degree-2 kernel is 3-dimensional.
  CHECK(rep.kernel.size() == 3);
  bool has_cross = false;
  for (const auto& k : rep.kernel)
    if (k == quad_cross_poly()) has_cross = true;
  CHECK(has_cross);
}

TEST_CASE("witness is stable under fresh samples") {
  SearchOptions opts;
  opts.min_samples = 100;  // 10x the default need at degree 2
  const auto rep =
      find_vanishing_polynomial(CurveSpec::moment(3), 2, KernelMode::exact, opts);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == conic_poly());
}

TEST_CASE("float mode finds the conic on the moment curve") {
  const auto rep =
      find_vanishing_polynomial(CurveSpec::moment(3), 2, KernelMode::floating);
  REQUIRE(rep.verdict == DeterminationReport::Verdict::witness_found);
  CHECK(rep.witness_degree == 2);
  REQUIRE(rep.witness_float.has_value());
  CHECK(rep.held_out_residual <= 1e-6);
}

TEST_CASE("rationally independent atoms admit no low-degree witness") {
  const CurveSpec spec = CurveSpec::laplace({1.0, std::sqrt(2.0), 3.14159265358979});
  const auto rep = find_vanishing_polynomial(spec, 3, KernelMode::floating);
  CHECK(rep.verdict == DeterminationReport::Verdict::no_witness_up_to);
  CHECK(rep.scans.size() == 3);
}

TEST_CASE("dependent atoms are caught in float mode") {
  // 1 + 3 = 2 + 2 gives x0*x2 = x1^2 on the transform curve.
  const CurveSpec spec = CurveSpec::laplace({1.0, 2.0, 3.0});
  const auto rep = find_vanishing_polynomial(spec, 2, KernelMode::floating);
  REQUIRE(rep.verdict == DeterminationReport::Verdict::witness_found);
  CHECK(rep.witness_degree == 2);
  CHECK(rep.held_out_residual <= 1e-9);
}

TEST_CASE("nondegenerate convolution family has no linear witness") {
  const CurveSpec spec = CurveSpec::convolution({0.0, 1.0}, {0.5, 0.5}, 4);
  const auto rep = find_vanishing_polynomial(spec, 1, KernelMode::floating);
  CHECK(rep.verdict == DeterminationReport::Verdict::no_witness_up_to);
}

TEST_CASE("poisson transform curve rejects spurious kernels up to degree 4") {
  const auto rep =
      find_vanishing_polynomial(CurveSpec::poisson(1.0, 4), 4, KernelMode::floating);
  CHECK(rep.verdict == DeterminationReport::Verdict::no_witness_up_to);
  REQUIRE(rep.scans.size() == 4);
  // Deep degrees are numerically rank-deficient; the stress test must be
  // doing the rejection rather than the raw SVD threshold.
  std::size_t rejected = 0;
  for (const auto& s : rep.scans) rejected += s.rejected;
  CHECK(rejected > 0);
}

TEST_CASE("log coordinates agree with direct evaluation where safe") {
  const CurveSpec spec = CurveSpec::poisson(0.5, 4);
  const auto lg = log_curve_coordinates(spec, 2.0);
  const auto v = sample_curve(spec, {{2.0}});
  for (int j = 0; j < 4; ++j)
    CHECK(std::exp(lg[j]) == doctest::Approx(v[0][j]).epsilon(1e-12));
  CHECK_THROWS_AS(log_curve_coordinates(CurveSpec::moment(3), 1.0),
                  std::invalid_argument);
}

TEST_CASE("point-list overloads split off held-out samples") {
  std::vector<std::vector<double>> pts;
  for (int i = 0; i < 40; ++i) {
    const double t = -2.0 + 4.0 * i / 39.0;
    pts.push_back({1.0, t, t * t});
  }
  const auto rep = find_vanishing_polynomial(pts, 2);
  REQUIRE(rep.verdict == DeterminationReport::Verdict::witness_found);
  CHECK(rep.witness_degree == 2);

  std::vector<std::vector<Rational>> rpts;
  for (int i = 0; i < 40; ++i) {
    const Rational t = make_rational(2 * i - 39, 10);
    rpts.push_back({Rational(1), t, t * t});
  }
  const auto rex = find_vanishing_polynomial(rpts, 2);
  REQUIRE(rex.witness.has_value());
  CHECK(*rex.witness == conic_poly());

  CHECK_THROWS_AS(find_vanishing_polynomial(std::vector<std::vector<double>>{{1.0, 2.0}}, 2),
                  std::invalid_argument);
}

TEST_CASE("coprime certificate for {2,3} and {2,3,5}") {
  const auto r23 = coprime_certificate({2, 3}, 4);
  CHECK(r23.verdict == DeterminationReport::Verdict::exact_certificate);
  CHECK(r23.pairwise_coprime);
  CHECK(r23.vandermonde_rank == 5);  // |M_4(2 vars)| = 5
  // Frozen values 2^i 3^j, i+j = 4, ordered by the basis.
  REQUIRE(r23.monomial_values.size() == 5);
  CHECK(r23.monomial_values[0] == 16);
  CHECK(r23.monomial_values[1] == 24);
  CHECK(r23.monomial_values[2] == 36);
  CHECK(r23.monomial_values[3] == 54);
  CHECK(r23.monomial_values[4] == 81);

  const auto r235 = coprime_certificate({2, 3, 5}, 4);
  CHECK(r235.verdict == DeterminationReport::Verdict::exact_certificate);
  CHECK(r235.pairwise_coprime);
  CHECK(r235.vandermonde_rank == 15);  // |M_4(3 vars)| = 15
}

TEST_CASE("collision certificate reports the cross-term witness") {
  const auto rep = coprime_certificate({1, 2, 4, 8}, 2);
  REQUIRE(rep.verdict == DeterminationReport::Verdict::witness_found);
  CHECK_FALSE(rep.pairwise_coprime);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == quad_cross_poly());
  // The reported collision must agree with a vanishing-polynomial witness:
  // the exact kernel at the same degree contains the collision binomial.
  const auto rv =
      find_vanishing_polynomial(CurveSpec::power({1, 2, 4, 8}), 2, KernelMode::exact);
  bool agrees = false;
  for (const auto& k : rv.kernel)
    if (k == *rep.witness) agrees = true;
  CHECK(agrees);
}

TEST_CASE("non-coprime list without collisions still certifies") {
  // {2, 4} shares a factor but 2^i 4^j are all distinct at degree 2.
  const auto rep = coprime_certificate({2, 4}, 2);
  CHECK(rep.verdict == DeterminationReport::Verdict::exact_certificate);
  CHECK_FALSE(rep.pairwise_coprime);
  CHECK(rep.vandermonde_rank == 3);
}

TEST_CASE("substitution map dimension counts") {
  const auto d22 = phi_dimension_count(2, 2);
  CHECK(d22.dim_domain == 3);
  CHECK(d22.dim_codomain == 70);  // C(8,4)
  CHECK_FALSE(d22.kernel_guaranteed);

  // Frozen threshold pair: the first diagonal cell where the domain
  // dimension exceeds the codomain dimension is N = l = 16.
  const auto d15 = phi_dimension_count(15, 15);
  CHECK(d15.dim_domain == 77558760);
  CHECK(d15.dim_codomain == 111607501);
  CHECK_FALSE(d15.kernel_guaranteed);

  const auto d16 = phi_dimension_count(16, 16);
  CHECK(d16.dim_domain == 300540195);
  CHECK(d16.dim_codomain == 186043585);
  CHECK(d16.kernel_guaranteed);
}

TEST_CASE("dominance order is strict on fixed-degree bases") {
  for (int N = 2; N <= 5; ++N)
    for (int l = 1; l <= 5; ++l) CHECK(dominance_order_strict(N, l));
}

TEST_CASE("substitution map kernel search at small caps") {
  const auto res = phi_kernel_search(2, 2, 200000);
  CHECK_FALSE(res.found.has_value());
  CHECK(res.caps_exhausted);
  CHECK(res.scanned.size() == 4);
  for (const auto& cell : res.scanned) CHECK(cell[2] == 0);
}

TEST_CASE("rational difference kernel vanishes identically") {
  // Base transform 1/(1+s): entries share a factor of s, so the products at
  // degree 2 collapse onto a guaranteed kernel.
  const UniPolyQ one = UniPolyQ::constant(Rational(1));
  const UniPolyQ denom = UniPolyQ::from_coeffs({Rational(1), Rational(1)});
  const auto kernel = rational_difference_kernel(one, denom, 4, 2);
  REQUIRE(!kernel.empty());

  // Numeric spot check on the direction curve gamma(s).
  for (double s : {0.25, 0.5, 1.0, 2.0}) {
    std::vector<double> g;
    const auto q = [&](double u) { return 1.0 + u; };
    const auto L = [&](int j) { return 1.0 / q(j * s); };
    // gamma_j = (L(j) - L(j-1)) * prod_k q(ks), expanded without division.
    double prod = 1.0;
    for (int k = 0; k < 4; ++k) prod *= q(k * s);
    for (int j = 1; j < 4; ++j) g.push_back((L(j) - L(j - 1)) * prod);
    const std::vector<double> ones(3, 1.0);
    for (const auto& kp : kernel) {
      const PolyD kd = to_double_poly(kp);
      CHECK(std::abs(kd.eval(g)) <= 1e-9 * std::abs(kd.eval(ones)) + 1e-9);
    }
  }
}

TEST_CASE("spec validation throws") {
  CHECK_THROWS_AS(CurveSpec::moment(1), std::invalid_argument);
  CHECK_THROWS_AS(CurveSpec::poisson(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(CurveSpec::laplace({}), std::invalid_argument);
  CHECK_THROWS_AS(CurveSpec::convolution({0.0}, {0.5}, 3), std::invalid_argument);
  CHECK_THROWS_AS(coprime_certificate({0, 2}, 2), std::invalid_argument);
  CHECK_THROWS_AS(find_vanishing_polynomial(CurveSpec::poisson(1.0, 3), 2,
                                            KernelMode::exact),
                  std::invalid_argument);
}

}  // TEST_SUITE
