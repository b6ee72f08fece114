#include <cmath>
#include <complex>

#include "doctest.h"
#include "forge/fourierlab.hpp"

using namespace forge;

namespace {

PolyQ conic3() {
  PolyQ p(3);
  p.add_term({1, 0, 1}, Rational(1));
  p.add_term({0, 2, 0}, Rational(-1));
  return p;
}

// Direct quadratic-time evaluation of the centered transform, d = 1.
std::vector<std::complex<double>> direct_transform_1d(const std::vector<double>& v,
                                                      int m, double R) {
  const double delta = 2.0 * R / m;
  std::vector<std::complex<double>> out(v.size());
  for (int q = 0; q < m; ++q) {
    const double xi = (q - m / 2) * M_PI / R;
    std::complex<double> acc(0.0, 0.0);
    for (int k = 0; k < m; ++k) {
      const double x = (k - m / 2 + 0.5) * delta;
      acc += v[static_cast<std::size_t>(k)] *
             std::complex<double>(std::cos(xi * x), -std::sin(xi * x));
    }
    out[static_cast<std::size_t>(q)] = acc * delta;
  }
  return out;
}

}  // namespace

TEST_SUITE("fourierlab") {

TEST_CASE("base function values") {
  CHECK(eval_f({0.0}) == doctest::Approx(-1.0 / 6.0).epsilon(1e-15));
  CHECK(eval_f({M_PI}) == doctest::Approx(-1.0 / (M_PI * M_PI)).epsilon(1e-14));
  CHECK(eval_f({0.0, 0.0}) == doctest::Approx(1.0 / 36.0).epsilon(1e-15));
  // Series and direct formula agree through the switchover.
  CHECK(eval_f({0.0099}) == doctest::Approx(eval_f({0.0101})).epsilon(1e-7));
  // Even function.
  CHECK(eval_f({1.7}) == eval_f({-1.7}));
}

TEST_CASE("centered transform matches direct summation in 1d") {
  const int m = 32;
  const double R = 5.0;
  std::vector<double> v(m);
  for (int k = 0; k < m; ++k) {
    const double x = (k - m / 2 + 0.5) * (2.0 * R / m);
    v[static_cast<std::size_t>(k)] = std::exp(-x * x) + 0.3 * std::exp(-(x - 1) * (x - 1));
  }
  const auto fast = centered_transform(v, 1, m, R);
  const auto slow = direct_transform_1d(v, m, R);
  double worst = 0.0;
  for (int q = 0; q < m; ++q)
    worst = std::max(worst, std::abs(fast[static_cast<std::size_t>(q)] -
                                     slow[static_cast<std::size_t>(q)]));
  CHECK(worst <= 1e-12);
}

TEST_CASE("centered transform matches direct summation in 2d") {
  const int m = 8;
  const double R = 3.0;
  const double delta = 2.0 * R / m;
  std::vector<double> v(static_cast<std::size_t>(m) * m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const double x = (a - m / 2 + 0.5) * delta;
      const double y = (b - m / 2 + 0.5) * delta;
      v[static_cast<std::size_t>(a) * m + b] =
          std::exp(-x * x - 0.5 * y * y) + 0.1 * x * std::exp(-x * x - y * y);
    }
  const auto fast = centered_transform(v, 2, m, R);
  double worst = 0.0;
  for (int qa = 0; qa < m; ++qa)
    for (int qb = 0; qb < m; ++qb) {
      const double xia = (qa - m / 2) * M_PI / R;
      const double xib = (qb - m / 2) * M_PI / R;
      std::complex<double> acc(0.0, 0.0);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          const double x = (a - m / 2 + 0.5) * delta;
          const double y = (b - m / 2 + 0.5) * delta;
          const double phase = xia * x + xib * y;
          acc += v[static_cast<std::size_t>(a) * m + b] *
                 std::complex<double>(std::cos(phase), -std::sin(phase));
        }
      acc *= delta * delta;
      worst = std::max(worst,
                       std::abs(fast[static_cast<std::size_t>(qa) * m + qb] - acc));
    }
  CHECK(worst <= 1e-12);
}

TEST_CASE("transform convention pinned by the gaussian") {
  // For v = e^{-x^2/2}, the integral transform is sqrt(2 pi) e^{-xi^2/2}.
  const int m = 256;
  const double R = 12.0;
  std::vector<double> v(m);
  for (int k = 0; k < m; ++k) {
    const double x = (k - m / 2 + 0.5) * (2.0 * R / m);
    v[static_cast<std::size_t>(k)] = std::exp(-0.5 * x * x);
  }
  const auto H = centered_transform(v, 1, m, R);
  for (int q = m / 2 - 20; q <= m / 2 + 20; ++q) {
    const double xi = (q - m / 2) * M_PI / R;
    const double expect = std::sqrt(2.0 * M_PI) * std::exp(-0.5 * xi * xi);
    CHECK(H[static_cast<std::size_t>(q)].real() ==
          doctest::Approx(expect).epsilon(1e-8));
    CHECK(std::abs(H[static_cast<std::size_t>(q)].imag()) <= 1e-12);
  }
}

TEST_CASE("decay exponent selection") {
  const PolyQ x = PolyQ::variable(1, 0);
  const int K = choose_K(x, 1, 40.0, 4096);
  CHECK(K >= 4);  // deg + d + 2
  CHECK(K <= 64);
  // Larger R never increases the exponent.
  const int K_wide = choose_K(x, 1, 60.0, 4096);
  CHECK(K_wide <= K);
  // Degenerate inputs are rejected.
  CHECK_THROWS_AS(choose_K(PolyQ::constant(1, Rational(2)), 1, 40.0, 4096),
                  std::invalid_argument);
  PolyQ mixed(1);
  mixed.add_term({1}, Rational(1));
  mixed.add_term({0}, Rational(1));
  CHECK_THROWS_AS(choose_K(mixed, 1, 40.0, 4096), std::invalid_argument);
  // R too small for the decay check to ever pass.
  CHECK_THROWS_AS(choose_K(x, 1, 1.0, 64), std::runtime_error);
}

TEST_CASE("counterexample pair in one dimension") {
  PolyQ p(1);
  p.add_term({1}, Rational(1));
  const auto pair = build_counterexample(p, 1, 512, 20.0);
  CHECK(pair.exponent == 2);
  CHECK(pair.K >= 4);
  CHECK(pair.imag_residual <= 1e-9);
  CHECK(pair.mass_mismatch <= 1e-6);
  CHECK(pair.mass_plus > 1e-12);

  // Probability densities on the dual grid.
  const double vol = pair.mu.cell_volume();
  double mass_mu = 0.0, mass_nu = 0.0, overlap = 0.0;
  for (std::size_t i = 0; i < pair.mu.values.size(); ++i) {
    CHECK(pair.mu.values[i] >= 0.0);
    CHECK(pair.nu.values[i] >= 0.0);
    mass_mu += pair.mu.values[i] * vol;
    mass_nu += pair.nu.values[i] * vol;
    overlap = std::max(overlap, std::min(pair.mu.values[i], pair.nu.values[i]));
  }
  CHECK(mass_mu == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(mass_nu == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(overlap == 0.0);  // mutually singular on the grid
  CHECK(pair.l1_distance > 0.1);
  CHECK_FALSE(pair.mu.cell_centered);
}

TEST_CASE("projection equality along the variety") {
  // p = x0 x1: the coordinate axes are the variety.
  PolyQ p(2);
  p.add_term({1, 1}, Rational(1));
  const auto pair = build_counterexample(p, 2, 64, 12.0);

  std::vector<double> tgrid;
  for (int i = 0; i <= 10; ++i) tgrid.push_back(-5.0 + i * 1.0);
  const auto rep = verify_projection_equality(
      pair, {{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 1.0}}, tgrid);
  CHECK(rep.per_direction.size() == 2);
  CHECK(rep.per_control_direction.size() == 1);
  CHECK(rep.on_variety_max <= 1e-3);
  CHECK(rep.off_variety_max >= 1e-2);
  CHECK(rep.off_variety_max > 10.0 * rep.on_variety_max);

  // Off-variety directions are rejected as variety members.
  CHECK_THROWS_AS(
      verify_projection_equality(pair, {{1.0, 1.0}}, {}, tgrid),
      std::invalid_argument);
}

TEST_CASE("three dimensional conic pair") {
  const auto pair = build_counterexample(conic3(), 3, 64, 12.0);
  CHECK(pair.K >= 7);
  CHECK(pair.mass_mismatch <= 1e-6);
  CHECK(pair.imag_residual <= 1e-9);
  CHECK(pair.boundary_decay < 1e-8);

  std::vector<double> tgrid;
  for (int i = 0; i <= 10; ++i) tgrid.push_back(-5.0 + i * 1.0);
  std::vector<std::vector<double>> variety;
  for (double y : {-1.5, -0.5, 0.5, 1.0, 1.5}) variety.push_back({1.0, y, y * y});
  const auto rep = verify_projection_equality(pair, variety,
                                              {{1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}}, tgrid);
  CHECK(rep.on_variety_max <= 1e-3);
  CHECK(rep.off_variety_max >= 1e-2);
}

TEST_CASE("grid moments") {
  // Uniform density on [-1, 1].
  GridDensity uni{1, 1.0, 512, std::vector<double>(512, 0.5), "uniform"};
  const auto mom = grid_mixed_moments(uni, {{0}, {1}, {2}});
  CHECK(mom[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mom[1]) <= 1e-6);
  CHECK(mom[2] == doctest::Approx(1.0 / 3.0).epsilon(3e-4));

  GridDensity uni2{2, 1.0, 64, std::vector<double>(64 * 64, 0.25), "uniform2"};
  const auto mom2 = grid_mixed_moments(uni2, {{0, 0}, {1, 1}, {2, 0}});
  CHECK(mom2[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(mom2[1]) <= 1e-6);
  CHECK(mom2[2] == doctest::Approx(1.0 / 3.0).epsilon(3e-4));

  CHECK_THROWS_AS(grid_mixed_moments(uni, {{17}}), std::invalid_argument);
  CHECK_THROWS_AS(grid_mixed_moments(uni, {{1, 1}}), std::invalid_argument);
}

}  // TEST_SUITE
