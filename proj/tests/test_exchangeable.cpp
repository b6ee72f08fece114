#include <cmath>
#include <map>

#include "doctest.h"
#include "forge/exchangeable.hpp"
#include "forge/rng.hpp"

using namespace forge;

namespace {

MixingMeasure point_mixture(const std::vector<double>& atoms,
                            const std::vector<double>& weights) {
  AtomCloud c;
  c.d = static_cast<int>(atoms.size());
  c.points = {weights};
  c.probs = {1.0};
  return assemble_mixing_measure(c, atoms);
}

MixingMeasure random_mixture(const std::vector<double>& atoms, int components,
                             std::uint64_t seed) {
  Rng rng(seed);
  AtomCloud c;
  c.d = static_cast<int>(atoms.size());
  for (int i = 0; i < components; ++i) {
    std::vector<double> w(atoms.size());
    double sum = 0.0;
    for (auto& v : w) {
      v = rng.uniform01();
      sum += v;
    }
    for (auto& v : w) v /= sum;
    c.points.push_back(w);
    c.probs.push_back(1.0 / components);
  }
  return assemble_mixing_measure(c, atoms);
}

}  // namespace

TEST_SUITE("exchangeable") {

TEST_CASE("total variation and convolution basics") {
  const LatticeLaw a{{0.0, 1.0}, {0.5, 0.5}};
  const LatticeLaw b{{0.0, 1.0}, {0.25, 0.75}};
  CHECK(total_variation(a, a) == 0.0);
  CHECK(total_variation(a, b) == doctest::Approx(0.25).epsilon(1e-15));
  const LatticeLaw c{{2.0}, {1.0}};
  CHECK(total_variation(a, c) == doctest::Approx(1.0).epsilon(1e-15));

  const auto conv = convolve_laws(a, a);
  REQUIRE(conv.values.size() == 3);
  CHECK(conv.probs[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(conv.probs[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(conv.probs[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("mixed moments of point mixtures") {
  const auto theta = point_mixture({0.0, 1.0}, {0.5, 0.5});
  const auto table = mixed_moments(theta, 4);
  CHECK(table.at({0, 0}) == 1.0);
  CHECK(table.at({1, 1}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(table.at({2, 1}) == doctest::Approx(0.125).epsilon(1e-15));

  AtomCloud two;
  two.d = 2;
  two.points = {{1.0, 0.0}, {0.0, 1.0}};
  two.probs = {0.5, 0.5};
  const auto cross = mixed_moments(assemble_mixing_measure(two, {0.0, 1.0}), 2);
  CHECK(cross.at({1, 1}) == 0.0);
  CHECK(cross.at({2, 0}) == doctest::Approx(0.5).epsilon(1e-15));

  CHECK_THROWS_AS(mixed_moments(theta, 21), std::invalid_argument);
}

TEST_CASE("mixed moments stay inside the unit interval") {
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 7, 99);
  const auto table = mixed_moments(theta, 6);
  for (const auto& [r, m] : table.moments) {
    CHECK(m >= 0.0);
    CHECK(m <= 1.0 + 1e-15);
  }
  CHECK(table.at({0, 0, 0, 0}) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("partial sum law of a deterministic sequence") {
  const auto theta = point_mixture({0.0, 1.0}, {0.0, 1.0});
  const auto law = exact_partial_sum_law(theta, 5);
  REQUIRE(law.values.size() == 1);
  CHECK(law.values[0] == 5.0);
  CHECK(law.probs[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("partial sum law of the uniform conditional on four atoms") {
  const auto theta = point_mixture({0.0, 1.0, 2.0, 3.0}, {0.25, 0.25, 0.25, 0.25});
  const auto law = exact_partial_sum_law(theta, 2);
  REQUIRE(law.values.size() == 7);
  CHECK(law.values.front() == 0.0);
  CHECK(law.probs.front() == doctest::Approx(1.0 / 16).epsilon(1e-14));
  CHECK(law.values.back() == 6.0);
  CHECK(law.probs.back() == doctest::Approx(1.0 / 16).epsilon(1e-14));
  double total = 0.0;
  for (double p : law.probs) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("partial sum law with an irrational atom pair") {
  const auto theta = point_mixture({1.0, std::sqrt(2.0)}, {0.5, 0.5});
  const auto law = exact_partial_sum_law(theta, 2);
  REQUIRE(law.values.size() == 3);
  CHECK(law.values[1] == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-15));
  CHECK(law.probs[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("iid mixture satisfies the convolution identity") {
  const auto theta = point_mixture({0.0, 1.0, 2.0, 3.0}, {0.4, 0.3, 0.2, 0.1});
  const auto law5 = exact_partial_sum_law(theta, 5);
  const auto law2 = exact_partial_sum_law(theta, 2);
  const auto law3 = exact_partial_sum_law(theta, 3);
  const auto conv = convolve_laws(law2, law3);
  REQUIRE(conv.values.size() == law5.values.size());
  for (std::size_t i = 0; i < conv.values.size(); ++i) {
    CHECK(conv.values[i] == law5.values[i]);
    CHECK(conv.probs[i] == doctest::Approx(law5.probs[i]).epsilon(1e-13));
  }
  // A genuine mixture is NOT iid: the identity fails for a two-component law.
  const auto mixed = random_mixture({0.0, 1.0, 2.0, 3.0}, 2, 5);
  const auto m2 = exact_partial_sum_law(mixed, 2);
  const auto m1 = exact_partial_sum_law(mixed, 1);
  CHECK(total_variation(convolve_laws(m1, m1), m2) > 1e-3);
}

TEST_CASE("composition count guard") {
  const auto theta = random_mixture({0, 1, 2, 3, 4, 5, 6, 7}, 2, 3);
  CHECK_THROWS_AS(exact_partial_sum_law(theta, 40), std::invalid_argument);
}

TEST_CASE("partial sum comparison distances") {
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 4, 17);
  const auto zero = compare_partial_sum_laws(theta, theta, 6);
  for (double tv : zero) CHECK(tv == 0.0);

  const auto d0 = point_mixture({0.0, 1.0}, {1.0, 0.0});
  const auto d1 = point_mixture({0.0, 1.0}, {0.0, 1.0});
  const auto far = compare_partial_sum_laws(d0, d1, 1);
  CHECK(far[0] == doctest::Approx(1.0).epsilon(1e-15));

  const auto other = random_mixture({0.0, 1.0, 2.0}, 2, 8);
  CHECK_THROWS_AS(compare_partial_sum_laws(theta, other, 2),
                  std::invalid_argument);
}

TEST_CASE("laplace transform moments") {
  const auto d0 = point_mixture({0.0, 1.0}, {1.0, 0.0});
  CHECK(laplace_transform_moments(d0, 2.5, 7) == doctest::Approx(1.0).epsilon(1e-15));
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 5, 23);
  CHECK(laplace_transform_moments(theta, 0.0, 5) ==
        doctest::Approx(1.0).epsilon(1e-13));
  const auto d1 = point_mixture({0.0, 1.0}, {0.0, 1.0});
  CHECK(laplace_transform_moments(d1, 1.0, 2) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  const auto neg = point_mixture({-1.0, 1.0}, {0.5, 0.5});
  CHECK_THROWS_AS(laplace_transform_moments(neg, 1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(laplace_transform_moments(d1, -1.0, 1), std::invalid_argument);
}

TEST_CASE("moment recovery on a rationally independent pair") {
  const auto theta = point_mixture({1.0, std::sqrt(2.0)}, {0.5, 0.5});
  std::vector<LatticeLaw> laws;
  for (int n = 1; n <= 2; ++n) laws.push_back(exact_partial_sum_law(theta, n));
  const auto table = recover_mixed_moments(laws, theta.atoms, 2);
  CHECK(table.at({1, 1}) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(table.at({0, 0}) == 1.0);
}

TEST_CASE("moment recovery detects representation collisions") {
  const auto theta = point_mixture({1.0, 2.0}, {0.5, 0.5});
  std::vector<LatticeLaw> laws;
  for (int n = 1; n <= 2; ++n) laws.push_back(exact_partial_sum_law(theta, n));
  CHECK_THROWS_AS(recover_mixed_moments(laws, theta.atoms, 2),
                  std::invalid_argument);
}

TEST_CASE("moment recovery round-trips on three independent atoms") {
  const std::vector<double> atoms{1.0, std::sqrt(2.0), std::sqrt(3.0)};
  const auto theta = random_mixture(atoms, 5, 31);
  std::vector<LatticeLaw> laws;
  for (int n = 1; n <= 6; ++n) laws.push_back(exact_partial_sum_law(theta, n));
  const auto recovered = recover_mixed_moments(laws, atoms, 6);
  const auto direct = mixed_moments(theta, 6);
  double worst = 0.0;
  for (const auto& [r, m] : recovered.moments)
    worst = std::max(worst, std::abs(m - direct.at(r)));
  CHECK(worst <= 1e-12);
}

TEST_CASE("marginal moment law moments") {
  const auto d1 = point_mixture({0.0, 1.0}, {0.0, 1.0});
  for (int k : {0, 3, 20})
    CHECK(static_cast<double>(marginal_moment_law_moments(d1, k, 4)) ==
          doctest::Approx(1.0).epsilon(1e-15));
  const auto theta = random_mixture({1.0, 2.0, 4.0, 8.0}, 3, 77);
  CHECK(static_cast<double>(marginal_moment_law_moments(theta, 0, 5)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  // mu_1 under a point mixture is the conditional mean.
  const auto pm = point_mixture({1.0, 2.0, 4.0, 8.0}, {0.25, 0.25, 0.25, 0.25});
  CHECK(static_cast<double>(marginal_moment_law_moments(pm, 1, 1)) ==
        doctest::Approx(3.75).epsilon(1e-14));
  // Extended-precision range: k = 60 on atoms up to 8 stays finite.
  const auto big = marginal_moment_law_moments(pm, 60, 2);
  CHECK(std::isfinite(static_cast<double>(big / powl(8.0L, 120))));
  CHECK_THROWS_AS(marginal_moment_law_moments(pm, 61, 1), std::invalid_argument);
  const auto nine = random_mixture({0, 1, 2, 3, 4, 5, 6, 7, 8}, 2, 4);
  CHECK_THROWS_AS(marginal_moment_law_moments(nine, 2, 1), std::invalid_argument);
}

TEST_CASE("marginal chf comparison separates and identifies") {
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 4, 12);
  const std::vector<double> grid{-2.0, -1.0, 0.0, 0.5, 1.0, 2.0};
  CHECK(marginal_chf_comparison(theta, theta, grid, 8) == 0.0);

  const auto other = random_mixture({0.0, 1.0, 2.0, 3.0}, 4, 13);
  CHECK(marginal_chf_comparison(theta, other, grid, 8) > 1e-3);
  CHECK(marginal_chf_comparison(theta, other, {0.0}, 8) <= 1e-15);
}

TEST_CASE("sampling is deterministic and respects a deterministic mixture") {
  const auto d1 = point_mixture({0.0, 1.0}, {0.0, 1.0});
  const auto seq = sample_sequence(d1, 6, 42);
  REQUIRE(seq.partial_sums.size() == 6);
  for (int i = 0; i < 6; ++i) {
    CHECK(seq.xs[static_cast<std::size_t>(i)] == 1.0);
    CHECK(seq.partial_sums[static_cast<std::size_t>(i)] == double(i + 1));
  }
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 4, 5);
  const auto s1 = sample_sequence(theta, 10, 7);
  const auto s2 = sample_sequence(theta, 10, 7);
  CHECK(s1.component == s2.component);
  CHECK(s1.xs == s2.xs);
  const auto s3 = sample_sequence(theta, 10, 8);
  CHECK((s3.component != s1.component || s3.xs != s1.xs));
}

TEST_CASE("empirical law matches the exact law") {
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 3, 21);
  const auto exact = exact_partial_sum_law(theta, 3);
  const auto empirical = empirical_partial_sum_law(theta, 3, 100000, 9001);
  CHECK(total_variation(exact, empirical) <= 0.01);
}

TEST_CASE("sampled pairs are exchangeable") {
  const auto theta = random_mixture({0.0, 1.0, 2.0, 3.0}, 3, 33);
  std::map<std::pair<long, long>, double> fwd, rev;
  const std::size_t samples = 50000;
  Rng root(4242);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto seq = sample_sequence(theta, 2, root.substream(i).next_u64());
    const long a = std::lround(seq.xs[0]);
    const long b = std::lround(seq.xs[1]);
    fwd[{a, b}] += 1.0 / samples;
    rev[{b, a}] += 1.0 / samples;
  }
  double tv = 0.0;
  for (const auto& [key, p] : fwd) {
    const auto it = rev.find(key);
    tv += std::abs(p - (it == rev.end() ? 0.0 : it->second));
  }
  for (const auto& [key, p] : rev)
    if (fwd.find(key) == fwd.end()) tv += p;
  CHECK(0.5 * tv <= 0.01);
}

TEST_CASE("transform moments and sum laws agree or disagree together") {
  // Same mixing measure written with permuted component order: equal laws.
  const std::vector<double> atoms{0.0, 1.0, 2.0, 3.0};
  AtomCloud c1, c2;
  c1.d = c2.d = 4;
  c1.points = {{0.7, 0.1, 0.1, 0.1}, {0.1, 0.2, 0.3, 0.4}};
  c1.probs = {0.25, 0.75};
  c2.points = {{0.1, 0.2, 0.3, 0.4}, {0.7, 0.1, 0.1, 0.1}};
  c2.probs = {0.75, 0.25};
  const auto ta = assemble_mixing_measure(c1, atoms);
  const auto tb = assemble_mixing_measure(c2, atoms);

  double worst_lm = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double s = 0.1 + 2.9 * i / 49.0;
    for (int n = 1; n <= 8; ++n)
      worst_lm = std::max(worst_lm,
                          std::abs(laplace_transform_moments(ta, s, n) -
                                   laplace_transform_moments(tb, s, n)));
  }
  CHECK(worst_lm <= 1e-12);
  for (double tv : compare_partial_sum_laws(ta, tb, 8)) CHECK(tv <= 1e-12);

  // A genuinely different pair violates both sides.
  const auto tc = random_mixture(atoms, 2, 61);
  double sep = 0.0;
  for (int n = 1; n <= 8; ++n)
    sep = std::max(sep, std::abs(laplace_transform_moments(ta, 1.0, n) -
                                 laplace_transform_moments(tc, 1.0, n)));
  CHECK(sep > 1e-6);
  const auto tvs = compare_partial_sum_laws(ta, tc, 8);
  CHECK(*std::max_element(tvs.begin(), tvs.end()) > 1e-6);
}

}  // TEST_SUITE
