#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "forge/simplexmap.hpp"

namespace forge {

// Law of a random variable with finite support: values strictly increasing,
// probabilities nonnegative and summing to 1 within 1e-12.
struct LatticeLaw {
  std::vector<double> values;
  std::vector<double> probs;
};

// Exact total-variation distance on the merged support (values matched
// within `tol`).
double total_variation(const LatticeLaw& a, const LatticeLaw& b,
                       double tol = 1e-12);

// Exact discrete convolution of two lattice laws (values matched within
// `tol` when merging).
LatticeLaw convolve_laws(const LatticeLaw& a, const LatticeLaw& b,
                         double tol = 1e-12);

// Table of mixed weight moments m_r = E[prod_j W_j^{r_j}] under a mixing
// measure, for all multi-indices with |r| <= max_degree.
struct MomentTable {
  int nvars = 0;
  int max_degree = 0;
  std::map<std::vector<int>, double> moments;

  double at(const std::vector<int>& r) const;
};

// Exact weighted sums over the cloud, every multi-index of total degree
// <= D (D <= 20). m_0 = 1 and 0 <= m_r <= 1 always hold for simplex
// weight vectors.
MomentTable mixed_moments(const MixingMeasure& theta, int max_degree);

// Law of S_n = X_1 + ... + X_n for the exchangeable sequence directed by
// theta: sums multinomial(n; r) * m_r over all weak compositions r of n,
// at lattice value sum_j r_j * a_j. Integer atom lists merge on the exact
// integer lattice; real atoms merge within 1e-12. Composition counts
// beyond 10^6 are rejected.
LatticeLaw exact_partial_sum_law(const MixingMeasure& theta, int n);

// TV(law1(S_n), law2(S_n)) for n = 1..n_max. The two measures must share
// the atom list exactly.
std::vector<double> compare_partial_sum_laws(const MixingMeasure& theta1,
                                             const MixingMeasure& theta2,
                                             int n_max);

// E[L_alpha(s)^n] where L_alpha(s) = sum_j W_j e^{-s a_j}. Requires
// nonnegative atoms and s >= 0.
double laplace_transform_moments(const MixingMeasure& theta, double s, int n);

// Inverts exact_partial_sum_law on atom lists whose integer combinations
// sum_j r_j a_j are pairwise distinct for all multi-indices 1 <= |r| <= D
// (the computable surrogate of rational linear independence up to degree
// D; distinctness within 1e-9 is checked and failure aborts).
// laws[k] must be the law of S_{k+1}, k = 0..D-1.
MomentTable recover_mixed_moments(const std::vector<LatticeLaw>& laws,
                                  const std::vector<double>& atoms, int D);

// E[(mu_k)^n] with mu_k = sum_j W_j a_j^k, accumulated in extended
// precision (k <= 60, at most 8 atoms).
long double marginal_moment_law_moments(const MixingMeasure& theta, int k,
                                        int n);

// Max over t in t_grid, directions (u,v) on the half circle, and degrees
// n <= degree of |E[(u Re phi + v Im phi)^n]_1 - E[...]_2| where
// phi = sum_j W_j e^{i t a_j} is the conditional characteristic function.
double marginal_chf_comparison(const MixingMeasure& theta1,
                               const MixingMeasure& theta2,
                               const std::vector<double>& t_grid, int degree);

struct SampledSequence {
  std::size_t component;        // index of the sampled weight vector
  std::vector<double> weights;  // the sampled conditional law's weights
  std::vector<double> xs;       // X_1..X_n
  std::vector<double> partial_sums;  // S_1..S_n
};

// Deterministic given (theta, n, seed): draws the directing weight vector,
// then X_i iid from it.
SampledSequence sample_sequence(const MixingMeasure& theta, int n,
                                std::uint64_t seed);

// Empirical law of S_n over `samples` independent sequences (seeds derived
// from `seed` by substreaming).
LatticeLaw empirical_partial_sum_law(const MixingMeasure& theta, int n,
                                     std::size_t samples, std::uint64_t seed);

}  // namespace forge
