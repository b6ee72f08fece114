#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "forge/simplexmap.hpp"

namespace forge {

// Finite nonnegative measure on the reals with finitely many atoms.
// Not necessarily a probability measure.
struct FiniteMeasure {
  std::vector<double> atoms;
  std::vector<double> masses;  // nonnegative

  double total_mass() const;
};

// Characteristic triple of a Lévy process: drift, diffusion coefficient,
// and a finite jump-compensation measure with no atom at zero.
struct LevyTriple {
  double beta = 0.0;
  double sigma2 = 0.0;
  FiniteMeasure nu;
};

void validate_triple(const LevyTriple& triple);

// Finite mixture of Lévy processes: component probabilities sum to 1.
struct LevyMixing {
  std::vector<double> probs;
  std::vector<LevyTriple> components;

  void validate() const;
};

// Jump measure of a process that is a limit of independent sums of Poisson
// processes: finitely many nonnegative atoms.
struct LisppSpec {
  FiniteMeasure mu;
};

struct LisppMixing {
  std::vector<double> probs;
  std::vector<LisppSpec> specs;
};

// Marginal characteristic function value E[e^{iuX_t}] of the process with
// the given triple: exponent iutb - u^2 t s2 / 2 +
// t * sum_j (e^{iu a_j} - 1 - iu a_j/(1+a_j^2)) (1+a_j^2)/a_j^2 * m_j.
std::complex<double> levy_khintchine_chf(const LevyTriple& triple, double t,
                                         double u);

// Probability-weighted sum of component characteristic functions.
std::complex<double> mixture_marginal_chf(const LevyMixing& mix, double t,
                                          double u);

// Hybrid transform table E[e^{iu(t b) - s(t s2)}] of a mixture of
// drift+diffusion components (all jump parts must vanish), evaluated at a
// fixed observation time over a (u, s) grid.
struct HybridTable {
  double time = 1.0;
  std::vector<double> u_grid;  // default 17 points on [-4, 4]
  std::vector<double> s_grid;  // default 17 points on [0, 4]
  std::vector<std::complex<double>> values;  // row-major over (u, s)

  std::complex<double> at(std::size_t iu, std::size_t is) const;
};

HybridTable bm_hybrid_transform(const LevyMixing& mix,
                                const std::vector<double>& u_grid = {},
                                const std::vector<double>& s_grid = {},
                                double time = 1.0);

// Max absolute entry difference of two tables on identical grids.
double hybrid_separation(const HybridTable& a, const HybridTable& b);

// Mixture of normal laws indexed by (mean, variance) pairs.
struct MeanVarMixture {
  std::vector<double> probs;
  std::vector<double> means;
  std::vector<double> vars;  // nonnegative
};

// E[e^{itnM - t^2 n V / 2}] for the partial-sum scale n.
std::complex<double> normal_mixture_Sn_chf(const MeanVarMixture& mix, int n,
                                           double t);

// psi(s) = sum_j (e^{-s a_j} - 1) m_j. Requires s >= 0 and atoms >= 0;
// psi(0) = 0 and psi is nonincreasing.
double lispp_laplace_exponent(const LisppSpec& spec, double s);

// E[e^{n t psi_mu(s)}] over the mixture.
double lispp_mixture_laplace_moments(const LisppMixing& mix, double t,
                                     double s, int n);

// |(e^{t psi})^n - e^{n t psi}| — the exponent-algebra cancellation,
// evaluated in floating point (zero up to rounding).
double lispp_power_identity_residual(const LisppSpec& spec, double t, double s,
                                     int n);

// Maps each weight vector w over nonnegative atoms a to the jump measure
// sum_j w_j delta_{a_j} (zero atoms dropped: a jump of size zero is no
// jump), returning both the Lévy-triple mixtures (beta = sum w_j a_j /
// (1+a_j^2), sigma2 = 0, nu = x^2/(1+x^2) d mu) and the raw jump-measure
// mixtures.
struct BridgeResult {
  LevyMixing levy1, levy2;
  LisppMixing lispp1, lispp2;
};

BridgeResult bridge_construct(const MixingMeasure& theta1,
                              const MixingMeasure& theta2);

// Sampled path of a drift + diffusion + finite-atom jump process: Gaussian
// increments on the merged mesh/event partition, exponential inter-event
// times per jump atom. Right-continuous: values include jumps at <= t.
struct PathSample {
  std::vector<double> times;
  std::vector<double> values;
};

PathSample simulate_path(const LevyTriple& triple, double horizon,
                         int mesh_points, std::uint64_t seed);

// Empirical E[e^{iuX_t}] over `samples` simulated paths of the mixture.
std::complex<double> empirical_marginal_chf(const LevyMixing& mix, double t,
                                            double u, std::size_t samples,
                                            std::uint64_t seed);

}  // namespace forge
