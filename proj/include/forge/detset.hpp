#pragma once

// Determining-set analysis: parametric curve samplers, vanishing-polynomial
// search (exact and float), integer certificates for power curves, and the
// dimension-count / kernel search for the substitution map used by the
// complex-marginal construction.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/multipoly.hpp"
#include "forge/polycore.hpp"
#include "forge/rational.hpp"

namespace forge {

struct CurveSpec {
  enum class Family {
    moment_curve,        // s -> (1, s, ..., s^{N-1})
    laplace_atoms,       // s -> (e^{-a_0 s}, ..., e^{-a_{N-1} s})
    laplace_convolution, // s -> (L(s)^0, ..., L(s)^{N-1})
    laplace_scaled,      // s -> (L(0s), ..., L((N-1)s))
    poisson_LT,          // s -> (L(0s), ..., L((N-1)s)), L(s)=exp(lambda(e^{-s}-1))
    power_curve,         // k -> (a_0^k, ..., a_{N-1}^k)
    complex_PQ,          // (s,t,x,y) -> (s P_n(x,y) + t Q_n(x,y))_n, z = x+iy
    rational_LT,         // s -> (L(0s), ..., L((N-1)s)), L = p/q
  };

  Family family = Family::moment_curve;
  int N = 0;                                   // ambient dimension
  std::vector<double> atoms;                   // laplace_atoms exponents
  std::vector<long long> powers;               // power_curve integer list
  double lambda = 1.0;                         // poisson_LT
  std::vector<double> base_atoms, base_weights;  // base L for convolution/scaled
  UniPolyQ rat_p, rat_q;                       // rational_LT transform

  static CurveSpec moment(int N);
  static CurveSpec laplace(std::vector<double> atoms);
  static CurveSpec convolution(std::vector<double> base_atoms,
                               std::vector<double> base_weights, int N);
  static CurveSpec scaled(std::vector<double> base_atoms,
                          std::vector<double> base_weights, int N);
  static CurveSpec poisson(double lambda, int N);
  static CurveSpec power(std::vector<long long> a);
  static CurveSpec complex_pq(int N);
  static CurveSpec rational(UniPolyQ p, UniPolyQ q, int N);

  // Number of scalar parameters per sample point (4 for complex_PQ, else 1).
  int parameter_arity() const;
  bool is_laplace_type() const;  // families with s >= 0 domain
  // Families whose samples can be exact rationals at rational parameters.
  bool supports_exact() const;
  std::string describe() const;
};

// Deterministic samples; throws on parameters outside the family domain
// (s < 0 for Laplace-type families, q(js) = 0 for rational transforms).
std::vector<std::vector<double>> sample_curve(
    const CurveSpec& spec, const std::vector<std::vector<double>>& params);

std::vector<std::vector<Rational>> sample_curve_exact(
    const CurveSpec& spec, const std::vector<std::vector<Rational>>& params);

// Default parameter grids sized for a degree-l search (see SearchOptions).
std::vector<std::vector<double>> default_parameter_grid(const CurveSpec& spec,
                                                        int degree,
                                                        std::size_t count,
                                                        std::uint64_t seed);
std::vector<std::vector<Rational>> default_parameter_grid_exact(
    const CurveSpec& spec, int degree, std::size_t count);

// log |coordinate_j| at parameter s, stable for any real s including the
// strongly negative values used by the dominance stress test. Only defined
// for Laplace-type families (coordinates there are strictly positive).
std::vector<double> log_curve_coordinates(const CurveSpec& spec, double s);

struct DeterminationReport {
  std::string curve;
  int l_max = 0;

  enum class Verdict { witness_found, no_witness_up_to, exact_certificate };
  Verdict verdict = Verdict::no_witness_up_to;

  int witness_degree = -1;
  std::optional<PolyQ> witness;        // exact witness (exact mode / certificates)
  std::optional<PolyD> witness_float;  // float witness (float mode)
  std::vector<PolyQ> kernel;           // full exact kernel basis at witness degree
  std::vector<PolyD> kernel_float;     // full float kernel basis at witness degree

  std::size_t sample_count = 0;     // training samples at the last degree tested
  double held_out_residual = 0.0;   // max |witness| over held-out samples

  struct DegreeScan {
    int degree = 0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    std::size_t candidates = 0;  // kernel vectors below threshold
    std::size_t rejected = 0;    // candidates killed by held-out / stress tests
  };
  std::vector<DegreeScan> scans;            // float mode, one entry per degree
  std::vector<double> singular_values;      // float mode, last degree tested

  bool pairwise_coprime = false;            // coprime_certificate
  std::vector<Integer> monomial_values;     // coprime_certificate: the C_j
  std::size_t vandermonde_rank = 0;         // coprime_certificate

  std::string notes;
};

enum class KernelMode { exact, floating };

struct SearchOptions {
  double float_threshold = 1e-9;   // relative SVD threshold
  double sample_margin = 0.25;     // extra samples beyond basis size
  std::size_t held_out = 100;      // verification samples per degree
  std::size_t min_samples = 0;     // override: floor on training samples
  double accept_residual = 1e-6;   // held-out acceptance bound (normalized), float
  double stress_tolerance = 1e-6;  // dominance-stress rejection bound
  std::uint64_t seed = 1;          // deterministic grids that need randomness
};

// Searches degrees 1..l_max for a homogeneous polynomial vanishing on the
// curve. Exact mode requires a family with exact samples. In float mode a
// candidate must survive held-out evaluation and, for Laplace-type curves,
// a dominance stress test in log coordinates before it counts as a witness;
// surviving nothing at every degree yields no-witness-up-to(l_max).
DeterminationReport find_vanishing_polynomial(const CurveSpec& spec, int l_max,
                                              KernelMode mode,
                                              const SearchOptions& opts = {});

// Point-list variants (no curve structure, hence no stress test).
DeterminationReport find_vanishing_polynomial(
    const std::vector<std::vector<double>>& points, int l_max,
    const SearchOptions& opts = {});
DeterminationReport find_vanishing_polynomial(
    const std::vector<std::vector<Rational>>& points, int l_max);

// Exact integer certificate for power curves: evaluates every degree-l
// monomial at the a-list. All values distinct => exact-certificate with a
// full-rank Vandermonde check; a collision C_i = C_j => witness M_i - M_j.
DeterminationReport coprime_certificate(const std::vector<long long>& a, int l);

struct PhiDimensions {
  Integer dim_domain;    // C(N+l-1, l)
  Integer dim_codomain;  // C(lN+4, 4)
  bool kernel_guaranteed = false;
};

PhiDimensions phi_dimension_count(int N, int l);

// Degree-l basis monomials in N variables are separated by their exponent
// tails (r_1..r_{N-1}), so the dominance order on a fixed-degree basis is a
// strict total order. Exact enumeration check.
bool dominance_order_strict(int N, int l);

struct PhiKernelFind {
  int N = 0;
  int l = 0;
  PolyQ kernel_element;
  double held_out_residual = 0.0;  // 200 random samples, relative
};

struct PhiKernelSearchResult {
  std::optional<PhiKernelFind> found;
  bool caps_exhausted = false;
  std::vector<std::string> skipped_cells;  // cells aborted by the term cap
  std::vector<std::array<long long, 3>> scanned;  // (N, l, kernel dim found)
};

// Scans (N, l) with N <= N_max, l <= l_max in increasing domain dimension,
// building the substitution map's exact matrix and returning the first
// nontrivial kernel element (verified at 200 random samples, 1e-8 relative).
// No find within caps is a report, not a refutation.
PhiKernelSearchResult phi_kernel_search(int N_max, int l_max,
                                        std::size_t term_cap);

// Exact degree-l kernel for the successive-difference direction curve of a
// rational transform L = p/q scaled through j = 0..N-1: coordinates are the
// polynomials [p(js)q((j-1)s) - p((j-1)s)q(js)] * prod_{k != j, j-1} q(ks),
// j = 1..N-1. Returns canonical polynomials in N-1 variables vanishing on
// the curve identically.
std::vector<PolyQ> rational_difference_kernel(const UniPolyQ& p,
                                              const UniPolyQ& q, int N, int l);

}  // namespace forge
