#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forge/multipoly.hpp"

namespace forge {

// Regular rectangular grid on [-R, R)^d with m points per axis: the k-th
// coordinate along an axis is (k - m/2) * delta, delta = 2R/m.
struct GridDensity {
  int d = 0;
  double R = 0.0;
  int m = 0;
  std::vector<double> values;  // row-major, size m^d, last axis fastest
  std::string label;           // which function the grid holds
  // Cell-centered grids put points at (k - m/2 + 1/2) * delta (exactly
  // reflection-symmetric); dual grids sit at (k - m/2) * delta = k' pi / R.
  bool cell_centered = true;

  double delta() const { return 2.0 * R / m; }
  std::size_t cell_count() const;
  double axis_coordinate(int k) const {
    return ((k - m / 2) + (cell_centered ? 0.5 : 0.0)) * delta();
  }
  // Decodes a linear cell index into per-axis indices.
  void decode(std::size_t linear, int* k) const;
  double cell_volume() const;
};

struct CounterexamplePair {
  GridDensity mu;  // h+ / its mass (probability density on the dual grid)
  GridDensity nu;  // h- / its mass
  PolyQ p;
  int K = 0;
  int exponent = 2;          // g = p^exponent * f^K
  double mass_plus = 0.0;    // pre-normalization plus mass
  double mass_minus = 0.0;   // pre-normalization minus mass
  double mass_mismatch = 0.0;  // |mass_plus - mass_minus| / mass_plus
  double imag_residual = 0.0;  // max |Im transform| / max modulus
  double boundary_decay = 0.0;  // max |g| on boundary shell / max |g|
  double l1_distance = 0.0;     // integral |mu - nu| after normalization
};

// Product over coordinates of (sin u - u)/u^3; series near 0 keeps the
// evaluation smooth through the cancellation region.
double eval_f(const std::vector<double>& x);

// Smallest K >= deg(p) + d + 2 (K <= 64) whose tail decay on the grid
// boundary shell satisfies max|g| on shell < 1e-8 * max|g| overall, with
// g = p^exponent * f^K. Throws when no K <= 64 works (R too small).
int choose_K(const PolyQ& p, int d, double R, int m, int exponent = 2);

// Centered discrete transform: values live on the cell-centered grid
// x_k = (k - m/2 + 1/2) * 2R/m, the result on the dual grid
// xi_q = (q - m/2) * pi / R, approximating integral of v(x) e^{-i xi x} dx
// with Delta^d-weighted sums.
std::vector<std::complex<double>> centered_transform(
    const std::vector<double>& values, int d, int m, double R);

// The constructive counterexample: g = p^exponent * f^K, h its transform,
// mu = h+ dx and nu = h- dx renormalized to probability densities on the
// dual grid. Throws when the imaginary residue, the pre-normalization mass
// mismatch, or a degenerate split violates the documented tolerances.
CounterexamplePair build_counterexample(const PolyQ& p, int d, int m, double R,
                                        std::optional<int> K = std::nullopt,
                                        int exponent = 2);

struct ProjectionReport {
  double on_variety_max = 0.0;   // max |phi_mu - phi_nu| over variety rays
  double off_variety_max = 0.0;  // same over control directions
  std::vector<double> per_direction;          // one residual per variety dir
  std::vector<double> per_control_direction;  // one residual per control dir
};

// Characteristic functions along rays t * direction, by grid quadrature.
// Every variety direction x must satisfy |p(x)| <= 1e-12 * ||x||^deg(p).
ProjectionReport verify_projection_equality(
    const CounterexamplePair& pair,
    const std::vector<std::vector<double>>& variety_dirs,
    const std::vector<std::vector<double>>& control_dirs,
    const std::vector<double>& t_grid);

// Riemann-sum mixed moments of a normalized grid density; total degree
// capped at 16 (accuracy guard).
std::vector<double> grid_mixed_moments(const GridDensity& density,
                                       const std::vector<MultiIndex>& indices);

}  // namespace forge
