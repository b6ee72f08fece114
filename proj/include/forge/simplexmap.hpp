#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "forge/atomcloud.hpp"
#include "forge/fourierlab.hpp"
#include "forge/rational.hpp"

namespace forge {

// Finitely supported probability measure on the reals: an element of the
// family of laws supported in a fixed atom list.
struct FiniteSupportMeasure {
  std::vector<double> atoms;    // strictly increasing
  std::vector<double> weights;  // nonnegative, sum 1 within 1e-12
};

// Sorts atoms, merges duplicates (within 1e-12), validates the simplex
// constraint.
FiniteSupportMeasure make_measure(std::vector<double> atoms,
                                  std::vector<double> weights);

double laplace_transform(const FiniteSupportMeasure& mu, double s);

// Discretized mixing law: a cloud over simplex weight vectors plus the
// shared atom list they weight.
struct MixingMeasure {
  std::vector<double> atoms;
  AtomCloud cloud;  // points are weight vectors over the atoms

  std::size_t component_count() const { return cloud.size(); }
  FiniteSupportMeasure component(std::size_t i) const;
};

// Converts a normalized grid density into an atom cloud: one atom per
// nonzero cell at the cell's coordinates. Atoms beyond `cap` are merged
// greedily (mass-preserving, nearest surviving neighbor in lexicographic
// cell order); trailing mass up to `tail_drop` is dropped from the lightest
// cells first, and the cloud is renormalized.
AtomCloud atomize(const GridDensity& density, std::size_t cap = 200000,
                  double tail_drop = 1e-9);

enum class RegionKind {
  order_simplex,   // 1 >= w_1 >= ... >= w_d >= 0
  corner_simplex,  // w_j >= 0, sum w_j <= 1
};

struct FitResult {
  double a = 1.0;
  std::vector<double> b;
  AtomCloud cloud;
  double margin = 0.0;  // slack margin of the transformed cloud
};

// Linear slack of a point inside the region (negative when outside).
double region_margin(const std::vector<double>& w, RegionKind region);

// Affine map w -> a*w + b placing the whole cloud strictly inside the
// region with margin >= 1e-6, a != 0. A cloud already inside with that
// margin is returned unchanged (a = 1, b = 0). The same map is applied to
// every point. Implementation fits the cloud's bounding box into the
// region's inscribed box (centered at the region's deepest point, 10%
// margin).
FitResult fit_into_region(const AtomCloud& cloud, RegionKind region);

// Telescoping map H(N) -> T_{N+1}: U_0 = 1 - W_1, U_j = W_j - W_{j+1},
// U_N = W_N. Monotonicity violations beyond 1e-12 are rejected.
std::vector<double> telescope_point(const std::vector<double>& w);
std::vector<Rational> telescope_point_exact(const std::vector<Rational>& w);
// Inverse T_{N+1} -> H(N): W_j = U_j + ... + U_N.
std::vector<double> telescope_inverse_point(const std::vector<double>& u);
std::vector<Rational> telescope_inverse_point_exact(const std::vector<Rational>& u);
// Applies telescope_point to every point; probabilities carried over.
AtomCloud telescope_to_simplex(const AtomCloud& cloud);

// Max residual of the algebraic identity
//   sum_{j=0}^{N} U_j y^j = 1 + (y - 1) * sum_{j=1}^{N} W_j y^{j-1}
// over `samples` random (y, W) draws (real y and complex y on the unit
// circle), with U the telescoped W. It is an identity; the residual must
// be <= 1e-12.
double telescoping_identity_check(int N, std::size_t samples,
                                  std::uint64_t seed = 1);

// Builds the mixing measure whose weight-vector law is the given cloud
// over T_N, with the given shared atom list (|atoms| = N, distinct).
MixingMeasure assemble_mixing_measure(const AtomCloud& cloud,
                                      const std::vector<double>& atoms);

// [delta_0, base, base*base, ...], M entries of exact discrete
// convolutions; entry k's Laplace transform equals L_base(s)^k (checked).
std::vector<FiniteSupportMeasure> convolution_family(
    const FiniteSupportMeasure& base, int M);

// Laws of k*T for k = 0..N, T ~ base.
std::vector<FiniteSupportMeasure> scaled_family(const FiniteSupportMeasure& base,
                                                int N);

}  // namespace forge
