#include "forge/fourierlab.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forge/parallel.hpp"

namespace forge {

std::size_t GridDensity::cell_count() const {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m);
  return n;
}

void GridDensity::decode(std::size_t linear, int* k) const {
  for (int i = d - 1; i >= 0; --i) {
    k[i] = static_cast<int>(linear % static_cast<std::size_t>(m));
    linear /= static_cast<std::size_t>(m);
  }
}

double GridDensity::cell_volume() const {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= delta();
  return v;
}

namespace {

double f_factor(double u) {
  if (std::abs(u) < 1e-2) {
    const double u2 = u * u;
    return -1.0 / 6.0 + u2 / 120.0 - u2 * u2 / 5040.0;
  }
  return (std::sin(u) - u) / (u * u * u);
}

std::size_t pow_size(int m, int d) {
  std::size_t n = 1;
  for (int i = 0; i < d; ++i) n *= static_cast<std::size_t>(m);
  return n;
}

void validate_grid(int d, int m) {
  if (d < 1 || d > 4) throw std::invalid_argument("grid dimension must be 1..4");
  if (m < 4 || (m & (m - 1)) != 0)
    throw std::invalid_argument("points-per-axis must be a power of two >= 4");
}

// Evaluates g = p^exponent * f^K over the grid; returns the values plus the
// overall and boundary-shell maxima of |g|.
struct GridEval {
  std::vector<double> values;
  double max_abs = 0.0;
  double boundary_max_abs = 0.0;
};

GridEval eval_g(const PolyD& p, int d, int m, double R, int K, int exponent) {
  GridEval out;
  const std::size_t n = pow_size(m, d);
  out.values.assign(n, 0.0);
  const double delta = 2.0 * R / m;

  const auto& terms = p.terms();
  std::vector<std::pair<MultiIndex, double>> term_list(terms.begin(), terms.end());

  const std::size_t chunk = std::size_t{1} << 16;
  const std::size_t nchunks = (n + chunk - 1) / chunk;
  std::vector<double> max_all(nchunks, 0.0), max_boundary(nchunks, 0.0);
  parallel_chunks(n, [&](std::size_t begin, std::size_t end) {
    const std::size_t c = begin / chunk;
    int k[4];
    double x[4];
    for (std::size_t idx = begin; idx < end; ++idx) {
      std::size_t rest = idx;
      bool boundary = false;
      for (int i = d - 1; i >= 0; --i) {
        k[i] = static_cast<int>(rest % static_cast<std::size_t>(m));
        rest /= static_cast<std::size_t>(m);
        if (k[i] == 0 || k[i] == m - 1) boundary = true;
        x[i] = (k[i] - m / 2 + 0.5) * delta;
      }
      double pv = 0.0;
      for (const auto& [e, c] : term_list) {
        double t = c;
        for (int i = 0; i < d; ++i)
          for (int rep = 0; rep < e[i]; ++rep) t *= x[i];
        pv += t;
      }
      double fv = 1.0;
      for (int i = 0; i < d; ++i) fv *= f_factor(x[i]);
      double g = std::pow(fv, K);
      for (int rep = 0; rep < exponent; ++rep) g *= pv;
      out.values[idx] = g;
      const double a = std::abs(g);
      max_all[c] = std::max(max_all[c], a);
      if (boundary) max_boundary[c] = std::max(max_boundary[c], a);
    }
  });
  for (std::size_t c = 0; c < nchunks; ++c) {
    out.max_abs = std::max(out.max_abs, max_all[c]);
    out.boundary_max_abs = std::max(out.boundary_max_abs, max_boundary[c]);
  }
  return out;
}

void validate_poly(const PolyQ& p, int d, int exponent) {
  if (p.nvars() != d)
    throw std::invalid_argument("polynomial arity does not match grid dimension");
  if (p.terms().empty()) throw std::invalid_argument("polynomial must be nonzero");
  if (!p.is_homogeneous())
    throw std::invalid_argument("polynomial must be homogeneous");
  if (p.degree() < 1)
    throw std::invalid_argument("polynomial must have degree >= 1");
  if (exponent != 1 && exponent != 2)
    throw std::invalid_argument("exponent must be 1 or 2");
}

}  // namespace

double eval_f(const std::vector<double>& x) {
  double v = 1.0;
  for (double u : x) v *= f_factor(u);
  return v;
}

int choose_K(const PolyQ& p, int d, double R, int m, int exponent) {
  validate_poly(p, d, exponent);
  validate_grid(d, m);
  if (R <= 0) throw std::invalid_argument("choose_K: R must be positive");
  const PolyD pd = to_double_poly(p);
  for (int K = p.degree() + d + 2; K <= 64; ++K) {
    const GridEval g = eval_g(pd, d, m, R, K, exponent);
    if (g.max_abs > 0 && g.boundary_max_abs < 1e-8 * g.max_abs) return K;
  }
  throw std::runtime_error("choose_K: no K <= 64 satisfies the boundary decay (R too small)");
}

std::vector<std::complex<double>> centered_transform(
    const std::vector<double>& values, int d, int m, double R) {
  validate_grid(d, m);
  const std::size_t n = pow_size(m, d);
  if (values.size() != n)
    throw std::invalid_argument("centered_transform: value count mismatch");

  fftw_complex* buf = fftw_alloc_complex(n);
  if (buf == nullptr) throw std::runtime_error("centered_transform: allocation failed");

  // Per axis, with x_k = (k - m/2 + 1/2) Delta and xi_q = (q - m/2) pi / R:
  // e^{-i xi_q x_k} = e^{-2 pi i q k / m} (-1)^k (-1)^q e^{-i pi q / m}
  //                   * i (-1)^{m/2}.
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    int parity = 0;
    for (int i = 0; i < d; ++i) {
      parity += static_cast<int>(rest % static_cast<std::size_t>(m));
      rest /= static_cast<std::size_t>(m);
    }
    const double sign = (parity % 2 != 0) ? -1.0 : 1.0;
    buf[idx][0] = values[idx] * sign;
    buf[idx][1] = 0.0;
  }

  std::vector<int> dims(static_cast<std::size_t>(d), m);
  fftw_plan plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  if (plan == nullptr) {
    fftw_free(buf);
    throw std::runtime_error("centered_transform: planning failed");
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  const double delta = 2.0 * R / m;
  std::complex<double> constant(1.0, 0.0);
  for (int i = 0; i < d; ++i) {
    constant *= delta * std::complex<double>(0.0, 1.0);
    if ((m / 2) % 2 != 0) constant = -constant;
  }

  // Per-axis output twiddle (-1)^q e^{-i pi q / m}, tabulated once.
  std::vector<std::complex<double>> twiddle(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) {
    const double ang = -M_PI * q / m;
    std::complex<double> t(std::cos(ang), std::sin(ang));
    if (q % 2 != 0) t = -t;
    twiddle[static_cast<std::size_t>(q)] = t;
  }

  std::vector<std::complex<double>> out(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    std::complex<double> factor = constant;
    for (int i = 0; i < d; ++i) {
      factor *= twiddle[rest % static_cast<std::size_t>(m)];
      rest /= static_cast<std::size_t>(m);
    }
    out[idx] = std::complex<double>(buf[idx][0], buf[idx][1]) * factor;
  }
  fftw_free(buf);
  return out;
}

CounterexamplePair build_counterexample(const PolyQ& p, int d, int m, double R,
                                        std::optional<int> K_opt, int exponent) {
  validate_poly(p, d, exponent);
  validate_grid(d, m);
  const int K = K_opt ? *K_opt : choose_K(p, d, R, m, exponent);

  GridEval g = eval_g(to_double_poly(p), d, m, R, K, exponent);
  if (g.max_abs == 0.0) throw std::runtime_error("build_counterexample: g vanished");
  // The construction is scale-free (the inversion constant is absorbed when
  // the split parts are renormalized), so fix max|g| = 1. This keeps the
  // absolute degenerate-mass floor meaningful for any K.
  for (double& v : g.values) v /= g.max_abs;

  const auto H = centered_transform(g.values, d, m, R);

  double max_mod = 0.0, max_imag = 0.0;
  for (const auto& z : H) {
    max_mod = std::max(max_mod, std::abs(z));
    max_imag = std::max(max_imag, std::abs(z.imag()));
  }
  const double imag_residual = max_mod > 0 ? max_imag / max_mod : 0.0;
  if (imag_residual > 1e-9)
    throw std::runtime_error(
        "build_counterexample: imaginary residue above tolerance (grid too coarse)");

  // Truncate sign noise, then Hahn-split h into nonnegative parts.
  const std::size_t n = H.size();
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) h[i] = H[i].real();
  double max_h = 0.0;
  for (double v : h) max_h = std::max(max_h, std::abs(v));
  for (double& v : h)
    if (std::abs(v) < 1e-14 * max_h) v = 0.0;

  CounterexamplePair pair;
  pair.p = p;
  pair.K = K;
  pair.exponent = exponent;
  pair.imag_residual = imag_residual;
  pair.boundary_decay = g.max_abs > 0 ? g.boundary_max_abs / g.max_abs : 0.0;

  const double R_dual = (m / 2) * M_PI / R;
  GridDensity plus{d, R_dual, m, std::vector<double>(n, 0.0), "h+", false};
  GridDensity minus{d, R_dual, m, std::vector<double>(n, 0.0), "h-", false};
  const double vol = plus.cell_volume();
  double mass_plus = 0.0, mass_minus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (h[i] > 0) {
      plus.values[i] = h[i];
      mass_plus += h[i] * vol;
    } else if (h[i] < 0) {
      minus.values[i] = -h[i];
      mass_minus += -h[i] * vol;
    }
  }
  pair.mass_plus = mass_plus;
  pair.mass_minus = mass_minus;
  if (mass_plus < 1e-12 || mass_minus < 1e-12)
    throw std::runtime_error("build_counterexample: degenerate sign split");
  pair.mass_mismatch = std::abs(mass_plus - mass_minus) / mass_plus;
  if (pair.mass_mismatch > 1e-6)
    throw std::runtime_error("build_counterexample: mass mismatch above tolerance");

  for (double& v : plus.values) v /= mass_plus;
  for (double& v : minus.values) v /= mass_minus;
  plus.label = "mu";
  minus.label = "nu";

  double l1 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    l1 += std::abs(plus.values[i] - minus.values[i]) * vol;
  pair.l1_distance = l1;

  pair.mu = std::move(plus);
  pair.nu = std::move(minus);
  return pair;
}

ProjectionReport verify_projection_equality(
    const CounterexamplePair& pair,
    const std::vector<std::vector<double>>& variety_dirs,
    const std::vector<std::vector<double>>& control_dirs,
    const std::vector<double>& t_grid) {
  const GridDensity& mu = pair.mu;
  const GridDensity& nu = pair.nu;
  const int d = mu.d;
  if (t_grid.empty()) throw std::invalid_argument("verify_projection_equality: empty t grid");

  const PolyD pd = to_double_poly(pair.p);
  const int deg = pair.p.degree();
  for (const auto& dir : variety_dirs) {
    if (static_cast<int>(dir.size()) != d)
      throw std::invalid_argument("verify_projection_equality: direction arity");
    double norm = 0.0;
    for (double c : dir) norm = std::max(norm, std::abs(c));
    double scale = 1.0;
    for (int i = 0; i < deg; ++i) scale *= std::max(norm, 1e-300);
    if (std::abs(pd.eval(dir)) > 1e-12 * scale)
      throw std::invalid_argument(
          "verify_projection_equality: direction off the variety");
  }

  // Signed-difference cloud: cells where mu or nu is nonzero.
  const double vol = mu.cell_volume();
  std::vector<std::size_t> cells;
  std::vector<double> weight;  // (mu - nu) * cell volume
  for (std::size_t i = 0; i < mu.values.size(); ++i) {
    const double w = (mu.values[i] - nu.values[i]) * vol;
    if (w != 0.0) {
      cells.push_back(i);
      weight.push_back(w);
    }
  }

  const auto ray_residual = [&](const std::vector<double>& dir) {
    // phi_mu(t dir) - phi_nu(t dir) = sum w_j e^{i t (dir . x_j)}.
    std::vector<double> proj(cells.size());
    parallel_chunks(cells.size(), [&](std::size_t b, std::size_t e) {
      int k[4];
      for (std::size_t idx = b; idx < e; ++idx) {
        mu.decode(cells[idx], k);
        double r = 0.0;
        for (int i = 0; i < d; ++i) r += dir[i] * mu.axis_coordinate(k[i]);
        proj[idx] = r;
      }
    });
    double worst = 0.0;
    for (double t : t_grid) {
      const double re = deterministic_sum(
          cells.size(), [&](std::size_t j) { return weight[j] * std::cos(t * proj[j]); });
      const double im = deterministic_sum(
          cells.size(), [&](std::size_t j) { return weight[j] * std::sin(t * proj[j]); });
      worst = std::max(worst, std::hypot(re, im));
    }
    return worst;
  };

  ProjectionReport rep;
  for (const auto& dir : variety_dirs) {
    rep.per_direction.push_back(ray_residual(dir));
    rep.on_variety_max = std::max(rep.on_variety_max, rep.per_direction.back());
  }
  for (const auto& dir : control_dirs) {
    if (static_cast<int>(dir.size()) != d)
      throw std::invalid_argument("verify_projection_equality: direction arity");
    rep.per_control_direction.push_back(ray_residual(dir));
    rep.off_variety_max = std::max(rep.off_variety_max, rep.per_control_direction.back());
  }
  return rep;
}

std::vector<double> grid_mixed_moments(const GridDensity& density,
                                       const std::vector<MultiIndex>& indices) {
  for (const auto& r : indices) {
    if (static_cast<int>(r.size()) != density.d)
      throw std::invalid_argument("grid_mixed_moments: index arity mismatch");
    if (total_degree(r) > 16)
      throw std::invalid_argument("grid_mixed_moments: total degree above 16");
  }
  const double vol = density.cell_volume();
  std::vector<double> out;
  out.reserve(indices.size());
  for (const auto& r : indices) {
    const double v = deterministic_sum(density.values.size(), [&](std::size_t idx) {
      const double w = density.values[idx];
      if (w == 0.0) return 0.0;
      int k[4];
      density.decode(idx, k);
      double t = w;
      for (int i = 0; i < density.d; ++i) {
        const double x = density.axis_coordinate(k[i]);
        for (int rep = 0; rep < r[i]; ++rep) t *= x;
      }
      return t;
    });
    out.push_back(v * vol);
  }
  return out;
}

}  // namespace forge
