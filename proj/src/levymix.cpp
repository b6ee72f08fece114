#include "forge/levymix.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "forge/rng.hpp"

namespace forge {

namespace {

void validate_finite_measure(const FiniteMeasure& nu) {
  if (nu.atoms.size() != nu.masses.size())
    throw std::invalid_argument("finite measure: atom/mass count mismatch");
  for (double m : nu.masses)
    if (!(m >= 0.0))
      throw std::invalid_argument("finite measure: negative mass");
}

std::vector<double> linspace(double lo, double hi, int count) {
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    out[static_cast<std::size_t>(i)] =
        lo + (hi - lo) * i / std::max(1, count - 1);
  return out;
}

}  // namespace

double FiniteMeasure::total_mass() const {
  double total = 0.0;
  for (double m : masses) total += m;
  return total;
}

void validate_triple(const LevyTriple& triple) {
  if (!(triple.sigma2 >= 0.0))
    throw std::invalid_argument("levy triple: negative diffusion");
  validate_finite_measure(triple.nu);
  for (double a : triple.nu.atoms)
    if (a == 0.0)
      throw std::invalid_argument("levy triple: jump measure atom at zero");
}

void LevyMixing::validate() const {
  if (probs.size() != components.size() || probs.empty())
    throw std::invalid_argument("levy mixture: component count mismatch");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0))
      throw std::invalid_argument("levy mixture: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("levy mixture: probabilities must sum to 1");
  for (const auto& c : components) validate_triple(c);
}

std::complex<double> levy_khintchine_chf(const LevyTriple& triple, double t,
                                         double u) {
  if (t < 0) throw std::invalid_argument("levy_khintchine_chf: t >= 0");
  validate_triple(triple);
  std::complex<double> expo(0.0, u * t * triple.beta);
  expo -= u * u * t * triple.sigma2 / 2.0;
  for (std::size_t j = 0; j < triple.nu.atoms.size(); ++j) {
    const double a = triple.nu.atoms[j];
    const double m = triple.nu.masses[j];
    const double scale = (1.0 + a * a) / (a * a);
    const std::complex<double> kernel(std::cos(u * a) - 1.0,
                                      std::sin(u * a) - u * a / (1.0 + a * a));
    expo += t * m * scale * kernel;
  }
  return std::exp(expo);
}

std::complex<double> mixture_marginal_chf(const LevyMixing& mix, double t,
                                          double u) {
  mix.validate();
  std::complex<double> out(0.0, 0.0);
  for (std::size_t i = 0; i < mix.components.size(); ++i)
    out += mix.probs[i] * levy_khintchine_chf(mix.components[i], t, u);
  return out;
}

std::complex<double> HybridTable::at(std::size_t iu, std::size_t is) const {
  return values.at(iu * s_grid.size() + is);
}

HybridTable bm_hybrid_transform(const LevyMixing& mix,
                                const std::vector<double>& u_grid,
                                const std::vector<double>& s_grid,
                                double time) {
  mix.validate();
  for (const auto& c : mix.components)
    if (c.nu.total_mass() > 0.0)
      throw std::invalid_argument(
          "bm_hybrid_transform: component has a jump part");

  HybridTable table;
  table.time = time;
  table.u_grid = u_grid.empty() ? linspace(-4.0, 4.0, 17) : u_grid;
  table.s_grid = s_grid.empty() ? linspace(0.0, 4.0, 17) : s_grid;
  table.values.reserve(table.u_grid.size() * table.s_grid.size());
  for (double u : table.u_grid)
    for (double s : table.s_grid) {
      std::complex<double> acc(0.0, 0.0);
      for (std::size_t i = 0; i < mix.components.size(); ++i) {
        const double x = time * mix.components[i].beta;
        const double y = time * mix.components[i].sigma2;
        acc += mix.probs[i] * std::exp(std::complex<double>(-s * y, u * x));
      }
      table.values.push_back(acc);
    }
  return table;
}

double hybrid_separation(const HybridTable& a, const HybridTable& b) {
  if (a.u_grid != b.u_grid || a.s_grid != b.s_grid || a.time != b.time)
    throw std::invalid_argument("hybrid_separation: grids differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

std::complex<double> normal_mixture_Sn_chf(const MeanVarMixture& mix, int n,
                                           double t) {
  if (n < 1) throw std::invalid_argument("normal_mixture_Sn_chf: n >= 1");
  if (mix.probs.size() != mix.means.size() ||
      mix.probs.size() != mix.vars.size() || mix.probs.empty())
    throw std::invalid_argument("normal_mixture_Sn_chf: size mismatch");
  std::complex<double> out(0.0, 0.0);
  for (std::size_t i = 0; i < mix.probs.size(); ++i) {
    if (mix.vars[i] < 0.0)
      throw std::invalid_argument("normal_mixture_Sn_chf: negative variance");
    out += mix.probs[i] * std::exp(std::complex<double>(
                              -t * t * n * mix.vars[i] / 2.0,
                              t * n * mix.means[i]));
  }
  return out;
}

double lispp_laplace_exponent(const LisppSpec& spec, double s) {
  if (s < 0) throw std::invalid_argument("lispp_laplace_exponent: s >= 0");
  validate_finite_measure(spec.mu);
  double psi = 0.0;
  for (std::size_t j = 0; j < spec.mu.atoms.size(); ++j) {
    const double a = spec.mu.atoms[j];
    if (a < 0)
      throw std::invalid_argument("lispp_laplace_exponent: negative atom");
    psi += (std::expm1(-s * a)) * spec.mu.masses[j];
  }
  return psi;
}

double lispp_mixture_laplace_moments(const LisppMixing& mix, double t,
                                     double s, int n) {
  if (t < 0 || s < 0 || n < 0)
    throw std::invalid_argument("lispp moments: t, s >= 0 and n >= 0");
  if (mix.probs.size() != mix.specs.size() || mix.probs.empty())
    throw std::invalid_argument("lispp moments: size mismatch");
  double out = 0.0;
  for (std::size_t i = 0; i < mix.probs.size(); ++i)
    out += mix.probs[i] *
           std::exp(n * t * lispp_laplace_exponent(mix.specs[i], s));
  return out;
}

double lispp_power_identity_residual(const LisppSpec& spec, double t, double s,
                                     int n) {
  const double psi = lispp_laplace_exponent(spec, s);
  const double lhs = std::pow(std::exp(t * psi), n);
  const double rhs = std::exp(n * (t * psi));
  return std::abs(lhs - rhs);
}

namespace {

LevyTriple lispp_triple(const std::vector<double>& atoms,
                        const std::vector<double>& weights) {
  LevyTriple triple;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    const double a = atoms[j];
    const double w = weights[j];
    if (a == 0.0 || w <= 0.0) continue;  // zero jumps and null masses vanish
    triple.beta += w * a / (1.0 + a * a);
    triple.nu.atoms.push_back(a);
    triple.nu.masses.push_back(w * a * a / (1.0 + a * a));
  }
  return triple;
}

LisppSpec lispp_spec(const std::vector<double>& atoms,
                     const std::vector<double>& weights) {
  LisppSpec spec;
  for (std::size_t j = 0; j < atoms.size(); ++j)
    if (atoms[j] != 0.0 && weights[j] > 0.0) {
      spec.mu.atoms.push_back(atoms[j]);
      spec.mu.masses.push_back(weights[j]);
    }
  return spec;
}

}  // namespace

BridgeResult bridge_construct(const MixingMeasure& theta1,
                              const MixingMeasure& theta2) {
  for (const MixingMeasure* theta : {&theta1, &theta2}) {
    theta->cloud.validate();
    for (double a : theta->atoms)
      if (a < 0)
        throw std::invalid_argument("bridge_construct: negative atom");
  }
  BridgeResult out;
  const auto fill = [](const MixingMeasure& theta, LevyMixing& levy,
                       LisppMixing& lispp) {
    for (std::size_t i = 0; i < theta.cloud.size(); ++i) {
      levy.probs.push_back(theta.cloud.probs[i]);
      levy.components.push_back(
          lispp_triple(theta.atoms, theta.cloud.points[i]));
      lispp.probs.push_back(theta.cloud.probs[i]);
      lispp.specs.push_back(lispp_spec(theta.atoms, theta.cloud.points[i]));
    }
  };
  fill(theta1, out.levy1, out.lispp1);
  fill(theta2, out.levy2, out.lispp2);
  return out;
}

PathSample simulate_path(const LevyTriple& triple, double horizon,
                         int mesh_points, std::uint64_t seed) {
  if (!(horizon > 0)) throw std::invalid_argument("simulate_path: horizon > 0");
  if (mesh_points < 1)
    throw std::invalid_argument("simulate_path: mesh_points >= 1");
  validate_triple(triple);
  Rng rng(seed);

  // Effective drift after removing the jump compensator: the jump part with
  // rates m_j (1+a_j^2)/a_j^2 carries its own mean, and the exponent's
  // linear term contributes beta - sum_j m_j / a_j.
  double drift = triple.beta;
  std::vector<double> rates(triple.nu.atoms.size());
  for (std::size_t j = 0; j < triple.nu.atoms.size(); ++j) {
    const double a = triple.nu.atoms[j];
    const double m = triple.nu.masses[j];
    drift -= m / a;
    rates[j] = m * (1.0 + a * a) / (a * a);
  }

  // Jump events: exponential inter-arrival times per atom.
  std::vector<std::pair<double, double>> jumps;  // (time, size)
  for (std::size_t j = 0; j < rates.size(); ++j) {
    if (rates[j] <= 0.0) continue;
    double t = rng.exponential(rates[j]);
    while (t <= horizon) {
      jumps.emplace_back(t, triple.nu.atoms[j]);
      t += rng.exponential(rates[j]);
    }
  }
  std::sort(jumps.begin(), jumps.end());

  // Merged partition: mesh times plus jump times.
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(mesh_points) + jumps.size() + 1);
  for (int k = 0; k <= mesh_points; ++k)
    times.push_back(horizon * k / mesh_points);
  for (const auto& [t, size] : jumps) times.push_back(t);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  PathSample path;
  path.times = times;
  path.values.reserve(times.size());
  const double sigma = std::sqrt(triple.sigma2);
  double diffusion = 0.0;
  double jump_sum = 0.0;
  std::size_t next_jump = 0;
  double prev_t = 0.0;
  for (double t : times) {
    if (t > prev_t && sigma > 0.0)
      diffusion += sigma * std::sqrt(t - prev_t) * rng.normal();
    while (next_jump < jumps.size() && jumps[next_jump].first <= t)
      jump_sum += jumps[next_jump++].second;
    path.values.push_back(drift * t + diffusion + jump_sum);
    prev_t = t;
  }
  return path;
}

std::complex<double> empirical_marginal_chf(const LevyMixing& mix, double t,
                                            double u, std::size_t samples,
                                            std::uint64_t seed) {
  mix.validate();
  if (samples < 1)
    throw std::invalid_argument("empirical_marginal_chf: samples >= 1");
  if (!(t > 0))
    throw std::invalid_argument("empirical_marginal_chf: t > 0");
  Rng root(seed);
  std::complex<double> acc(0.0, 0.0);
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng = root.substream(i);
    const double pick = rng.uniform01();
    double cum = 0.0;
    std::size_t comp = mix.components.size() - 1;
    for (std::size_t c = 0; c < mix.probs.size(); ++c) {
      cum += mix.probs[c];
      if (pick < cum) {
        comp = c;
        break;
      }
    }
    const auto path =
        simulate_path(mix.components[comp], t, 1, rng.next_u64());
    const double x = path.values.back();
    acc += std::complex<double>(std::cos(u * x), std::sin(u * x));
  }
  return acc / static_cast<double>(samples);
}

}  // namespace forge
