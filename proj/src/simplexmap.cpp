#include "forge/simplexmap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "forge/rng.hpp"

namespace forge {

FiniteSupportMeasure make_measure(std::vector<double> atoms,
                                  std::vector<double> weights) {
  if (atoms.size() != weights.size() || atoms.empty())
    throw std::invalid_argument("make_measure: atom/weight count mismatch");
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return atoms[i] < atoms[j]; });

  FiniteSupportMeasure out;
  double total = 0.0;
  for (std::size_t idx : order) {
    const double a = atoms[idx];
    const double w = weights[idx];
    if (!(w >= 0.0)) throw std::invalid_argument("make_measure: negative weight");
    total += w;
    if (!out.atoms.empty() && a - out.atoms.back() <= 1e-12) {
      out.weights.back() += w;
    } else {
      out.atoms.push_back(a);
      out.weights.push_back(w);
    }
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("make_measure: weights must sum to 1");
  // Canonical form: the support carries strictly positive weight.
  FiniteSupportMeasure support;
  for (std::size_t j = 0; j < out.atoms.size(); ++j)
    if (out.weights[j] > 0.0) {
      support.atoms.push_back(out.atoms[j]);
      support.weights.push_back(out.weights[j]);
    }
  if (support.atoms.empty())
    throw std::invalid_argument("make_measure: no positive weight");
  return support;
}

double laplace_transform(const FiniteSupportMeasure& mu, double s) {
  double v = 0.0;
  for (std::size_t j = 0; j < mu.atoms.size(); ++j)
    v += mu.weights[j] * std::exp(-mu.atoms[j] * s);
  return v;
}

FiniteSupportMeasure MixingMeasure::component(std::size_t i) const {
  std::vector<double> w = cloud.points.at(i);
  double sum = 0.0;
  for (double& v : w) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (sum <= 0.0) throw std::runtime_error("component: zero weight vector");
  for (double& v : w) v /= sum;
  return make_measure(atoms, w);
}

AtomCloud atomize(const GridDensity& density, std::size_t cap, double tail_drop) {
  if (cap < 1) throw std::invalid_argument("atomize: cap must be positive");
  const double vol = density.cell_volume();

  AtomCloud cloud;
  cloud.d = density.d;
  std::vector<int> k(static_cast<std::size_t>(density.d));
  for (std::size_t idx = 0; idx < density.values.size(); ++idx) {
    const double mass = density.values[idx] * vol;
    if (mass <= 0.0) continue;
    density.decode(idx, k.data());
    std::vector<double> pt(static_cast<std::size_t>(density.d));
    for (int i = 0; i < density.d; ++i) pt[i] = density.axis_coordinate(k[i]);
    cloud.points.push_back(std::move(pt));
    cloud.probs.push_back(mass);
  }
  if (cloud.points.empty()) throw std::invalid_argument("atomize: empty density");

  // Drop the lightest atoms while their cumulative mass stays <= tail_drop.
  if (tail_drop > 0.0 && cloud.points.size() > 1) {
    std::vector<std::size_t> order(cloud.points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return cloud.probs[i] < cloud.probs[j];
    });
    double total = 0.0;
    for (double p : cloud.probs) total += p;
    double cum = 0.0;
    std::vector<bool> dropped(cloud.points.size(), false);
    for (std::size_t idx : order) {
      if (cum + cloud.probs[idx] > tail_drop * total) break;
      cum += cloud.probs[idx];
      dropped[idx] = true;
    }
    if (cum > 0.0) {
      AtomCloud kept;
      kept.d = cloud.d;
      for (std::size_t i = 0; i < cloud.points.size(); ++i)
        if (!dropped[i]) {
          kept.points.push_back(std::move(cloud.points[i]));
          kept.probs.push_back(cloud.probs[i]);
        }
      cloud = std::move(kept);
    }
  }

  // Greedy nearest-neighbor merge down to the cap. Atoms are kept in
  // lexicographic cell order (the construction order), and each merge
  // collapses the closest surviving adjacent pair into its mass-weighted
  // centroid — mass-preserving by construction.
  if (cloud.points.size() > cap) {
    const std::size_t n = cloud.points.size();
    std::vector<std::size_t> prev(n), next(n);
    for (std::size_t i = 0; i < n; ++i) {
      prev[i] = i == 0 ? n : i - 1;
      next[i] = i + 1 == n ? n : i + 1;
    }
    const auto dist2 = [&](std::size_t i, std::size_t j) {
      double s = 0.0;
      for (int c = 0; c < cloud.d; ++c) {
        const double dv = cloud.points[i][static_cast<std::size_t>(c)] -
                          cloud.points[j][static_cast<std::size_t>(c)];
        s += dv * dv;
      }
      return s;
    };
    using Entry = std::pair<double, std::pair<std::size_t, std::size_t>>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    for (std::size_t i = 0; i + 1 < n; ++i) heap.push({dist2(i, i + 1), {i, i + 1}});
    std::vector<bool> alive(n, true);
    std::size_t remaining = n;
    while (remaining > cap && !heap.empty()) {
      const auto [d2, pr] = heap.top();
      heap.pop();
      const auto [i, j] = pr;
      if (!alive[i] || !alive[j] || next[i] != j) continue;  // stale entry
      if (dist2(i, j) != d2) continue;
      // Merge j into i.
      const double mi = cloud.probs[i], mj = cloud.probs[j];
      const double mass = mi + mj;
      for (int c = 0; c < cloud.d; ++c) {
        auto& pi = cloud.points[i][static_cast<std::size_t>(c)];
        pi = (pi * mi + cloud.points[j][static_cast<std::size_t>(c)] * mj) / mass;
      }
      cloud.probs[i] = mass;
      alive[j] = false;
      next[i] = next[j];
      if (next[i] != n) prev[next[i]] = i;
      --remaining;
      if (prev[i] != n) heap.push({dist2(prev[i], i), {prev[i], i}});
      if (next[i] != n) heap.push({dist2(i, next[i]), {i, next[i]}});
    }
    AtomCloud merged;
    merged.d = cloud.d;
    for (std::size_t i = 0; i < n; ++i)
      if (alive[i]) {
        merged.points.push_back(std::move(cloud.points[i]));
        merged.probs.push_back(cloud.probs[i]);
      }
    cloud = std::move(merged);
  }

  double total = 0.0;
  for (double p : cloud.probs) total += p;
  for (double& p : cloud.probs) p /= total;
  cloud.validate();
  return cloud;
}

double region_margin(const std::vector<double>& w, RegionKind region) {
  if (w.empty()) throw std::invalid_argument("region_margin: empty point");
  if (region == RegionKind::order_simplex) {
    double m = std::min(1.0 - w.front(), w.back());
    for (std::size_t j = 0; j + 1 < w.size(); ++j) m = std::min(m, w[j] - w[j + 1]);
    return m;
  }
  double sum = 0.0, m = 1.0;
  for (double v : w) {
    m = std::min(m, v);
    sum += v;
  }
  return std::min(m, 1.0 - sum);
}

FitResult fit_into_region(const AtomCloud& cloud, RegionKind region) {
  cloud.validate();
  const int d = cloud.d;
  if (d < 1) throw std::invalid_argument("fit_into_region: empty-dimension region");

  const auto cloud_margin = [&](const AtomCloud& c) {
    double m = 1.0;
    for (const auto& pt : c.points) m = std::min(m, region_margin(pt, region));
    return m;
  };

  FitResult res;
  res.cloud = cloud;
  res.b.assign(static_cast<std::size_t>(d), 0.0);
  res.margin = cloud_margin(cloud);
  if (res.margin >= 1e-6) return res;  // already strictly inside

  // Inscribed box: per-axis center and half-width with 10% slack.
  std::vector<double> center(static_cast<std::size_t>(d));
  double half;
  if (region == RegionKind::order_simplex) {
    for (int j = 0; j < d; ++j)
      center[static_cast<std::size_t>(j)] = (d - j - 0.5) / d;
    half = 0.9 / (2.0 * d);
  } else {
    for (int j = 0; j < d; ++j) center[static_cast<std::size_t>(j)] = 1.0 / (d + 1);
    half = 0.9 / (d * (d + 1.0));
  }

  std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    lo[static_cast<std::size_t>(j)] = hi[static_cast<std::size_t>(j)] =
        cloud.points.front()[static_cast<std::size_t>(j)];
  }
  for (const auto& pt : cloud.points)
    for (int j = 0; j < d; ++j) {
      lo[static_cast<std::size_t>(j)] = std::min(lo[static_cast<std::size_t>(j)],
                                                 pt[static_cast<std::size_t>(j)]);
      hi[static_cast<std::size_t>(j)] = std::max(hi[static_cast<std::size_t>(j)],
                                                 pt[static_cast<std::size_t>(j)]);
    }
  double width = 0.0;
  for (int j = 0; j < d; ++j)
    width = std::max(width, hi[static_cast<std::size_t>(j)] - lo[static_cast<std::size_t>(j)]);

  res.a = width > 0.0 ? half / width : half;
  for (int j = 0; j < d; ++j) {
    const double mid = 0.5 * (lo[static_cast<std::size_t>(j)] + hi[static_cast<std::size_t>(j)]);
    res.b[static_cast<std::size_t>(j)] = center[static_cast<std::size_t>(j)] - res.a * mid;
  }
  for (auto& pt : res.cloud.points)
    for (int j = 0; j < d; ++j)
      pt[static_cast<std::size_t>(j)] =
          res.a * pt[static_cast<std::size_t>(j)] + res.b[static_cast<std::size_t>(j)];
  res.margin = cloud_margin(res.cloud);
  if (res.margin < 1e-6)
    throw std::runtime_error("fit_into_region: margin below tolerance after fit");
  return res;
}

namespace {

template <typename T>
std::vector<T> telescope_impl(const std::vector<T>& w, const T& zero, const T& one) {
  if (w.empty()) throw std::invalid_argument("telescope: empty point");
  std::vector<T> u;
  u.reserve(w.size() + 1);
  u.push_back(one - w.front());
  for (std::size_t j = 0; j + 1 < w.size(); ++j) u.push_back(w[j] - w[j + 1]);
  u.push_back(w.back());
  (void)zero;
  return u;
}

template <typename T>
std::vector<T> telescope_inverse_impl(const std::vector<T>& u) {
  if (u.size() < 2) throw std::invalid_argument("telescope inverse: need >= 2 coords");
  std::vector<T> w(u.size() - 1);
  T acc = u.back();
  w.back() = acc;
  for (std::size_t j = u.size() - 2; j >= 1; --j) {
    acc += u[j];
    w[j - 1] = acc;
  }
  return w;
}

void check_monotone(const std::vector<double>& w) {
  double prevv = 1.0;
  for (double v : w) {
    if (v > prevv + 1e-12 || v < -1e-12)
      throw std::invalid_argument("telescope: monotonicity violated");
    prevv = v;
  }
}

}  // namespace

std::vector<double> telescope_point(const std::vector<double>& w) {
  check_monotone(w);
  return telescope_impl(w, 0.0, 1.0);
}

std::vector<Rational> telescope_point_exact(const std::vector<Rational>& w) {
  Rational prevv(1);
  for (const auto& v : w) {
    if (v > prevv || v < 0)
      throw std::invalid_argument("telescope: monotonicity violated");
    prevv = v;
  }
  return telescope_impl(w, Rational(0), Rational(1));
}

std::vector<double> telescope_inverse_point(const std::vector<double>& u) {
  return telescope_inverse_impl(u);
}

std::vector<Rational> telescope_inverse_point_exact(const std::vector<Rational>& u) {
  return telescope_inverse_impl(u);
}

AtomCloud telescope_to_simplex(const AtomCloud& cloud) {
  cloud.validate();
  AtomCloud out;
  out.d = cloud.d + 1;
  out.probs = cloud.probs;
  out.points.reserve(cloud.points.size());
  for (const auto& pt : cloud.points) {
    auto u = telescope_point(pt);
    // Clamp the rounding dust so the image is a genuine simplex point.
    for (double& v : u) v = std::max(v, 0.0);
    out.points.push_back(std::move(u));
  }
  return out;
}

double telescoping_identity_check(int N, std::size_t samples, std::uint64_t seed) {
  if (N < 2) throw std::invalid_argument("telescoping_identity_check: N >= 2");
  Rng rng(seed);
  double worst = 0.0;

  const auto residual_at = [&](const std::complex<double>& y,
                               const std::vector<double>& w) {
    const auto u = telescope_impl(w, 0.0, 1.0);
    std::complex<double> lhs(0.0, 0.0), rhs(0.0, 0.0), yp(1.0, 0.0);
    for (std::size_t j = 0; j < u.size(); ++j) {
      lhs += u[j] * yp;
      yp *= y;
    }
    yp = std::complex<double>(1.0, 0.0);
    for (std::size_t j = 0; j < w.size(); ++j) {
      rhs += w[j] * yp;
      yp *= y;
    }
    rhs = rhs * (y - 1.0) + 1.0;
    return std::abs(lhs - rhs);
  };

  for (std::size_t it = 0; it < samples; ++it) {
    // Random monotone W in H(N).
    std::vector<double> w(static_cast<std::size_t>(N));
    for (auto& v : w) v = rng.uniform01();
    std::sort(w.begin(), w.end(), std::greater<double>());

    worst = std::max(worst, residual_at({rng.uniform(-2.0, 2.0), 0.0}, w));
    worst = std::max(worst, residual_at({1.0, 0.0}, w));
    const double theta = rng.uniform(0.0, 2.0 * M_PI);
    worst = std::max(worst, residual_at({std::cos(theta), std::sin(theta)}, w));
  }
  return worst;
}

MixingMeasure assemble_mixing_measure(const AtomCloud& cloud,
                                      const std::vector<double>& atoms) {
  cloud.validate();
  if (static_cast<int>(atoms.size()) != cloud.d)
    throw std::invalid_argument("assemble_mixing_measure: atom count mismatch");
  for (std::size_t i = 0; i + 1 < atoms.size(); ++i)
    for (std::size_t j = i + 1; j < atoms.size(); ++j)
      if (atoms[i] == atoms[j])
        throw std::invalid_argument("assemble_mixing_measure: atoms must be distinct");
  for (const auto& pt : cloud.points) {
    double sum = 0.0;
    for (double v : pt) {
      if (v < -1e-12)
        throw std::invalid_argument("assemble_mixing_measure: negative weight");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::invalid_argument("assemble_mixing_measure: weights must sum to 1");
  }
  MixingMeasure out;
  out.atoms = atoms;
  out.cloud = cloud;
  return out;
}

std::vector<FiniteSupportMeasure> convolution_family(
    const FiniteSupportMeasure& base, int M) {
  if (M < 1) throw std::invalid_argument("convolution_family: M >= 1");
  for (double a : base.atoms)
    if (a < 0)
      throw std::invalid_argument("convolution_family: negative atom in base");

  std::vector<FiniteSupportMeasure> family;
  family.push_back(make_measure({0.0}, {1.0}));
  FiniteSupportMeasure current = family.front();

  for (int k = 1; k < M; ++k) {
    // current * base, merging equal sums.
    std::map<double, double> acc;
    for (std::size_t i = 0; i < current.atoms.size(); ++i)
      for (std::size_t j = 0; j < base.atoms.size(); ++j) {
        const double value = current.atoms[i] + base.atoms[j];
        const double mass = current.weights[i] * base.weights[j];
        auto it = acc.lower_bound(value - 1e-12);
        if (it != acc.end() && it->first <= value + 1e-12)
          it->second += mass;
        else
          acc.emplace_hint(it, value, mass);
      }
    if (acc.size() > 100000)
      throw std::runtime_error("convolution_family: atom count beyond cap");
    FiniteSupportMeasure next;
    for (const auto& [a, w] : acc) {
      next.atoms.push_back(a);
      next.weights.push_back(w);
    }
    // Laplace consistency: the k-fold convolution transform is L_base^k.
    for (double s : {0.5, 1.0, 2.0}) {
      const double lhs = laplace_transform(next, s);
      const double rhs = std::pow(laplace_transform(base, s), k);
      if (std::abs(lhs - rhs) > 1e-12 * std::max(1.0, std::abs(rhs)))
        throw std::runtime_error("convolution_family: transform identity violated");
    }
    family.push_back(next);
    current = std::move(next);
  }
  return family;
}

std::vector<FiniteSupportMeasure> scaled_family(const FiniteSupportMeasure& base,
                                                int N) {
  if (N < 0) throw std::invalid_argument("scaled_family: N >= 0");
  if (N >= 1 && base.atoms.size() == 1 && base.atoms.front() == 0.0)
    throw std::invalid_argument("scaled_family: base must be nondegenerate");
  std::vector<FiniteSupportMeasure> family;
  for (int k = 0; k <= N; ++k) {
    if (k == 0) {
      family.push_back(make_measure({0.0}, {1.0}));
      continue;
    }
    std::vector<double> atoms(base.atoms.size());
    for (std::size_t j = 0; j < base.atoms.size(); ++j) atoms[j] = k * base.atoms[j];
    family.push_back(make_measure(atoms, base.weights));
  }
  return family;
}

}  // namespace forge
