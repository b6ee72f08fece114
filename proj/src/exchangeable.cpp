#include "forge/exchangeable.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "forge/rational.hpp"
#include "forge/rng.hpp"

namespace forge {

namespace {

void validate_law(const LatticeLaw& law) {
  if (law.values.size() != law.probs.size() || law.values.empty())
    throw std::invalid_argument("lattice law: size mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < law.values.size(); ++i) {
    if (i + 1 < law.values.size() && !(law.values[i] < law.values[i + 1]))
      throw std::invalid_argument("lattice law: values not increasing");
    if (law.probs[i] < -1e-12)
      throw std::invalid_argument("lattice law: negative probability");
    total += law.probs[i];
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("lattice law: probabilities must sum to 1");
}

// Canonical support: entries carrying exactly zero probability are dropped.
LatticeLaw drop_null_entries(LatticeLaw law) {
  LatticeLaw out;
  for (std::size_t i = 0; i < law.values.size(); ++i)
    if (law.probs[i] != 0.0) {
      out.values.push_back(law.values[i]);
      out.probs.push_back(law.probs[i]);
    }
  return out;
}

LatticeLaw law_from_accumulator(std::vector<std::pair<double, double>> acc,
                                double tol) {
  std::sort(acc.begin(), acc.end());
  LatticeLaw out;
  for (const auto& [v, p] : acc) {
    if (!out.values.empty() && v - out.values.back() <= tol)
      out.probs.back() += p;
    else {
      out.values.push_back(v);
      out.probs.push_back(p);
    }
  }
  return drop_null_entries(std::move(out));
}

// All weak compositions r of n into `parts` parts, in lexicographic order.
void enumerate_compositions(int n, int parts,
                            const std::function<void(const std::vector<int>&)>& emit) {
  std::vector<int> r(static_cast<std::size_t>(parts), 0);
  const std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos + 1 == parts) {
      r[static_cast<std::size_t>(pos)] = remaining;
      emit(r);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      r[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, n);
}

Integer multinomial_exact(int n, const std::vector<int>& r) {
  Integer out(1);
  int consumed = 0;
  for (int rj : r) {
    for (int i = 1; i <= rj; ++i) {
      out *= Integer(consumed + i);
      out /= Integer(i);
    }
    consumed += rj;
  }
  (void)n;
  return out;
}

bool integer_atoms(const std::vector<double>& atoms) {
  for (double a : atoms)
    if (std::abs(a - std::llround(a)) > 1e-12) return false;
  return true;
}

void check_shared_atoms(const MixingMeasure& a, const MixingMeasure& b) {
  if (a.atoms != b.atoms)
    throw std::invalid_argument("mixing measures must share the atom list");
}

}  // namespace

double total_variation(const LatticeLaw& a, const LatticeLaw& b, double tol) {
  validate_law(a);
  validate_law(b);
  double tv = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.values.size() || j < b.values.size()) {
    if (j == b.values.size() ||
        (i < a.values.size() && a.values[i] < b.values[j] - tol)) {
      tv += std::abs(a.probs[i]);
      ++i;
    } else if (i == a.values.size() || b.values[j] < a.values[i] - tol) {
      tv += std::abs(b.probs[j]);
      ++j;
    } else {
      tv += std::abs(a.probs[i] - b.probs[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * tv;
}

LatticeLaw convolve_laws(const LatticeLaw& a, const LatticeLaw& b, double tol) {
  validate_law(a);
  validate_law(b);
  std::vector<std::pair<double, double>> acc;
  acc.reserve(a.values.size() * b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
    for (std::size_t j = 0; j < b.values.size(); ++j)
      acc.emplace_back(a.values[i] + b.values[j], a.probs[i] * b.probs[j]);
  return law_from_accumulator(std::move(acc), tol);
}

double MomentTable::at(const std::vector<int>& r) const {
  const auto it = moments.find(r);
  if (it == moments.end())
    throw std::out_of_range("moment table: index not present");
  return it->second;
}

MomentTable mixed_moments(const MixingMeasure& theta, int max_degree) {
  if (max_degree < 0 || max_degree > 20)
    throw std::invalid_argument("mixed_moments: degree cap is 20");
  theta.cloud.validate();
  const int nvars = theta.cloud.d;

  // Enumerate the index set once, in a fixed DFS order.
  std::vector<std::vector<int>> indices;
  std::vector<int> r(static_cast<std::size_t>(nvars), 0);
  const std::function<void(int, int)> rec = [&](int pos, int budget) {
    if (pos == nvars) {
      indices.push_back(r);
      return;
    }
    for (int v = 0; v <= budget; ++v) {
      r[static_cast<std::size_t>(pos)] = v;
      rec(pos + 1, budget - v);
      r[static_cast<std::size_t>(pos)] = 0;
    }
  };
  rec(0, max_degree);

  std::vector<double> acc(indices.size(), 0.0);
  std::vector<double> powers;  // powers[j * (D+1) + e] = w_j^e
  powers.resize(static_cast<std::size_t>(nvars) *
                static_cast<std::size_t>(max_degree + 1));
  for (std::size_t pt = 0; pt < theta.cloud.size(); ++pt) {
    const auto& w = theta.cloud.points[pt];
    const double prob = theta.cloud.probs[pt];
    for (int j = 0; j < nvars; ++j) {
      double p = 1.0;
      for (int e = 0; e <= max_degree; ++e) {
        powers[static_cast<std::size_t>(j * (max_degree + 1) + e)] = p;
        p *= w[static_cast<std::size_t>(j)];
      }
    }
    for (std::size_t t = 0; t < indices.size(); ++t) {
      double prod = prob;
      for (int j = 0; j < nvars; ++j) {
        const int e = indices[t][static_cast<std::size_t>(j)];
        if (e) prod *= powers[static_cast<std::size_t>(j * (max_degree + 1) + e)];
      }
      acc[t] += prod;
    }
  }

  MomentTable table;
  table.nvars = nvars;
  table.max_degree = max_degree;
  for (std::size_t t = 0; t < indices.size(); ++t)
    table.moments.emplace(indices[t], acc[t]);
  return table;
}

LatticeLaw exact_partial_sum_law(const MixingMeasure& theta, int n) {
  if (n < 1) throw std::invalid_argument("exact_partial_sum_law: n >= 1");
  theta.cloud.validate();
  const int parts = theta.cloud.d;
  if (static_cast<int>(theta.atoms.size()) != parts)
    throw std::invalid_argument("exact_partial_sum_law: atom/weight mismatch");

  // Composition count guard: C(n + parts - 1, parts - 1) <= 1e6.
  {
    Integer count(1);
    for (int i = 1; i < parts; ++i) {
      count *= Integer(n + i);
      count /= Integer(i);
    }
    if (count > Integer(1000000))
      throw std::invalid_argument(
          "exact_partial_sum_law: composition count beyond cap");
  }

  std::vector<std::vector<int>> comps;
  enumerate_compositions(n, parts,
                         [&](const std::vector<int>& r) { comps.push_back(r); });

  // Mixed moments restricted to |r| = n, accumulated per composition.
  std::vector<double> m(comps.size(), 0.0);
  std::vector<double> powers(static_cast<std::size_t>(parts) *
                             static_cast<std::size_t>(n + 1));
  for (std::size_t pt = 0; pt < theta.cloud.size(); ++pt) {
    const auto& w = theta.cloud.points[pt];
    const double prob = theta.cloud.probs[pt];
    for (int j = 0; j < parts; ++j) {
      double p = 1.0;
      for (int e = 0; e <= n; ++e) {
        powers[static_cast<std::size_t>(j * (n + 1) + e)] = p;
        p *= w[static_cast<std::size_t>(j)];
      }
    }
    for (std::size_t t = 0; t < comps.size(); ++t) {
      double prod = prob;
      for (int j = 0; j < parts; ++j) {
        const int e = comps[t][static_cast<std::size_t>(j)];
        if (e) prod *= powers[static_cast<std::size_t>(j * (n + 1) + e)];
      }
      m[t] += prod;
    }
  }

  if (integer_atoms(theta.atoms)) {
    std::map<long long, double> acc;
    for (std::size_t t = 0; t < comps.size(); ++t) {
      long long v = 0;
      for (int j = 0; j < parts; ++j)
        v += static_cast<long long>(comps[t][static_cast<std::size_t>(j)]) *
             std::llround(theta.atoms[static_cast<std::size_t>(j)]);
      const double coeff = multinomial_exact(n, comps[t]).get_d();
      acc[v] += coeff * m[t];
    }
    LatticeLaw law;
    for (const auto& [v, p] : acc) {
      law.values.push_back(static_cast<double>(v));
      law.probs.push_back(p);
    }
    law = drop_null_entries(std::move(law));
    validate_law(law);
    return law;
  }

  std::vector<std::pair<double, double>> acc;
  acc.reserve(comps.size());
  for (std::size_t t = 0; t < comps.size(); ++t) {
    double v = 0.0;
    for (int j = 0; j < parts; ++j)
      v += comps[t][static_cast<std::size_t>(j)] *
           theta.atoms[static_cast<std::size_t>(j)];
    acc.emplace_back(v, multinomial_exact(n, comps[t]).get_d() * m[t]);
  }
  LatticeLaw law = law_from_accumulator(std::move(acc), 1e-12);
  validate_law(law);
  return law;
}

std::vector<double> compare_partial_sum_laws(const MixingMeasure& theta1,
                                             const MixingMeasure& theta2,
                                             int n_max) {
  check_shared_atoms(theta1, theta2);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_max));
  for (int n = 1; n <= n_max; ++n)
    out.push_back(total_variation(exact_partial_sum_law(theta1, n),
                                  exact_partial_sum_law(theta2, n)));
  return out;
}

double laplace_transform_moments(const MixingMeasure& theta, double s, int n) {
  if (s < 0) throw std::invalid_argument("laplace_transform_moments: s >= 0");
  if (n < 0) throw std::invalid_argument("laplace_transform_moments: n >= 0");
  for (double a : theta.atoms)
    if (a < 0 && s > 0)
      throw std::invalid_argument(
          "laplace_transform_moments: negative atom outside scope");
  std::vector<double> expo(theta.atoms.size());
  for (std::size_t j = 0; j < theta.atoms.size(); ++j)
    expo[j] = std::exp(-s * theta.atoms[j]);
  double out = 0.0;
  for (std::size_t pt = 0; pt < theta.cloud.size(); ++pt) {
    double inner = 0.0;
    for (std::size_t j = 0; j < expo.size(); ++j)
      inner += theta.cloud.points[pt][j] * expo[j];
    out += theta.cloud.probs[pt] * std::pow(inner, n);
  }
  return out;
}

MomentTable recover_mixed_moments(const std::vector<LatticeLaw>& laws,
                                  const std::vector<double>& atoms, int D) {
  if (D < 1 || static_cast<int>(laws.size()) < D)
    throw std::invalid_argument("recover_mixed_moments: need laws up to degree D");
  const int parts = static_cast<int>(atoms.size());

  // Target sums for every multi-index 1 <= |r| <= D must be pairwise
  // distinct: the computable stand-in for rational independence.
  struct Target {
    double value;
    int n;
    std::vector<int> r;
  };
  std::vector<Target> targets;
  for (int n = 1; n <= D; ++n)
    enumerate_compositions(n, parts, [&](const std::vector<int>& r) {
      double v = 0.0;
      for (int j = 0; j < parts; ++j)
        v += r[static_cast<std::size_t>(j)] * atoms[static_cast<std::size_t>(j)];
      targets.push_back({v, n, r});
    });
  std::vector<std::size_t> order(targets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return targets[i].value < targets[j].value;
  });
  for (std::size_t i = 0; i + 1 < order.size(); ++i)
    if (targets[order[i + 1]].value - targets[order[i]].value < 1e-9)
      throw std::invalid_argument(
          "recover_mixed_moments: representation collision in atom sums");

  MomentTable table;
  table.nvars = parts;
  table.max_degree = D;
  table.moments.emplace(std::vector<int>(static_cast<std::size_t>(parts), 0), 1.0);
  for (const auto& tgt : targets) {
    const LatticeLaw& law = laws[static_cast<std::size_t>(tgt.n - 1)];
    double prob = 0.0;
    for (std::size_t i = 0; i < law.values.size(); ++i)
      if (std::abs(law.values[i] - tgt.value) < 1e-9) {
        prob = law.probs[i];
        break;
      }
    const double coeff = multinomial_exact(tgt.n, tgt.r).get_d();
    table.moments.emplace(tgt.r, prob / coeff);
  }
  return table;
}

long double marginal_moment_law_moments(const MixingMeasure& theta, int k,
                                        int n) {
  if (k < 0 || k > 60 || theta.atoms.size() > 8)
    throw std::invalid_argument(
        "marginal_moment_law_moments: k <= 60 with at most 8 atoms");
  if (n < 0) throw std::invalid_argument("marginal_moment_law_moments: n >= 0");
  std::vector<long double> ak(theta.atoms.size());
  for (std::size_t j = 0; j < theta.atoms.size(); ++j)
    ak[j] = std::pow(static_cast<long double>(theta.atoms[j]),
                     static_cast<long double>(k));
  long double out = 0.0L;
  for (std::size_t pt = 0; pt < theta.cloud.size(); ++pt) {
    long double mu = 0.0L;
    for (std::size_t j = 0; j < ak.size(); ++j)
      mu += static_cast<long double>(theta.cloud.points[pt][j]) * ak[j];
    long double power = 1.0L;
    for (int i = 0; i < n; ++i) power *= mu;
    out += static_cast<long double>(theta.cloud.probs[pt]) * power;
  }
  if (!std::isfinite(static_cast<double>(out)) &&
      !std::isfinite(out))  // extended-precision overflow guard
    throw std::overflow_error("marginal_moment_law_moments: overflow");
  return out;
}

double marginal_chf_comparison(const MixingMeasure& theta1,
                               const MixingMeasure& theta2,
                               const std::vector<double>& t_grid, int degree) {
  check_shared_atoms(theta1, theta2);
  if (degree < 1) throw std::invalid_argument("marginal_chf_comparison: degree >= 1");

  constexpr int kDirections = 16;
  double worst = 0.0;
  for (double t : t_grid) {
    std::vector<double> cos_ta(theta1.atoms.size()), sin_ta(theta1.atoms.size());
    for (std::size_t j = 0; j < theta1.atoms.size(); ++j) {
      cos_ta[j] = std::cos(t * theta1.atoms[j]);
      sin_ta[j] = std::sin(t * theta1.atoms[j]);
    }
    const auto direction_moments = [&](const MixingMeasure& theta, double u,
                                       double v, std::vector<double>& out) {
      out.assign(static_cast<std::size_t>(degree) + 1, 0.0);
      for (std::size_t pt = 0; pt < theta.cloud.size(); ++pt) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < theta.atoms.size(); ++j) {
          re += theta.cloud.points[pt][j] * cos_ta[j];
          im += theta.cloud.points[pt][j] * sin_ta[j];
        }
        const double x = u * re + v * im;
        double p = 1.0;
        for (int n = 0; n <= degree; ++n) {
          out[static_cast<std::size_t>(n)] += theta.cloud.probs[pt] * p;
          p *= x;
        }
      }
    };
    std::vector<double> m1, m2;
    for (int dir = 0; dir < kDirections; ++dir) {
      const double angle = M_PI * dir / kDirections;
      const double u = std::cos(angle), v = std::sin(angle);
      direction_moments(theta1, u, v, m1);
      direction_moments(theta2, u, v, m2);
      for (int n = 1; n <= degree; ++n)
        worst = std::max(worst, std::abs(m1[static_cast<std::size_t>(n)] -
                                         m2[static_cast<std::size_t>(n)]));
    }
  }
  return worst;
}

SampledSequence sample_sequence(const MixingMeasure& theta, int n,
                                std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_sequence: n >= 1");
  theta.cloud.validate();
  Rng rng(seed);

  const auto draw_index = [&](const std::vector<double>& probs) {
    const double u = rng.uniform01();
    double cum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      cum += probs[i];
      if (u < cum) return i;
    }
    return probs.size() - 1;
  };

  SampledSequence out;
  out.component = draw_index(theta.cloud.probs);
  out.weights = theta.cloud.points[out.component];
  out.xs.reserve(static_cast<std::size_t>(n));
  out.partial_sums.reserve(static_cast<std::size_t>(n));
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::size_t j = draw_index(out.weights);
    const double x = theta.atoms[j];
    out.xs.push_back(x);
    s += x;
    out.partial_sums.push_back(s);
  }
  return out;
}

LatticeLaw empirical_partial_sum_law(const MixingMeasure& theta, int n,
                                     std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("empirical law: samples >= 1");
  Rng root(seed);
  std::map<long long, double> counts_int;
  std::vector<std::pair<double, double>> acc;
  const bool lattice = integer_atoms(theta.atoms);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto seq =
        sample_sequence(theta, n, root.substream(i).next_u64());
    const double s = seq.partial_sums.back();
    if (lattice)
      counts_int[std::llround(s)] += 1.0 / static_cast<double>(samples);
    else
      acc.emplace_back(s, 1.0 / static_cast<double>(samples));
  }
  if (lattice) {
    LatticeLaw law;
    for (const auto& [v, p] : counts_int) {
      law.values.push_back(static_cast<double>(v));
      law.probs.push_back(p);
    }
    validate_law(law);
    return law;
  }
  LatticeLaw law = law_from_accumulator(std::move(acc), 1e-12);
  validate_law(law);
  return law;
}

}  // namespace forge
