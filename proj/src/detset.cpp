#include "forge/detset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "forge/rng.hpp"

namespace forge {

namespace {

double laplace_value(const std::vector<double>& atoms,
                     const std::vector<double>& weights, double s) {
  double v = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j) v += weights[j] * std::exp(-atoms[j] * s);
  return v;
}

// log of a finite Laplace transform, stable for negative s (logsumexp).
double log_laplace_value(const std::vector<double>& atoms,
                         const std::vector<double>& weights, double s) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < atoms.size(); ++j) m = std::max(m, -atoms[j] * s);
  double acc = 0.0;
  for (std::size_t j = 0; j < atoms.size(); ++j)
    acc += weights[j] * std::exp(-atoms[j] * s - m);
  return m + std::log(acc);
}

void check_base(const CurveSpec& spec) {
  if (spec.base_atoms.size() != spec.base_weights.size() || spec.base_atoms.empty())
    throw std::invalid_argument("CurveSpec: base transform needs matching atoms/weights");
  double total = 0.0;
  for (double w : spec.base_weights) {
    if (w < 0) throw std::invalid_argument("CurveSpec: negative base weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("CurveSpec: base weights must sum to 1");
  for (double a : spec.base_atoms)
    if (a < 0) throw std::invalid_argument("CurveSpec: negative base atom");
}

}  // namespace

CurveSpec CurveSpec::moment(int N) {
  if (N < 2) throw std::invalid_argument("moment_curve: N must be >= 2");
  CurveSpec s;
  s.family = Family::moment_curve;
  s.N = N;
  return s;
}

CurveSpec CurveSpec::laplace(std::vector<double> atoms) {
  if (atoms.empty()) throw std::invalid_argument("laplace_atoms: empty atom list");
  CurveSpec s;
  s.family = Family::laplace_atoms;
  s.N = static_cast<int>(atoms.size());
  s.atoms = std::move(atoms);
  return s;
}

CurveSpec CurveSpec::convolution(std::vector<double> base_atoms,
                                 std::vector<double> base_weights, int N) {
  CurveSpec s;
  s.family = Family::laplace_convolution;
  s.N = N;
  s.base_atoms = std::move(base_atoms);
  s.base_weights = std::move(base_weights);
  check_base(s);
  if (N < 2) throw std::invalid_argument("laplace_convolution: N must be >= 2");
  return s;
}

CurveSpec CurveSpec::scaled(std::vector<double> base_atoms,
                            std::vector<double> base_weights, int N) {
  CurveSpec s;
  s.family = Family::laplace_scaled;
  s.N = N;
  s.base_atoms = std::move(base_atoms);
  s.base_weights = std::move(base_weights);
  check_base(s);
  if (N < 2) throw std::invalid_argument("laplace_scaled: N must be >= 2");
  return s;
}

CurveSpec CurveSpec::poisson(double lambda, int N) {
  if (lambda <= 0) throw std::invalid_argument("poisson_LT: lambda must be > 0");
  if (N < 2) throw std::invalid_argument("poisson_LT: N must be >= 2");
  CurveSpec s;
  s.family = Family::poisson_LT;
  s.N = N;
  s.lambda = lambda;
  return s;
}

CurveSpec CurveSpec::power(std::vector<long long> a) {
  if (a.empty()) throw std::invalid_argument("power_curve: empty list");
  CurveSpec s;
  s.family = Family::power_curve;
  s.N = static_cast<int>(a.size());
  s.powers = std::move(a);
  return s;
}

CurveSpec CurveSpec::complex_pq(int N) {
  if (N < 1) throw std::invalid_argument("complex_PQ: N must be >= 1");
  CurveSpec s;
  s.family = Family::complex_PQ;
  s.N = N;
  return s;
}

CurveSpec CurveSpec::rational(UniPolyQ p, UniPolyQ q, int N) {
  if (N < 2) throw std::invalid_argument("rational_LT: N must be >= 2");
  if (q.is_zero()) throw std::invalid_argument("rational_LT: zero denominator");
  CurveSpec s;
  s.family = Family::rational_LT;
  s.N = N;
  s.rat_p = std::move(p);
  s.rat_q = std::move(q);
  return s;
}

int CurveSpec::parameter_arity() const {
  return family == Family::complex_PQ ? 4 : 1;
}

bool CurveSpec::is_laplace_type() const {
  switch (family) {
    case Family::laplace_atoms:
    case Family::laplace_convolution:
    case Family::laplace_scaled:
    case Family::poisson_LT:
    case Family::rational_LT:
      return true;
    default:
      return false;
  }
}

bool CurveSpec::supports_exact() const {
  switch (family) {
    case Family::moment_curve:
    case Family::power_curve:
    case Family::complex_PQ:
    case Family::rational_LT:
      return true;
    default:
      return false;
  }
}

std::string CurveSpec::describe() const {
  std::ostringstream os;
  switch (family) {
    case Family::moment_curve: os << "moment_curve(" << N << ")"; break;
    case Family::laplace_atoms: {
      os << "laplace_atoms{";
      for (std::size_t j = 0; j < atoms.size(); ++j) os << (j ? "," : "") << atoms[j];
      os << "}";
      break;
    }
    case Family::laplace_convolution: os << "laplace_convolution(N=" << N << ")"; break;
    case Family::laplace_scaled: os << "laplace_scaled(N=" << N << ")"; break;
    case Family::poisson_LT: os << "poisson_LT(" << lambda << "," << N << ")"; break;
    case Family::power_curve: {
      os << "power_curve{";
      for (std::size_t j = 0; j < powers.size(); ++j) os << (j ? "," : "") << powers[j];
      os << "}";
      break;
    }
    case Family::complex_PQ: os << "complex_PQ(" << N << ")"; break;
    case Family::rational_LT: os << "rational_LT(N=" << N << ")"; break;
  }
  return os.str();
}

std::vector<std::vector<double>> sample_curve(
    const CurveSpec& spec, const std::vector<std::vector<double>>& params) {
  if (params.empty()) throw std::invalid_argument("sample_curve: empty parameter grid");
  const int arity = spec.parameter_arity();
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (const auto& prm : params) {
    if (static_cast<int>(prm.size()) != arity)
      throw std::invalid_argument("sample_curve: parameter arity mismatch");
    std::vector<double> v(static_cast<std::size_t>(spec.N));
    switch (spec.family) {
      case CurveSpec::Family::moment_curve: {
        double p = 1.0;
        for (int j = 0; j < spec.N; ++j) {
          v[j] = p;
          p *= prm[0];
        }
        break;
      }
      case CurveSpec::Family::laplace_atoms: {
        if (prm[0] < 0) throw std::invalid_argument("sample_curve: s must be >= 0");
        for (int j = 0; j < spec.N; ++j) v[j] = std::exp(-spec.atoms[j] * prm[0]);
        break;
      }
      case CurveSpec::Family::laplace_convolution: {
        if (prm[0] < 0) throw std::invalid_argument("sample_curve: s must be >= 0");
        const double L = laplace_value(spec.base_atoms, spec.base_weights, prm[0]);
        double p = 1.0;
        for (int j = 0; j < spec.N; ++j) {
          v[j] = p;
          p *= L;
        }
        break;
      }
      case CurveSpec::Family::laplace_scaled: {
        if (prm[0] < 0) throw std::invalid_argument("sample_curve: s must be >= 0");
        for (int j = 0; j < spec.N; ++j)
          v[j] = laplace_value(spec.base_atoms, spec.base_weights, j * prm[0]);
        break;
      }
      case CurveSpec::Family::poisson_LT: {
        if (prm[0] < 0) throw std::invalid_argument("sample_curve: s must be >= 0");
        for (int j = 0; j < spec.N; ++j)
          v[j] = std::exp(spec.lambda * (std::exp(-static_cast<double>(j) * prm[0]) - 1.0));
        break;
      }
      case CurveSpec::Family::power_curve: {
        const double k = prm[0];
        if (k < 0 || k != std::floor(k))
          throw std::invalid_argument("sample_curve: power_curve needs integer k >= 0");
        for (int j = 0; j < spec.N; ++j)
          v[j] = std::pow(static_cast<double>(spec.powers[j]), k);
        break;
      }
      case CurveSpec::Family::complex_PQ: {
        const double s = prm[0], t = prm[1], x = prm[2], y = prm[3];
        double P = 1.0, Q = 0.0;  // Re(z^n), Im(z^n)
        for (int n = 0; n < spec.N; ++n) {
          v[n] = s * P + t * Q;
          const double P1 = P * x - Q * y;
          Q = P * y + Q * x;
          P = P1;
        }
        break;
      }
      case CurveSpec::Family::rational_LT: {
        if (prm[0] < 0) throw std::invalid_argument("sample_curve: s must be >= 0");
        for (int j = 0; j < spec.N; ++j) {
          const double qs = spec.rat_q.eval(j * prm[0]);
          if (qs == 0.0)
            throw std::invalid_argument("sample_curve: rational transform pole hit");
          v[j] = spec.rat_p.eval(j * prm[0]) / qs;
        }
        break;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<std::vector<Rational>> sample_curve_exact(
    const CurveSpec& spec, const std::vector<std::vector<Rational>>& params) {
  if (!spec.supports_exact())
    throw std::invalid_argument("sample_curve_exact: family has no exact sampler");
  if (params.empty()) throw std::invalid_argument("sample_curve_exact: empty grid");
  const int arity = spec.parameter_arity();
  std::vector<std::vector<Rational>> out;
  out.reserve(params.size());
  for (const auto& prm : params) {
    if (static_cast<int>(prm.size()) != arity)
      throw std::invalid_argument("sample_curve_exact: parameter arity mismatch");
    std::vector<Rational> v(static_cast<std::size_t>(spec.N));
    switch (spec.family) {
      case CurveSpec::Family::moment_curve: {
        Rational p(1);
        for (int j = 0; j < spec.N; ++j) {
          v[j] = p;
          p *= prm[0];
        }
        break;
      }
      case CurveSpec::Family::power_curve: {
        if (prm[0] < 0 || prm[0].get_den() != 1)
          throw std::invalid_argument("sample_curve_exact: k must be integer >= 0");
        const unsigned long k = prm[0].get_num().get_ui();
        for (int j = 0; j < spec.N; ++j) {
          Integer p;
          mpz_pow_ui(p.get_mpz_t(), Integer(static_cast<long>(spec.powers[j])).get_mpz_t(), k);
          v[j] = Rational(p);
        }
        break;
      }
      case CurveSpec::Family::complex_PQ: {
        const Rational s = prm[0], t = prm[1], x = prm[2], y = prm[3];
        Rational P(1), Q(0);
        for (int n = 0; n < spec.N; ++n) {
          v[n] = s * P + t * Q;
          const Rational P1 = P * x - Q * y;
          Q = P * y + Q * x;
          P = P1;
        }
        break;
      }
      case CurveSpec::Family::rational_LT: {
        if (prm[0] < 0)
          throw std::invalid_argument("sample_curve_exact: s must be >= 0");
        for (int j = 0; j < spec.N; ++j) {
          const Rational qs = spec.rat_q.eval(Rational(j) * prm[0]);
          if (qs == 0)
            throw std::invalid_argument("sample_curve_exact: rational transform pole hit");
          v[j] = spec.rat_p.eval(Rational(j) * prm[0]) / qs;
        }
        break;
      }
      default:
        throw std::invalid_argument("sample_curve_exact: family has no exact sampler");
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

// Shared grid builder; midpoint=true produces a grid interleaved with the
// canonical one (used for held-out samples).
std::vector<std::vector<double>> parameter_grid(const CurveSpec& spec, int degree,
                                                std::size_t count, std::uint64_t seed,
                                                bool midpoint,
                                                std::size_t integer_offset) {
  if (count == 0) throw std::invalid_argument("parameter grid: zero size");
  std::vector<std::vector<double>> g;
  g.reserve(count);
  (void)degree;
  switch (spec.family) {
    case CurveSpec::Family::power_curve: {
      for (std::size_t i = 0; i < count; ++i)
        g.push_back({static_cast<double>(integer_offset + i)});
      break;
    }
    case CurveSpec::Family::complex_PQ: {
      Rng rng(seed ^ (midpoint ? 0x5851f42d4c957f2dULL : 0));
      for (std::size_t i = 0; i < count; ++i)
        g.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                     rng.uniform(-1, 1)});
      break;
    }
    case CurveSpec::Family::moment_curve: {
      for (std::size_t i = 0; i < count; ++i) {
        const double f = midpoint ? (static_cast<double>(i) + 0.5) / count
                                  : static_cast<double>(i) / std::max<std::size_t>(count - 1, 1);
        g.push_back({-4.0 + 8.0 * f});
      }
      break;
    }
    default: {  // Laplace-type: s in [0, 8]
      for (std::size_t i = 0; i < count; ++i) {
        const double f = midpoint ? (static_cast<double>(i) + 0.5) / count
                                  : static_cast<double>(i) / std::max<std::size_t>(count - 1, 1);
        g.push_back({8.0 * f});
      }
      break;
    }
  }
  return g;
}

std::vector<std::vector<Rational>> parameter_grid_exact(const CurveSpec& spec,
                                                        std::size_t count,
                                                        std::uint64_t seed,
                                                        bool midpoint,
                                                        std::size_t integer_offset) {
  if (count == 0) throw std::invalid_argument("parameter grid: zero size");
  std::vector<std::vector<Rational>> g;
  g.reserve(count);
  switch (spec.family) {
    case CurveSpec::Family::power_curve: {
      for (std::size_t i = 0; i < count; ++i)
        g.push_back({Rational(static_cast<long>(integer_offset + i))});
      break;
    }
    case CurveSpec::Family::complex_PQ: {
      Rng rng(seed ^ (midpoint ? 0x5851f42d4c957f2dULL : 0));
      for (std::size_t i = 0; i < count; ++i) {
        std::vector<Rational> p;
        for (int j = 0; j < 4; ++j)
          p.push_back(make_rational(static_cast<long>(rng.uniform_index(2001)) - 1000, 1000));
        g.push_back(std::move(p));
      }
      break;
    }
    case CurveSpec::Family::moment_curve: {
      const long den = 2 * static_cast<long>(count);
      for (std::size_t i = 0; i < count; ++i) {
        const long num = midpoint ? 2 * static_cast<long>(i) + 1 - static_cast<long>(count)
                                  : 2 * static_cast<long>(i) - static_cast<long>(count);
        g.push_back({make_rational(4 * num, den)});  // spread over [-4, 4)
      }
      break;
    }
    case CurveSpec::Family::rational_LT: {
      // s >= 0; offset the held-out grid into the gaps.
      for (std::size_t i = 0; i < count; ++i) {
        const long num = midpoint ? 2 * static_cast<long>(i) + 1 : 2 * static_cast<long>(i);
        g.push_back({make_rational(num, 2 * static_cast<long>(count))});
      }
      break;
    }
    default:
      throw std::invalid_argument("parameter grid: family has no exact grid");
  }
  return g;
}

}  // namespace

std::vector<std::vector<double>> default_parameter_grid(const CurveSpec& spec,
                                                        int degree,
                                                        std::size_t count,
                                                        std::uint64_t seed) {
  return parameter_grid(spec, degree, count, seed, false, 0);
}

std::vector<std::vector<Rational>> default_parameter_grid_exact(
    const CurveSpec& spec, int degree, std::size_t count) {
  (void)degree;
  return parameter_grid_exact(spec, count, 1, false, 0);
}

std::vector<double> log_curve_coordinates(const CurveSpec& spec, double s) {
  std::vector<double> lg(static_cast<std::size_t>(spec.N));
  switch (spec.family) {
    case CurveSpec::Family::laplace_atoms:
      for (int j = 0; j < spec.N; ++j) lg[j] = -spec.atoms[j] * s;
      break;
    case CurveSpec::Family::laplace_convolution: {
      const double logL = log_laplace_value(spec.base_atoms, spec.base_weights, s);
      for (int j = 0; j < spec.N; ++j) lg[j] = j * logL;
      break;
    }
    case CurveSpec::Family::laplace_scaled:
      for (int j = 0; j < spec.N; ++j)
        lg[j] = log_laplace_value(spec.base_atoms, spec.base_weights, j * s);
      break;
    case CurveSpec::Family::poisson_LT:
      for (int j = 0; j < spec.N; ++j)
        lg[j] = spec.lambda * std::expm1(-static_cast<double>(j) * s);
      break;
    default:
      throw std::invalid_argument(
          "log_curve_coordinates: defined for Laplace-type families only");
  }
  return lg;
}

namespace {

// Max |candidate| over normalized held-out samples; coefficients are the
// basis-ordered vector c.
double held_out_residual_float(const std::vector<std::vector<double>>& samples,
                               const MonomialBasis& basis,
                               const std::vector<double>& c) {
  double worst = 0.0;
  for (const auto& s : samples) {
    double sup = 0.0;
    for (double v : s) sup = std::max(sup, std::abs(v));
    if (sup == 0.0) sup = 1.0;
    double val = 0.0;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      double m = c[j];
      const MultiIndex& e = basis.exponents[j];
      for (std::size_t k = 0; k < s.size(); ++k)
        for (int p = 0; p < e[k]; ++p) m *= s[k] / sup;
      val += m;
    }
    worst = std::max(worst, std::abs(val));
  }
  return worst;
}

// Dominance stress: evaluates the candidate at strongly negative s in log
// coordinates (largest monomial factored out). A vanishing combination stays
// at rounding level; a spurious kernel vector exposes an O(1) coefficient.
double dominance_stress_value(const CurveSpec& spec, const MonomialBasis& basis,
                              const std::vector<double>& c, double s) {
  const std::vector<double> lg = log_curve_coordinates(spec, s);
  std::vector<double> logm(basis.size(), 0.0);
  double logmax = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < basis.size(); ++j) {
    double v = 0.0;
    const MultiIndex& e = basis.exponents[j];
    for (std::size_t k = 0; k < e.size(); ++k) v += e[k] * lg[k];
    logm[j] = v;
    logmax = std::max(logmax, v);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j)
    acc += c[j] * std::exp(logm[j] - logmax);
  return std::abs(acc);
}

PolyD poly_from_coeffs(const MonomialBasis& basis, const std::vector<double>& c) {
  PolyD p(basis.nvars);
  for (std::size_t j = 0; j < basis.size(); ++j) p.add_term(basis.exponents[j], c[j]);
  return p;
}

PolyQ poly_from_coeffs(const MonomialBasis& basis, const std::vector<Rational>& c) {
  PolyQ p(basis.nvars);
  for (std::size_t j = 0; j < basis.size(); ++j) p.add_term(basis.exponents[j], c[j]);
  return p;
}

DeterminationReport search_float_points(
    const std::vector<std::vector<double>>& train,
    const std::vector<std::vector<double>>& held_out, int l_max,
    const SearchOptions& opts, const CurveSpec* stress_spec,
    const std::string& curve_desc) {
  DeterminationReport rep;
  rep.curve = curve_desc;
  rep.l_max = l_max;
  const int d = static_cast<int>(train.front().size());

  // Per-sample sup-norm normalization (harmless for homogeneous vanishing).
  auto normalized = train;
  for (auto& s : normalized) {
    double sup = 0.0;
    for (double v : s) sup = std::max(sup, std::abs(v));
    if (sup > 0)
      for (double& v : s) v /= sup;
  }

  for (int l = 1; l <= l_max; ++l) {
    const MonomialBasis basis = MonomialBasis::build(d, l);
    const std::size_t needed = static_cast<std::size_t>(
        std::ceil(static_cast<double>(basis.size()) * (1.0 + opts.sample_margin)));
    if (train.size() < needed)
      throw std::invalid_argument(
          "find_vanishing_polynomial: insufficient samples at degree " +
          std::to_string(l) + " (need " + std::to_string(needed) + ")");
    const MatD m = veronese_lift(normalized, l);
    const FloatNullspace ns = nullspace(m, opts.float_threshold);

    DeterminationReport::DegreeScan scan;
    scan.degree = l;
    scan.sigma_max = ns.singular_values.empty() ? 0.0 : ns.singular_values.front();
    scan.sigma_min = ns.singular_values.empty() ? 0.0 : ns.singular_values.back();
    scan.candidates = ns.basis.size();

    std::vector<std::vector<double>> survivors;
    for (const auto& c : ns.basis) {
      const double resid = held_out_residual_float(held_out, basis, c);
      bool ok = resid <= opts.accept_residual;
      if (ok && stress_spec != nullptr && stress_spec->is_laplace_type()) {
        for (double s : {-1.0, -2.0, -4.0}) {
          if (dominance_stress_value(*stress_spec, basis, c, s) > opts.stress_tolerance) {
            ok = false;
            break;
          }
        }
      }
      if (ok)
        survivors.push_back(c);
      else
        ++scan.rejected;
    }

    rep.sample_count = train.size();
    rep.singular_values = ns.singular_values;
    rep.scans.push_back(scan);

    if (!survivors.empty()) {
      rep.verdict = DeterminationReport::Verdict::witness_found;
      rep.witness_degree = l;
      rep.witness_float = poly_from_coeffs(basis, survivors.front());
      for (const auto& c : survivors) rep.kernel_float.push_back(poly_from_coeffs(basis, c));
      rep.held_out_residual = held_out_residual_float(held_out, basis, survivors.front());
      return rep;
    }
    if (scan.rejected > 0)
      rep.notes += "degree " + std::to_string(l) + ": " + std::to_string(scan.rejected) +
                   " kernel candidate(s) rejected by held-out/stress tests; ";
  }
  rep.verdict = DeterminationReport::Verdict::no_witness_up_to;
  return rep;
}

DeterminationReport search_exact_points(
    const std::vector<std::vector<Rational>>& train,
    const std::vector<std::vector<Rational>>& held_out, int l_max,
    const SearchOptions& opts, const std::string& curve_desc) {
  DeterminationReport rep;
  rep.curve = curve_desc;
  rep.l_max = l_max;
  const int d = static_cast<int>(train.front().size());

  for (int l = 1; l <= l_max; ++l) {
    const MonomialBasis basis = MonomialBasis::build(d, l);
    const std::size_t needed = static_cast<std::size_t>(
        std::ceil(static_cast<double>(basis.size()) * (1.0 + opts.sample_margin)));
    if (train.size() < needed)
      throw std::invalid_argument(
          "find_vanishing_polynomial: insufficient samples at degree " +
          std::to_string(l) + " (need " + std::to_string(needed) + ")");
    const MatQ m = veronese_lift(train, l);
    const auto kernel = nullspace(m);
    rep.sample_count = train.size();

    std::vector<std::vector<Rational>> survivors;
    std::size_t rejected = 0;
    for (const auto& c : kernel) {
      bool ok = true;
      if (!held_out.empty()) {
        const MatQ hm = veronese_lift(held_out, l);
        for (std::size_t i = 0; i < hm.rows && ok; ++i) {
          Rational v(0);
          for (std::size_t j = 0; j < hm.cols; ++j) v += hm.at(i, j) * c[j];
          ok = (v == 0);
        }
      }
      if (ok)
        survivors.push_back(c);
      else
        ++rejected;
    }
    DeterminationReport::DegreeScan scan;
    scan.degree = l;
    scan.candidates = kernel.size();
    scan.rejected = rejected;
    rep.scans.push_back(scan);
    if (rejected > 0)
      rep.notes += "degree " + std::to_string(l) +
                   ": spurious exact kernel vector(s) rejected on held-out samples; ";

    if (!survivors.empty()) {
      rep.verdict = DeterminationReport::Verdict::witness_found;
      rep.witness_degree = l;
      rep.witness = poly_from_coeffs(basis, survivors.front());
      for (const auto& c : survivors) rep.kernel.push_back(poly_from_coeffs(basis, c));
      rep.held_out_residual = 0.0;  // exact vanishing verified above
      return rep;
    }
  }
  rep.verdict = DeterminationReport::Verdict::no_witness_up_to;
  return rep;
}

std::size_t training_size(const CurveSpec& spec, const MonomialBasis& basis,
                          const SearchOptions& opts) {
  std::size_t n = static_cast<std::size_t>(
      std::ceil(static_cast<double>(basis.size()) * (1.0 + opts.sample_margin)));
  if (spec.family == CurveSpec::Family::power_curve)
    n = std::max(n, 2 * basis.size() + 1);  // k = 0..2|M_l|
  else
    n = std::max<std::size_t>(n, 32);
  return std::max(n, opts.min_samples);
}

}  // namespace

DeterminationReport find_vanishing_polynomial(const CurveSpec& spec, int l_max,
                                              KernelMode mode,
                                              const SearchOptions& opts) {
  if (l_max < 1) throw std::invalid_argument("find_vanishing_polynomial: l_max >= 1");
  if (mode == KernelMode::exact) {
    if (!spec.supports_exact())
      throw std::invalid_argument(
          "find_vanishing_polynomial: exact mode unavailable for " + spec.describe());
    // Size the grids for the largest degree tested.
    const MonomialBasis top = MonomialBasis::build(spec.N, l_max);
    const std::size_t n_train = training_size(spec, top, opts);
    const auto train = sample_curve_exact(
        spec, parameter_grid_exact(spec, n_train, opts.seed, false, 0));
    const auto held = sample_curve_exact(
        spec, parameter_grid_exact(spec, opts.held_out, opts.seed, true, n_train));
    return search_exact_points(train, held, l_max, opts, spec.describe());
  }
  const MonomialBasis top = MonomialBasis::build(spec.N, l_max);
  const std::size_t n_train = training_size(spec, top, opts);
  const auto train =
      sample_curve(spec, parameter_grid(spec, l_max, n_train, opts.seed, false, 0));
  const auto held = sample_curve(
      spec, parameter_grid(spec, l_max, opts.held_out, opts.seed, true, n_train));
  return search_float_points(train, held, l_max, opts, &spec, spec.describe());
}

DeterminationReport find_vanishing_polynomial(
    const std::vector<std::vector<double>>& points, int l_max,
    const SearchOptions& opts) {
  if (points.empty())
    throw std::invalid_argument("find_vanishing_polynomial: empty point list");
  if (l_max < 1) throw std::invalid_argument("find_vanishing_polynomial: l_max >= 1");
  // Deterministic split: every fifth point is held out.
  std::vector<std::vector<double>> train, held;
  for (std::size_t i = 0; i < points.size(); ++i)
    (i % 5 == 4 ? held : train).push_back(points[i]);
  if (held.empty()) held = train;
  return search_float_points(train, held, l_max, opts, nullptr, "point-list");
}

DeterminationReport find_vanishing_polynomial(
    const std::vector<std::vector<Rational>>& points, int l_max) {
  if (points.empty())
    throw std::invalid_argument("find_vanishing_polynomial: empty point list");
  if (l_max < 1) throw std::invalid_argument("find_vanishing_polynomial: l_max >= 1");
  std::vector<std::vector<Rational>> train, held;
  for (std::size_t i = 0; i < points.size(); ++i)
    (i % 5 == 4 ? held : train).push_back(points[i]);
  return search_exact_points(train, held, l_max, SearchOptions{}, "point-list");
}

DeterminationReport coprime_certificate(const std::vector<long long>& a, int l) {
  if (a.empty()) throw std::invalid_argument("coprime_certificate: empty list");
  if (l < 1) throw std::invalid_argument("coprime_certificate: l must be >= 1");
  for (long long v : a)
    if (v <= 0) throw std::invalid_argument("coprime_certificate: entries must be positive");

  const int N = static_cast<int>(a.size());
  const MonomialBasis basis = MonomialBasis::build(N, l);

  DeterminationReport rep;
  {
    CurveSpec c = CurveSpec::power(a);
    rep.curve = c.describe();
  }
  rep.l_max = l;

  rep.monomial_values.reserve(basis.size());
  for (const auto& e : basis.exponents) {
    Integer v = 1;
    for (int j = 0; j < N; ++j) {
      Integer p;
      mpz_pow_ui(p.get_mpz_t(), Integer(static_cast<long>(a[j])).get_mpz_t(), static_cast<unsigned long>(e[j]));
      v *= p;
    }
    rep.monomial_values.push_back(std::move(v));
  }

  rep.pairwise_coprime = true;
  for (std::size_t i = 0; i < a.size() && rep.pairwise_coprime; ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      Integer g;
      mpz_gcd(g.get_mpz_t(), Integer(static_cast<long>(a[i])).get_mpz_t(), Integer(static_cast<long>(a[j])).get_mpz_t());
      if (g != 1) {
        rep.pairwise_coprime = false;
        break;
      }
    }

  // Collision scan. Square-free monomials (products of distinct entries) are
  // scanned first: a collision there is the sharpest witness and is the one
  // reported. Squared-variable collisions are picked up in the second pass.
  const auto square_free = [&](const MultiIndex& e) {
    for (int v : e)
      if (v > 1) return false;
    return true;
  };
  std::optional<std::pair<std::size_t, std::size_t>> collision;
  for (int pass = 0; pass < 2 && !collision; ++pass) {
    std::map<Integer, std::size_t> seen;
    for (std::size_t j = 0; j < basis.size(); ++j) {
      if (pass == 0 && !square_free(basis.exponents[j])) continue;
      const auto [it, inserted] = seen.emplace(rep.monomial_values[j], j);
      if (!inserted) {
        collision = {it->second, j};
        break;
      }
    }
  }

  if (collision) {
    const auto [i, j] = *collision;
    PolyQ witness(N);
    witness.add_term(basis.exponents[j], Rational(1));
    witness.add_term(basis.exponents[i], Rational(-1));
    rep.verdict = DeterminationReport::Verdict::witness_found;
    rep.witness = witness;
    rep.witness_degree = l;
    std::ostringstream os;
    os << "collision " << rep.monomial_values[i].get_str() << " at basis positions "
       << i << " and " << j;
    rep.notes = os.str();
    return rep;
  }

  // All values distinct: the Vandermonde system in the C_j has full column
  // rank, which is the uniqueness certificate.
  MatQ vand(basis.size(), basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k)
    for (std::size_t j = 0; j < basis.size(); ++j) {
      Integer p;
      mpz_pow_ui(p.get_mpz_t(), rep.monomial_values[j].get_mpz_t(),
                 static_cast<unsigned long>(k));
      vand.at(k, j) = Rational(p);
    }
  rep.vandermonde_rank = rank_exact(vand);
  rep.verdict = rep.vandermonde_rank == basis.size()
                    ? DeterminationReport::Verdict::exact_certificate
                    : DeterminationReport::Verdict::no_witness_up_to;
  if (!rep.pairwise_coprime)
    rep.notes =
        "entries not pairwise coprime, but all monomial values are distinct; "
        "the Vandermonde certificate still applies";
  return rep;
}

PhiDimensions phi_dimension_count(int N, int l) {
  if (N < 1 || l < 1) throw std::invalid_argument("phi_dimension_count: N, l >= 1");
  PhiDimensions d;
  d.dim_domain = binomial(static_cast<unsigned long>(N + l - 1), static_cast<unsigned long>(l));
  d.dim_codomain =
      binomial(static_cast<unsigned long>(l) * static_cast<unsigned long>(N) + 4, 4);
  d.kernel_guaranteed = d.dim_domain > d.dim_codomain;
  return d;
}

bool dominance_order_strict(int N, int l) {
  const MonomialBasis basis = MonomialBasis::build(N, l);
  std::set<std::vector<int>> tails;
  for (const auto& e : basis.exponents) {
    std::vector<int> tail(e.begin() + 1, e.end());
    if (!tails.insert(tail).second) return false;
  }
  return true;
}

namespace {

// Coordinates of the substitution curve: s*P_n + t*Q_n in variables
// (s, t, x, y), built by the complex recurrence z^{n+1} = z^n * (x + iy).
std::vector<PolyQ> phi_arguments(int N) {
  const PolyQ S = PolyQ::variable(4, 0);
  const PolyQ T = PolyQ::variable(4, 1);
  const PolyQ X = PolyQ::variable(4, 2);
  const PolyQ Y = PolyQ::variable(4, 3);
  PolyQ P = PolyQ::constant(4, Rational(1));
  PolyQ Q(4);
  std::vector<PolyQ> args;
  for (int n = 0; n < N; ++n) {
    args.push_back(S * P + T * Q);
    const PolyQ P1 = P * X - Q * Y;
    Q = P * Y + Q * X;
    P = P1;
  }
  return args;
}

}  // namespace

PhiKernelSearchResult phi_kernel_search(int N_max, int l_max, std::size_t term_cap) {
  if (N_max < 1 || l_max < 1 || term_cap == 0)
    throw std::invalid_argument("phi_kernel_search: caps must be positive");
  PhiKernelSearchResult result;

  // Cells ordered by domain dimension, then (N, l).
  std::vector<std::pair<int, int>> cells;
  for (int N = 1; N <= N_max; ++N)
    for (int l = 1; l <= l_max; ++l) cells.emplace_back(N, l);
  std::stable_sort(cells.begin(), cells.end(), [](auto a, auto b) {
    const Integer da = binomial(a.first + a.second - 1, a.second);
    const Integer db = binomial(b.first + b.second - 1, b.second);
    if (da != db) return da < db;
    return a < b;
  });

  for (const auto& [N, l] : cells) {
    const MonomialBasis basis = MonomialBasis::build(N, l);
    try {
      const std::vector<PolyQ> args = phi_arguments(N);
      // Cached powers of each argument up to the exponent needed.
      std::vector<std::vector<PolyQ>> pw(args.size());
      for (std::size_t j = 0; j < args.size(); ++j)
        pw[j].push_back(PolyQ::constant(4, Rational(1)));
      const auto arg_power = [&](std::size_t j, int e) -> const PolyQ& {
        while (static_cast<int>(pw[j].size()) <= e)
          pw[j].push_back(pw[j].back().multiply(args[j], term_cap));
        return pw[j][static_cast<std::size_t>(e)];
      };

      std::map<MultiIndex, std::size_t, MonomialLess> row_of;
      std::vector<std::vector<std::pair<std::size_t, Rational>>> cols(basis.size());
      for (std::size_t c = 0; c < basis.size(); ++c) {
        PolyQ composed = PolyQ::constant(4, Rational(1));
        const MultiIndex& e = basis.exponents[c];
        for (std::size_t j = 0; j < args.size(); ++j)
          if (e[j] > 0) composed = composed.multiply(arg_power(j, e[j]), term_cap);
        for (const auto& [mon, coeff] : composed.terms()) {
          const auto [it, fresh] = row_of.emplace(mon, row_of.size());
          cols[c].emplace_back(it->second, coeff);
        }
      }

      MatQ m(row_of.size(), basis.size());
      for (std::size_t c = 0; c < basis.size(); ++c)
        for (const auto& [r, coeff] : cols[c]) m.at(r, c) = coeff;

      const auto kernel = nullspace(m);
      result.scanned.push_back({N, l, static_cast<long long>(kernel.size())});
      if (kernel.empty()) continue;

      PhiKernelFind find;
      find.N = N;
      find.l = l;
      find.kernel_element = poly_from_coeffs(basis, kernel.front());

      // Spot-check at 200 random parameter points, relative tolerance 1e-8.
      Rng rng(0xfeedULL + static_cast<std::uint64_t>(N * 131 + l));
      const CurveSpec spec = CurveSpec::complex_pq(N);
      double worst = 0.0;
      const PolyD rd = to_double_poly(find.kernel_element);
      double coeff_norm = 0.0;
      for (const auto& [e, cf] : rd.terms()) coeff_norm += std::abs(cf);
      for (int trial = 0; trial < 200; ++trial) {
        const std::vector<std::vector<double>> prm = {
            {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
        const auto v = sample_curve(spec, prm);
        double sup = 1.0;
        for (double x : v.front()) sup = std::max(sup, std::abs(x));
        double scale = coeff_norm;
        for (int p = 0; p < l; ++p) scale *= sup;
        worst = std::max(worst, std::abs(rd.eval(v.front())) / scale);
      }
      find.held_out_residual = worst;
      if (worst <= 1e-8) {
        result.found = find;
        return result;
      }
      result.skipped_cells.push_back("N=" + std::to_string(N) + ",l=" + std::to_string(l) +
                                     ": kernel failed sample verification");
    } catch (const TermCapExceeded&) {
      result.skipped_cells.push_back("N=" + std::to_string(N) + ",l=" + std::to_string(l) +
                                     ": term cap exceeded");
      continue;
    }
  }
  result.caps_exhausted = true;
  return result;
}

std::vector<PolyQ> rational_difference_kernel(const UniPolyQ& p, const UniPolyQ& q,
                                              int N, int l) {
  if (N < 3) throw std::invalid_argument("rational_difference_kernel: N must be >= 3");
  if (l < 1) throw std::invalid_argument("rational_difference_kernel: l must be >= 1");
  if (q.is_zero()) throw std::invalid_argument("rational_difference_kernel: zero denominator");

  // q(ks) for k = 0..N-1.
  std::vector<UniPolyQ> qk, pk;
  for (int k = 0; k < N; ++k) {
    qk.push_back(q.scale_arg(Rational(k)));
    pk.push_back(p.scale_arg(Rational(k)));
  }
  // gamma_j = [p(js) q((j-1)s) - p((j-1)s) q(js)] * prod_{k != j-1, j} q(ks).
  std::vector<UniPolyQ> gamma;
  for (int j = 1; j < N; ++j) {
    UniPolyQ g = pk[j] * qk[j - 1] - pk[j - 1] * qk[j];
    for (int k = 0; k < N; ++k)
      if (k != j && k != j - 1) g = g * qk[k];
    gamma.push_back(std::move(g));
  }

  const int d = N - 1;
  const MonomialBasis basis = MonomialBasis::build(d, l);
  // Coefficient matrix of the monomials of gamma as univariate polynomials.
  std::vector<UniPolyQ> monomials;
  int max_deg = 0;
  for (const auto& e : basis.exponents) {
    UniPolyQ m = UniPolyQ::constant(Rational(1));
    for (int j = 0; j < d; ++j)
      if (e[j] > 0) m = m * unipoly_pow(gamma[j], static_cast<unsigned>(e[j]));
    max_deg = std::max(max_deg, m.degree());
    monomials.push_back(std::move(m));
  }
  if (max_deg < 0) max_deg = 0;
  MatQ m(static_cast<std::size_t>(max_deg) + 1, basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c)
    for (std::size_t r = 0; r < monomials[c].coeffs.size(); ++r)
      m.at(r, c) = monomials[c].coeffs[r];

  const auto kernel = nullspace(m);
  std::vector<PolyQ> out;
  out.reserve(kernel.size());
  for (const auto& c : kernel) out.push_back(poly_from_coeffs(basis, c));
  return out;
}

}  // namespace forge
