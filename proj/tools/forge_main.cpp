// forge: command-line front end for the construction and verification
// library. Subcommands cover the end-to-end pipelines, the transform-pair
// builder, mixing-measure verification, the continuous-time tools, the
// determining-set analyzer, and artifact export.

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "forge/detset.hpp"
#include "forge/exchangeable.hpp"
#include "forge/fourierlab.hpp"
#include "forge/io.hpp"
#include "forge/levymix.hpp"
#include "forge/pipelines.hpp"
#include "forge/simplexmap.hpp"

namespace {

using forge::io::json;

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

json report_to_json(const forge::DeterminationReport& rep) {
  json j;
  j["curve"] = rep.curve;
  j["l_max"] = rep.l_max;
  switch (rep.verdict) {
    case forge::DeterminationReport::Verdict::witness_found:
      j["verdict"] = "witness-found";
      break;
    case forge::DeterminationReport::Verdict::no_witness_up_to:
      j["verdict"] = "no-witness-up-to";
      break;
    case forge::DeterminationReport::Verdict::exact_certificate:
      j["verdict"] = "exact-certificate";
      break;
  }
  if (rep.witness) j["witness"] = forge::io::poly_to_json(*rep.witness);
  if (rep.witness_float) {
    json terms = json::array();
    for (const auto& [e, c] : rep.witness_float->terms())
      terms.push_back({{"coeff", c}, {"exps", e}});
    j["witness_float"] = terms;
  }
  if (rep.witness_degree >= 0) j["witness_degree"] = rep.witness_degree;
  j["sample_count"] = rep.sample_count;
  j["held_out_residual"] = rep.held_out_residual;
  if (!rep.scans.empty()) {
    json scans = json::array();
    for (const auto& s : rep.scans)
      scans.push_back({{"candidates", s.candidates},
                       {"degree", s.degree},
                       {"rejected", s.rejected},
                       {"sigma_max", s.sigma_max},
                       {"sigma_min", s.sigma_min}});
    j["scans"] = scans;
  }
  if (!rep.monomial_values.empty()) {
    json values = json::array();
    for (const auto& v : rep.monomial_values) values.push_back(v.get_str());
    j["monomial_values"] = values;
    j["pairwise_coprime"] = rep.pairwise_coprime;
    j["vandermonde_rank"] = rep.vandermonde_rank;
  }
  if (!rep.notes.empty()) j["notes"] = rep.notes;
  return j;
}

struct PipelineArgs {
  std::string config_file;
  std::uint64_t seed = 1;
  std::string out_dir;
};

int run_pipeline_command(const std::string& name, const PipelineArgs& args) {
  json config;
  if (!args.config_file.empty())
    config = forge::io::read_json_file(args.config_file);
  forge::pipelines::PipelineResult res =
      forge::pipelines::run_pipeline(name, config, args.seed, args.out_dir);
  print_json(res.summary);
  return res.exit_code;
}

struct FourierArgs {
  std::string poly_file;
  int m = 128;
  double R = 30.0;
  int exponent = 2;
  int K = 0;  // 0 = automatic
  std::string out_dir;
};

int run_fourier(const FourierArgs& a) {
  forge::PolyQ p = forge::io::poly_from_json(
      forge::io::read_json_file(a.poly_file));
  std::optional<int> K;
  if (a.K > 0) K = a.K;
  forge::CounterexamplePair pair =
      forge::build_counterexample(p, p.nvars(), a.m, a.R, K, a.exponent);
  json metrics;
  metrics["K"] = pair.K;
  metrics["R"] = a.R;
  metrics["boundary_decay"] = pair.boundary_decay;
  metrics["exponent"] = pair.exponent;
  metrics["imag_residual"] = pair.imag_residual;
  metrics["l1_distance"] = pair.l1_distance;
  metrics["m"] = a.m;
  metrics["mass_mismatch"] = pair.mass_mismatch;
  if (!a.out_dir.empty()) {
    forge::io::write_grid_binary(pair.mu, a.out_dir + "/mu.grid");
    forge::io::write_grid_binary(pair.nu, a.out_dir + "/nu.grid");
    forge::io::write_json_file(a.out_dir + "/metrics.json", metrics);
  }
  print_json(metrics);
  return 0;
}

struct VerifyArgs {
  std::string theta1_file, theta2_file;
  int nmax = 12;
  int degree = 8;
  double tol = 1e-9;
};

int run_verify_aldous(const VerifyArgs& a) {
  forge::MixingMeasure t1 = forge::io::mixing_from_json(
      forge::io::read_json_file(a.theta1_file));
  forge::MixingMeasure t2 = forge::io::mixing_from_json(
      forge::io::read_json_file(a.theta2_file));
  if (t1.atoms.size() != t2.atoms.size())
    throw std::invalid_argument("mixing measures have different atom lists");
  for (std::size_t i = 0; i < t1.atoms.size(); ++i)
    if (std::abs(t1.atoms[i] - t2.atoms[i]) > 1e-12)
      throw std::invalid_argument("mixing measures have different atom lists");

  std::vector<double> tv = forge::compare_partial_sum_laws(t1, t2, a.nmax);
  double max_tv = *std::max_element(tv.begin(), tv.end());

  // Largest mixed-moment difference up to the requested degree: evidence of
  // distinct mixing laws even when every partial-sum law matches.
  forge::MomentTable m1 = forge::mixed_moments(t1, a.degree);
  forge::MomentTable m2 = forge::mixed_moments(t2, a.degree);
  double max_moment_diff = 0.0;
  for (const auto& [r, v] : m1.moments)
    max_moment_diff = std::max(max_moment_diff, std::abs(v - m2.at(r)));

  const bool equal_partial_sums = max_tv <= a.tol;
  json out;
  out["degree"] = a.degree;
  out["max_mixed_moment_difference"] = max_moment_diff;
  out["nmax"] = a.nmax;
  out["partial_sum_tv"] = tv;
  out["partial_sum_tv_max"] = max_tv;
  out["partial_sums_equal_within_tol"] = equal_partial_sums;
  out["tolerance"] = a.tol;
  print_json(out);
  return equal_partial_sums ? 0 : 2;
}

struct LevyArgs {
  std::string mode;
  std::vector<double> probs, means, vars;
  std::vector<double> atoms, masses;
  std::string theta1_file, theta2_file;
  double time = 1.0;
  std::string out_file;
  std::uint64_t seed = 1;
};

int run_levy(const LevyArgs& a) {
  if (a.mode == "bm") {
    if (a.probs.empty() || a.probs.size() != a.means.size() ||
        a.probs.size() != a.vars.size())
      throw std::invalid_argument(
          "bm mode needs --probs, --means, --vars of equal length");
    forge::LevyMixing mix;
    mix.probs = a.probs;
    for (std::size_t i = 0; i < a.probs.size(); ++i) {
      forge::LevyTriple t;
      t.beta = a.means[i];
      t.sigma2 = a.vars[i];
      mix.components.push_back(t);
    }
    mix.validate();
    forge::HybridTable table = forge::bm_hybrid_transform(mix, {}, {}, a.time);
    json out = forge::io::hybrid_table_to_json(table);
    if (!a.out_file.empty()) forge::io::write_json_file(a.out_file, out);
    print_json(out);
    return 0;
  }
  if (a.mode == "lispp") {
    if (a.atoms.empty() || a.atoms.size() != a.masses.size())
      throw std::invalid_argument(
          "lispp mode needs --atoms and --masses of equal length");
    forge::LisppSpec spec;
    spec.mu.atoms = a.atoms;
    spec.mu.masses = a.masses;
    json exponent_table = json::array();
    for (int i = 0; i <= 16; ++i) {
      double s = 4.0 * i / 16.0;
      exponent_table.push_back(
          {{"psi", forge::lispp_laplace_exponent(spec, s)}, {"s", s}});
    }
    json out;
    out["laplace_exponent"] = exponent_table;
    out["time"] = a.time;
    if (!a.out_file.empty()) forge::io::write_json_file(a.out_file, out);
    print_json(out);
    return 0;
  }
  if (a.mode == "bridge") {
    if (a.theta1_file.empty() || a.theta2_file.empty())
      throw std::invalid_argument("bridge mode needs --theta1 and --theta2");
    json config;
    config["theta1_file"] = a.theta1_file;
    config["theta2_file"] = a.theta2_file;
    forge::pipelines::PipelineResult res = forge::pipelines::run_pipeline(
        "bridge", config, a.seed, a.out_file);
    print_json(res.summary);
    return res.exit_code;
  }
  throw std::invalid_argument("unknown levy mode: " + a.mode);
}

struct DetsetArgs {
  std::string curve_file;
  int lmax = 2;
  std::string mode = "float";
  int samples = 0;
  std::uint64_t seed = 1;
};

int run_detset_analyze(const DetsetArgs& a) {
  forge::CurveSpec spec = forge::io::curve_spec_from_json(
      forge::io::read_json_file(a.curve_file));
  forge::SearchOptions opts;
  opts.seed = a.seed;
  if (a.samples > 0) opts.min_samples = static_cast<std::size_t>(a.samples);
  forge::KernelMode mode;
  if (a.mode == "exact") {
    mode = forge::KernelMode::exact;
  } else if (a.mode == "float") {
    mode = forge::KernelMode::floating;
  } else {
    throw std::invalid_argument("mode must be exact or float");
  }
  forge::DeterminationReport rep =
      forge::find_vanishing_polynomial(spec, a.lmax, mode, opts);
  print_json(report_to_json(rep));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "forge: constructive counterexamples and uniqueness certificates for "
      "distribution-determination problems"};
  app.require_subcommand(1);

  // Pipelines: one subcommand per end-to-end construction.
  std::vector<std::pair<std::string, PipelineArgs>> pipeline_args;
  pipeline_args.reserve(forge::pipelines::pipeline_names().size());
  for (const std::string& name : forge::pipelines::pipeline_names()) {
    pipeline_args.emplace_back(name, PipelineArgs{});
    PipelineArgs& args = pipeline_args.back().second;
    CLI::App* sub = app.add_subcommand(
        name, "Run the " + name + " pipeline (summary JSON on stdout)");
    sub->add_option("--config", args.config_file,
                    "JSON file with parameter overrides");
    sub->add_option("--seed", args.seed, "Seed for randomized steps");
    sub->add_option("--out", args.out_dir, "Directory for artifacts");
  }

  FourierArgs fourier;
  CLI::App* fourier_cmd = app.add_subcommand(
      "fourier", "Build a transform pair from a polynomial's variety");
  fourier_cmd->add_option("--poly", fourier.poly_file, "Polynomial JSON file")
      ->required();
  fourier_cmd->add_option("--m", fourier.m, "Grid points per axis");
  fourier_cmd->add_option("--R", fourier.R, "Grid half-width");
  fourier_cmd->add_option("--exponent", fourier.exponent,
                          "Power applied to the polynomial");
  fourier_cmd->add_option("--K", fourier.K,
                          "Smoothing power (0 = automatic)");
  fourier_cmd->add_option("--out", fourier.out_dir,
                          "Directory for grid artifacts");

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand(
      "verify-aldous",
      "Compare partial-sum laws and mixed moments of two mixing measures");
  verify_cmd->add_option("--theta1", verify.theta1_file, "Mixing measure JSON")
      ->required();
  verify_cmd->add_option("--theta2", verify.theta2_file, "Mixing measure JSON")
      ->required();
  verify_cmd->add_option("--nmax", verify.nmax, "Largest partial-sum index");
  verify_cmd->add_option("--degree", verify.degree,
                         "Mixed-moment comparison degree");
  verify_cmd->add_option("--tol", verify.tol, "Equality tolerance");

  LevyArgs levy;
  CLI::App* levy_cmd = app.add_subcommand(
      "levy", "Continuous-time tools: bm | lispp | bridge");
  levy_cmd->add_option("--mode", levy.mode, "bm, lispp, or bridge")
      ->required();
  levy_cmd->add_option("--probs", levy.probs, "Component probabilities");
  levy_cmd->add_option("--means", levy.means, "Component drifts");
  levy_cmd->add_option("--vars", levy.vars, "Component variances");
  levy_cmd->add_option("--atoms", levy.atoms, "Jump measure atoms");
  levy_cmd->add_option("--masses", levy.masses, "Jump measure masses");
  levy_cmd->add_option("--theta1", levy.theta1_file, "Mixing measure JSON");
  levy_cmd->add_option("--theta2", levy.theta2_file, "Mixing measure JSON");
  levy_cmd->add_option("--time", levy.time, "Observation time");
  levy_cmd->add_option("--out", levy.out_file,
                       "Output file (bm/lispp) or directory (bridge)");
  levy_cmd->add_option("--seed", levy.seed, "Seed for simulation artifacts");

  DetsetArgs detset;
  CLI::App* detset_cmd =
      app.add_subcommand("detset", "Determining-set analysis");
  CLI::App* analyze_cmd = detset_cmd->add_subcommand(
      "analyze", "Search a parametric curve for vanishing polynomials");
  analyze_cmd->add_option("--curve", detset.curve_file, "Curve spec JSON")
      ->required();
  analyze_cmd->add_option("--lmax", detset.lmax, "Largest degree to test");
  analyze_cmd->add_option("--mode", detset.mode, "exact or float");
  analyze_cmd->add_option("--samples", detset.samples,
                          "Training samples (0 = automatic)");
  analyze_cmd->add_option("--seed", detset.seed, "Sampling seed");
  detset_cmd->require_subcommand(1);

  std::string export_in, export_format, export_out;
  CLI::App* export_cmd = app.add_subcommand(
      "export", "Convert a stored artifact between formats");
  export_cmd->add_option("--in", export_in, "Input artifact path")->required();
  export_cmd
      ->add_option("--format", export_format, "csv, json, or binary-grid")
      ->required();
  export_cmd->add_option("--out", export_out, "Output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, args] : pipeline_args)
      if (app.get_subcommand(name)->parsed())
        return run_pipeline_command(name, args);
    if (fourier_cmd->parsed()) return run_fourier(fourier);
    if (verify_cmd->parsed()) return run_verify_aldous(verify);
    if (levy_cmd->parsed()) return run_levy(levy);
    if (detset_cmd->parsed()) return run_detset_analyze(detset);
    if (export_cmd->parsed()) {
      forge::io::export_artifact(export_in, export_format, export_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
