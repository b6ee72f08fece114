#pragma once

// End-to-end constructions behind the CLI: each pipeline builds one of the
// library's counterexamples or certificates, verifies it against declared
// tolerances, optionally writes artifacts, and returns a deterministic JSON
// summary. Summaries contain no paths or timestamps, so the same config and
// seed always produce byte-identical summary text.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace forge::pipelines {

using json = nlohmann::json;

// Process exit statuses for pipeline runs.
inline constexpr int kVerified = 0;       // built and every check passed
inline constexpr int kResidual = 2;       // built; some residual above tolerance
inline constexpr int kCapsExhausted = 3;  // search ended at its caps, no find

const std::vector<std::string>& pipeline_names();

struct PipelineResult {
  int exit_code = 1;
  json summary;
};

// Runs the named pipeline. `config` is a flat JSON object of parameter
// overrides (unknown keys are rejected), `seed` feeds every randomized
// step, and `out_dir` (empty = none) receives artifacts plus summary.json.
// Throws std::invalid_argument for unknown pipelines or bad config.
PipelineResult run_pipeline(const std::string& name, const json& config,
                            std::uint64_t seed, const std::string& out_dir);

}  // namespace forge::pipelines
