#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lfengine/config.hpp"
#include "lfengine/gn.hpp"

namespace lfengine {

struct RunOptions {
  std::filesystem::path out_dir;
  bool oracle = false;    // record polynomial-vs-direct span-integral deviations
  bool no_raman = false;  // use the closed-form link function (Raman-free links)
  int threads = 0;        // 0 = hardware concurrency
  std::optional<double> dz_m;
  std::optional<int> fit_degree;
  std::optional<double> weight_exponent;
};

struct StageTiming {
  std::string stage;
  double seconds = 0.0;
};

struct PipelineResult {
  NliReport report;
  std::vector<std::filesystem::path> artifacts;
  std::filesystem::path manifest;
  std::vector<StageTiming> timings;
};

/// Runs the full evaluation: solve per-span power profiles, enumerate the
/// integration islands per CUT, fit every island on every span, assemble the
/// link function, and integrate the GN double integral. Writes profiles,
/// islands, fits, and NLI CSV files plus a run manifest under out_dir.
/// Identical configurations produce identical CSV files regardless of the
/// thread count; only the manifest timings vary.
PipelineResult run_pipeline(const RunConfig& cfg, const RunOptions& options);

}  // namespace lfengine
