#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "lfengine/gn.hpp"
#include "lfengine/link.hpp"
#include "lfengine/psi_fit.hpp"
#include "lfengine/solver.hpp"

namespace lfengine {

struct PumpConfig {
  double frequency_hz = 0.0;
  std::optional<double> power_w;  // boundary power; z = 0 forward, z = L backward
  Direction direction = Direction::forward;
  double alpha_per_m = 0.0;
};

struct RamanTableConfig {
  std::vector<double> offsets_hz;
  std::vector<double> gain_per_w_m;
};

struct SpanConfig {
  double length_m = 0.0;
  double gamma_per_w_m = 0.0;
  std::vector<double> alpha_per_m;  // scalar configs are expanded to all channels
  double beta0_per_m = 0.0;
  double beta1_s_per_m = 0.0;
  double beta2_s2_per_m = 0.0;
  double beta3_s3_per_m = 0.0;
  std::optional<double> taylor_center_hz;  // default: center of the WDM band
  std::optional<RamanTableConfig> raman_gain;
  std::vector<PumpConfig> pumps;
};

struct AmplifierConfig {
  std::vector<double> gain;       // scalar configs are expanded; default 1
  std::vector<double> phase_rad;  // empty = 0
  double dcu_s2 = 0.0;
};

struct ChannelConfig {
  double center_hz = 0.0;
  double symbol_rate_baud = 0.0;
  double launch_power_w = 0.0;
};

/// CUT selection: every channel, or an explicit index list.
struct CutSelection {
  bool all = false;
  std::vector<std::size_t> indices;
};

struct RunConfig {
  std::vector<SpanConfig> spans;
  std::vector<AmplifierConfig> amplifiers;  // empty = unity gain everywhere
  std::vector<ChannelConfig> channels;
  SolverOptions solver;
  FitConfig fit;
  QuadratureConfig quadrature;
  CutSelection cut;
  int power_integration_points = 1;
};

struct Diagnostic {
  std::string where;
  std::string message;
};

/// Parses a JSON run configuration. Structural problems (unknown keys, wrong
/// types) throw ConfigError; semantic problems are reported by
/// validate_config.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const std::string& text, const std::string& origin = "config");

/// Every semantic violation in the configuration, or an empty list.
std::vector<Diagnostic> validate_config(const RunConfig& cfg);

/// Builds the immutable link from a validated configuration. Power profiles
/// are not solved here.
Link build_link(const RunConfig& cfg);

/// Resolved CUT indices in increasing order.
std::vector<std::size_t> resolve_cuts(const RunConfig& cfg);

}  // namespace lfengine
