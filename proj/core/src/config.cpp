#include "lfengine/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lfengine/errors.hpp"

namespace lfengine {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key()))
      throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
  }
}

double as_number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

std::vector<double> as_number_list(const json& v, const std::string& where) {
  // Scalar-or-list: a scalar is shorthand for the same value on every channel.
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError(where + ": expected a number or a list of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(as_number(e, where));
  return out;
}

PumpConfig parse_pump(const json& obj, const std::string& where) {
  check_keys(obj, {"frequency_hz", "power_w", "direction", "alpha_per_m"}, where);
  PumpConfig pump;
  if (!obj.contains("frequency_hz")) throw ConfigError(where + ": frequency_hz is required");
  pump.frequency_hz = as_number(obj.at("frequency_hz"), where + ".frequency_hz");
  if (obj.contains("power_w")) pump.power_w = as_number(obj.at("power_w"), where + ".power_w");
  if (!obj.contains("direction")) throw ConfigError(where + ": direction is required");
  const std::string dir = obj.at("direction").is_string()
                              ? obj.at("direction").get<std::string>()
                              : throw ConfigError(where + ".direction: expected a string");
  if (dir == "forward")
    pump.direction = Direction::forward;
  else if (dir == "backward")
    pump.direction = Direction::backward;
  else
    throw ConfigError(where + ".direction: must be \"forward\" or \"backward\"");
  if (!obj.contains("alpha_per_m")) throw ConfigError(where + ": alpha_per_m is required");
  pump.alpha_per_m = as_number(obj.at("alpha_per_m"), where + ".alpha_per_m");
  return pump;
}

SpanConfig parse_span(const json& obj, const std::string& where) {
  check_keys(obj,
             {"length_m", "gamma_per_w_m", "alpha_per_m", "beta0_per_m", "beta1_s_per_m",
              "beta2_s2_per_m", "beta3_s3_per_m", "taylor_center_hz", "raman_gain",
              "pumps"},
             where);
  SpanConfig span;
  for (const char* req : {"length_m", "gamma_per_w_m", "alpha_per_m", "beta2_s2_per_m"})
    if (!obj.contains(req)) throw ConfigError(where + ": " + req + " is required");
  span.length_m = as_number(obj.at("length_m"), where + ".length_m");
  span.gamma_per_w_m = as_number(obj.at("gamma_per_w_m"), where + ".gamma_per_w_m");
  span.alpha_per_m = as_number_list(obj.at("alpha_per_m"), where + ".alpha_per_m");
  if (obj.contains("beta0_per_m"))
    span.beta0_per_m = as_number(obj.at("beta0_per_m"), where + ".beta0_per_m");
  if (obj.contains("beta1_s_per_m"))
    span.beta1_s_per_m = as_number(obj.at("beta1_s_per_m"), where + ".beta1_s_per_m");
  span.beta2_s2_per_m = as_number(obj.at("beta2_s2_per_m"), where + ".beta2_s2_per_m");
  if (obj.contains("beta3_s3_per_m"))
    span.beta3_s3_per_m = as_number(obj.at("beta3_s3_per_m"), where + ".beta3_s3_per_m");
  if (obj.contains("taylor_center_hz"))
    span.taylor_center_hz = as_number(obj.at("taylor_center_hz"), where + ".taylor_center_hz");
  if (obj.contains("raman_gain")) {
    const auto& rg = obj.at("raman_gain");
    if (!rg.is_object()) throw ConfigError(where + ".raman_gain: expected an object");
    check_keys(rg, {"offsets_hz", "gain_per_w_m"}, where + ".raman_gain");
    RamanTableConfig table;
    if (!rg.contains("offsets_hz") || !rg.contains("gain_per_w_m"))
      throw ConfigError(where + ".raman_gain: offsets_hz and gain_per_w_m are required");
    table.offsets_hz = as_number_list(rg.at("offsets_hz"), where + ".raman_gain.offsets_hz");
    table.gain_per_w_m =
        as_number_list(rg.at("gain_per_w_m"), where + ".raman_gain.gain_per_w_m");
    span.raman_gain = std::move(table);
  }
  if (obj.contains("pumps")) {
    const auto& pumps = obj.at("pumps");
    if (!pumps.is_array()) throw ConfigError(where + ".pumps: expected a list");
    for (std::size_t i = 0; i < pumps.size(); ++i)
      span.pumps.push_back(
          parse_pump(pumps.at(i), where + ".pumps[" + std::to_string(i) + "]"));
  }
  return span;
}

AmplifierConfig parse_amplifier(const json& obj, const std::string& where) {
  check_keys(obj, {"gain", "phase_rad", "dcu_s2"}, where);
  AmplifierConfig amp;
  if (!obj.contains("gain")) throw ConfigError(where + ": gain is required");
  amp.gain = as_number_list(obj.at("gain"), where + ".gain");
  if (obj.contains("phase_rad"))
    amp.phase_rad = as_number_list(obj.at("phase_rad"), where + ".phase_rad");
  if (obj.contains("dcu_s2")) amp.dcu_s2 = as_number(obj.at("dcu_s2"), where + ".dcu_s2");
  return amp;
}

ChannelConfig parse_channel(const json& obj, const std::string& where) {
  check_keys(obj, {"center_hz", "symbol_rate_baud", "launch_power_w"}, where);
  for (const char* req : {"center_hz", "symbol_rate_baud", "launch_power_w"})
    if (!obj.contains(req)) throw ConfigError(where + ": " + req + " is required");
  ChannelConfig ch;
  ch.center_hz = as_number(obj.at("center_hz"), where + ".center_hz");
  ch.symbol_rate_baud = as_number(obj.at("symbol_rate_baud"), where + ".symbol_rate_baud");
  ch.launch_power_w = as_number(obj.at("launch_power_w"), where + ".launch_power_w");
  return ch;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
  check_keys(root,
             {"spans", "amplifiers", "channels", "solver", "fit", "quadrature", "cut",
              "power_integration_points"},
             origin);

  RunConfig cfg;
  if (!root.contains("spans") || !root.at("spans").is_array() || root.at("spans").empty())
    throw ConfigError(origin + ": spans must be a non-empty list");
  for (std::size_t i = 0; i < root.at("spans").size(); ++i)
    cfg.spans.push_back(
        parse_span(root.at("spans").at(i), "spans[" + std::to_string(i) + "]"));

  if (root.contains("amplifiers")) {
    const auto& amps = root.at("amplifiers");
    if (!amps.is_array()) throw ConfigError(origin + ": amplifiers must be a list");
    for (std::size_t i = 0; i < amps.size(); ++i)
      cfg.amplifiers.push_back(
          parse_amplifier(amps.at(i), "amplifiers[" + std::to_string(i) + "]"));
  }

  if (!root.contains("channels") || !root.at("channels").is_array() ||
      root.at("channels").empty())
    throw ConfigError(origin + ": channels must be a non-empty list");
  for (std::size_t i = 0; i < root.at("channels").size(); ++i)
    cfg.channels.push_back(
        parse_channel(root.at("channels").at(i), "channels[" + std::to_string(i) + "]"));

  if (root.contains("solver")) {
    const auto& s = root.at("solver");
    check_keys(s, {"dz_m", "shooting_tolerance", "max_shooting_iterations"}, "solver");
    if (s.contains("dz_m")) cfg.solver.dz_m = as_number(s.at("dz_m"), "solver.dz_m");
    if (s.contains("shooting_tolerance"))
      cfg.solver.shooting_tolerance =
          as_number(s.at("shooting_tolerance"), "solver.shooting_tolerance");
    if (s.contains("max_shooting_iterations"))
      cfg.solver.max_shooting_iterations = static_cast<int>(
          as_number(s.at("max_shooting_iterations"), "solver.max_shooting_iterations"));
  }

  if (root.contains("fit")) {
    const auto& f = root.at("fit");
    check_keys(f,
               {"degree", "weight_exponent", "theta_series_threshold", "series_terms",
                "condition_limit"},
               "fit");
    if (f.contains("degree"))
      cfg.fit.degree = static_cast<int>(as_number(f.at("degree"), "fit.degree"));
    if (f.contains("weight_exponent"))
      cfg.fit.weight_exponent = as_number(f.at("weight_exponent"), "fit.weight_exponent");
    if (f.contains("theta_series_threshold"))
      cfg.fit.theta_series_threshold =
          as_number(f.at("theta_series_threshold"), "fit.theta_series_threshold");
    if (f.contains("series_terms"))
      cfg.fit.series_terms =
          static_cast<int>(as_number(f.at("series_terms"), "fit.series_terms"));
    if (f.contains("condition_limit"))
      cfg.fit.condition_limit = as_number(f.at("condition_limit"), "fit.condition_limit");
  }

  if (root.contains("quadrature")) {
    const auto& q = root.at("quadrature");
    check_keys(q, {"rel_tol", "base_order", "max_refinements"}, "quadrature");
    if (q.contains("rel_tol"))
      cfg.quadrature.rel_tol = as_number(q.at("rel_tol"), "quadrature.rel_tol");
    if (q.contains("base_order"))
      cfg.quadrature.base_order =
          static_cast<int>(as_number(q.at("base_order"), "quadrature.base_order"));
    if (q.contains("max_refinements"))
      cfg.quadrature.max_refinements =
          static_cast<int>(as_number(q.at("max_refinements"), "quadrature.max_refinements"));
  }

  if (root.contains("cut")) {
    const auto& c = root.at("cut");
    if (c.is_string()) {
      if (c.get<std::string>() != "all")
        throw ConfigError("cut: the only string value is \"all\"");
      cfg.cut.all = true;
    } else if (c.is_number_integer()) {
      cfg.cut.indices.push_back(c.get<std::size_t>());
    } else if (c.is_array()) {
      for (const auto& e : c) {
        if (!e.is_number_integer()) throw ConfigError("cut: indices must be integers");
        cfg.cut.indices.push_back(e.get<std::size_t>());
      }
    } else {
      throw ConfigError("cut: expected \"all\", an index, or a list of indices");
    }
  } else {
    cfg.cut.all = true;
  }

  if (root.contains("power_integration_points"))
    cfg.power_integration_points = static_cast<int>(
        as_number(root.at("power_integration_points"), "power_integration_points"));

  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path.string());
}

std::vector<Diagnostic> validate_config(const RunConfig& cfg) {
  std::vector<Diagnostic> out;
  auto flag = [&out](std::string where, std::string message) {
    out.push_back({std::move(where), std::move(message)});
  };

  const std::size_t n_channels = cfg.channels.size();
  for (std::size_t k = 0; k < n_channels; ++k) {
    const auto& ch = cfg.channels[k];
    const std::string where = "channels[" + std::to_string(k) + "]";
    if (!(ch.center_hz > 0.0)) flag(where, "center_hz must be > 0");
    if (!(ch.symbol_rate_baud > 0.0)) flag(where, "symbol_rate_baud must be > 0");
    if (ch.launch_power_w < 0.0) flag(where, "launch_power_w must be >= 0");
    if (k > 0) {
      const auto& prev = cfg.channels[k - 1];
      if (!(prev.center_hz < ch.center_hz))
        flag(where, "center_hz must be strictly increasing");
      else if (prev.center_hz + 0.5 * prev.symbol_rate_baud >
               ch.center_hz - 0.5 * ch.symbol_rate_baud)
        flag(where, "band overlaps channel " + std::to_string(k - 1));
    }
  }

  if (!cfg.amplifiers.empty() && cfg.amplifiers.size() != cfg.spans.size())
    flag("amplifiers", "need one amplifier per span (or none for unity gain)");

  for (std::size_t s = 0; s < cfg.spans.size(); ++s) {
    const auto& span = cfg.spans[s];
    const std::string where = "spans[" + std::to_string(s) + "]";
    if (!(span.length_m > 0.0)) flag(where, "length_m must be > 0");
    if (span.gamma_per_w_m < 0.0) flag(where, "gamma_per_w_m must be >= 0");
    if (span.alpha_per_m.size() != 1 && span.alpha_per_m.size() != n_channels)
      flag(where + ".alpha_per_m",
           "need a scalar or one value per channel (" + std::to_string(n_channels) + ")");
    for (double a : span.alpha_per_m)
      if (a < 0.0 || !std::isfinite(a)) flag(where + ".alpha_per_m", "loss must be finite and >= 0");
    if (span.taylor_center_hz && !(*span.taylor_center_hz > 0.0))
      flag(where + ".taylor_center_hz", "must be > 0");
    if (span.raman_gain) {
      const auto& rg = *span.raman_gain;
      if (rg.offsets_hz.size() != rg.gain_per_w_m.size())
        flag(where + ".raman_gain", "offsets_hz and gain_per_w_m differ in length");
      double prev = 0.0;
      for (double u : rg.offsets_hz) {
        if (!(u > prev)) {
          flag(where + ".raman_gain.offsets_hz", "must be strictly increasing and positive");
          break;
        }
        prev = u;
      }
      for (double g : rg.gain_per_w_m)
        if (g < 0.0 || !std::isfinite(g)) {
          flag(where + ".raman_gain.gain_per_w_m", "must be finite and >= 0");
          break;
        }
    }
    for (std::size_t p = 0; p < span.pumps.size(); ++p) {
      const auto& pump = span.pumps[p];
      const std::string pwhere = where + ".pumps[" + std::to_string(p) + "]";
      if (!(pump.frequency_hz > 0.0)) flag(pwhere, "frequency_hz must be > 0");
      if (pump.alpha_per_m < 0.0) flag(pwhere, "alpha_per_m must be >= 0");
      if (!pump.power_w) {
        flag(pwhere, pump.direction == Direction::backward
                         ? "backward pump needs its z = L boundary power_w for the "
                           "shooting solve"
                         : "power_w is required");
      } else if (*pump.power_w < 0.0) {
        flag(pwhere, "power_w must be >= 0");
      }
      if (!span.raman_gain)
        flag(pwhere, "pump configured but the span has no raman_gain table");
    }
  }

  for (std::size_t a = 0; a < cfg.amplifiers.size(); ++a) {
    const auto& amp = cfg.amplifiers[a];
    const std::string where = "amplifiers[" + std::to_string(a) + "]";
    if (amp.gain.size() != 1 && amp.gain.size() != n_channels)
      flag(where + ".gain", "need a scalar or one value per channel");
    for (double g : amp.gain)
      if (!(g > 0.0)) flag(where + ".gain", "gains must be > 0");
    if (!amp.phase_rad.empty() && amp.phase_rad.size() != 1 &&
        amp.phase_rad.size() != n_channels)
      flag(where + ".phase_rad", "need a scalar or one value per channel");
    for (double ph : amp.phase_rad)
      if (!std::isfinite(ph)) flag(where + ".phase_rad", "phases must be finite");
  }

  double min_len = cfg.spans.empty() ? 0.0 : cfg.spans.front().length_m;
  for (const auto& span : cfg.spans) min_len = std::min(min_len, span.length_m);
  if (!(cfg.solver.dz_m > 0.0))
    flag("solver.dz_m", "must be > 0");
  else if (!cfg.spans.empty() && min_len > 0.0 && cfg.solver.dz_m > min_len)
    flag("solver.dz_m", "must not exceed the shortest span length");
  if (!(cfg.solver.shooting_tolerance > 0.0)) flag("solver.shooting_tolerance", "must be > 0");
  if (cfg.solver.max_shooting_iterations < 1)
    flag("solver.max_shooting_iterations", "must be >= 1");

  if (cfg.fit.degree < 0 || cfg.fit.degree > 60) flag("fit.degree", "must be in [0, 60]");
  if (cfg.fit.weight_exponent < 0.0) flag("fit.weight_exponent", "must be >= 0");
  if (!(cfg.fit.theta_series_threshold > 0.0))
    flag("fit.theta_series_threshold", "must be > 0");
  if (cfg.fit.series_terms < 1) flag("fit.series_terms", "must be >= 1");
  if (!(cfg.fit.condition_limit > 1.0)) flag("fit.condition_limit", "must be > 1");

  if (!(cfg.quadrature.rel_tol > 0.0)) flag("quadrature.rel_tol", "must be > 0");
  if (cfg.quadrature.base_order < 2) flag("quadrature.base_order", "must be >= 2");
  if (cfg.quadrature.max_refinements < 1) flag("quadrature.max_refinements", "must be >= 1");

  if (!cfg.cut.all) {
    if (cfg.cut.indices.empty()) flag("cut", "empty selection");
    for (std::size_t idx : cfg.cut.indices)
      if (idx >= n_channels)
        flag("cut", "index " + std::to_string(idx) + " out of range (have " +
                        std::to_string(n_channels) + " channels)");
  }

  if (cfg.power_integration_points < 1)
    flag("power_integration_points", "must be >= 1");

  return out;
}

Link build_link(const RunConfig& cfg) {
  std::vector<WdmChannel> channels(cfg.channels.size());
  double center_sum_lo = 0.0, center_sum_hi = 0.0;
  for (std::size_t k = 0; k < cfg.channels.size(); ++k) {
    channels[k].center_hz = cfg.channels[k].center_hz;
    channels[k].symbol_rate_baud = cfg.channels[k].symbol_rate_baud;
    channels[k].launch_power_w = cfg.channels[k].launch_power_w;
  }
  center_sum_lo = channels.front().center_hz;
  center_sum_hi = channels.back().center_hz;
  const double default_center = 0.5 * (center_sum_lo + center_sum_hi);

  std::vector<FiberSpan> spans(cfg.spans.size());
  for (std::size_t s = 0; s < cfg.spans.size(); ++s) {
    const auto& sc = cfg.spans[s];
    auto& span = spans[s];
    span.length_m = sc.length_m;
    span.gamma_per_w_m = sc.gamma_per_w_m;
    span.alpha_per_m = sc.alpha_per_m.size() == 1
                           ? std::vector<double>(channels.size(), sc.alpha_per_m[0])
                           : sc.alpha_per_m;
    span.beta0_per_m = sc.beta0_per_m;
    span.beta1_s_per_m = sc.beta1_s_per_m;
    span.beta2_s2_per_m = sc.beta2_s2_per_m;
    span.beta3_s3_per_m = sc.beta3_s3_per_m;
    span.taylor_center_hz = sc.taylor_center_hz.value_or(default_center);
    if (sc.raman_gain)
      span.raman = RamanGainProfile(sc.raman_gain->offsets_hz, sc.raman_gain->gain_per_w_m);
    for (const auto& pc : sc.pumps) {
      SpectralComponent pump;
      pump.frequency_hz = pc.frequency_hz;
      pump.power_w = pc.power_w.value_or(0.0);
      pump.direction = pc.direction;
      pump.alpha_per_m = pc.alpha_per_m;
      pump.kind = ComponentKind::pump;
      span.pumps.push_back(pump);
    }
  }

  std::vector<Amplifier> amplifiers(cfg.spans.size());
  for (std::size_t s = 0; s < cfg.spans.size(); ++s) {
    if (cfg.amplifiers.empty()) {
      amplifiers[s].gain.assign(channels.size(), 1.0);
      continue;
    }
    const auto& ac = cfg.amplifiers[s];
    amplifiers[s].gain = ac.gain.size() == 1
                             ? std::vector<double>(channels.size(), ac.gain[0])
                             : ac.gain;
    if (!ac.phase_rad.empty())
      amplifiers[s].phase_rad = ac.phase_rad.size() == 1
                                    ? std::vector<double>(channels.size(), ac.phase_rad[0])
                                    : ac.phase_rad;
    amplifiers[s].dcu_s2 = ac.dcu_s2;
  }

  return Link(std::move(spans), std::move(amplifiers), WdmGrid(std::move(channels)));
}

std::vector<std::size_t> resolve_cuts(const RunConfig& cfg) {
  std::vector<std::size_t> cuts;
  if (cfg.cut.all) {
    cuts.resize(cfg.channels.size());
    for (std::size_t k = 0; k < cuts.size(); ++k) cuts[k] = k;
    return cuts;
  }
  cuts = cfg.cut.indices;
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

}  // namespace lfengine
