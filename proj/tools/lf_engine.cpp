// lf-engine: GN-model nonlinear-interference evaluation for multi-span WDM
// links with arbitrary per-channel power evolution (ISRS, Raman pumping).
//
// Subcommands:
//   run       solve profiles, fit islands, assemble LK, integrate NLI
//   validate  report configuration problems without running
//   islands   dump the integration islands of one channel under test

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "lfengine/config.hpp"
#include "lfengine/csv.hpp"
#include "lfengine/errors.hpp"
#include "lfengine/pipeline.hpp"
#include "lfengine/version.hpp"

namespace {

int cmd_run(const std::string& config_path, const lfengine::RunOptions& options) {
  auto cfg = lfengine::load_run_config(config_path);
  auto result = lfengine::run_pipeline(cfg, options);
  std::cout << "wrote " << result.artifacts.size() << " artifacts to "
            << options.out_dir.string() << "\n";
  for (const auto& ch : result.report.channels) {
    std::cout << "channel " << ch.channel << ": NLI "
              << lfengine::format_double(ch.nli_power_w) << " W, PSD "
              << lfengine::format_double(ch.psd_center_w_per_hz) << " W/Hz\n";
  }
  return 0;
}

int cmd_validate(const std::string& config_path) {
  auto cfg = lfengine::load_run_config(config_path);
  auto diagnostics = lfengine::validate_config(cfg);
  if (diagnostics.empty()) {
    std::cout << "configuration is valid\n";
    return 0;
  }
  for (const auto& d : diagnostics)
    std::cout << d.where << ": " << d.message << "\n";
  return 2;
}

int cmd_islands(const std::string& config_path, std::size_t cut) {
  auto cfg = lfengine::load_run_config(config_path);
  auto diagnostics = lfengine::validate_config(cfg);
  if (!diagnostics.empty()) {
    for (const auto& d : diagnostics)
      std::cerr << d.where << ": " << d.message << "\n";
    return 2;
  }
  auto link = lfengine::build_link(cfg);
  auto islands = lfengine::enumerate_islands(link.grid(), cut);
  std::cout << "cut,ch1,ch2,ch3,f1_lo_hz,f1_hi_hz,f2_lo_hz,f2_hi_hz,rep1_hz,rep2_hz,rep3_hz\n";
  for (const auto& island : islands) {
    std::cout << island.cut << ',' << island.ch1 << ',' << island.ch2 << ','
              << island.ch3 << ',' << lfengine::format_double(island.f1_lo_hz) << ','
              << lfengine::format_double(island.f1_hi_hz) << ','
              << lfengine::format_double(island.f2_lo_hz) << ','
              << lfengine::format_double(island.f2_hi_hz) << ','
              << lfengine::format_double(island.rep1_hz) << ','
              << lfengine::format_double(island.rep2_hz) << ','
              << lfengine::format_double(island.rep3_hz) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GN-model link-function and NLI engine for Raman-affected WDM links"};
  app.set_version_flag("--version", lfengine::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  lfengine::RunOptions options;
  std::string out_dir;
  double dz = 0.0;
  int n_psi = -1;
  double m_w = -1.0;
  std::size_t cut = 0;

  auto* run = app.add_subcommand("run", "run the full evaluation pipeline");
  run->add_option("--config", config_path, "run configuration (JSON)")->required();
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_flag("--oracle", options.oracle,
                "validate each span integral against direct quadrature");
  run->add_flag("--no-raman", options.no_raman,
                "use the closed-form link function (Raman-free links only)");
  auto* dz_opt = run->add_option("--dz", dz, "override solver step in meters");
  auto* npsi_opt = run->add_option("--n-psi", n_psi, "override fit polynomial degree");
  auto* mw_opt = run->add_option("--m-w", m_w, "override fit weight exponent");
  run->add_option("--threads", options.threads, "worker threads (0 = hardware)");

  auto* validate = app.add_subcommand("validate", "check a configuration file");
  validate->add_option("--config", config_path, "run configuration (JSON)")->required();

  auto* islands = app.add_subcommand("islands", "list integration islands for one CUT");
  islands->add_option("--config", config_path, "run configuration (JSON)")->required();
  islands->add_option("--cut", cut, "channel under test (0-based)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      options.out_dir = out_dir;
      if (dz_opt->count() > 0) options.dz_m = dz;
      if (npsi_opt->count() > 0) options.fit_degree = n_psi;
      if (mw_opt->count() > 0) options.weight_exponent = m_w;
      return cmd_run(config_path, options);
    }
    if (validate->parsed()) return cmd_validate(config_path);
    if (islands->parsed()) return cmd_islands(config_path, cut);
  } catch (const lfengine::Error& e) {
    std::cerr << "error[" << e.category() << "]: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
