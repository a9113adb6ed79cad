#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lfengine/config.hpp"
#include "lfengine/errors.hpp"
#include "lfengine/pipeline.hpp"

using namespace lfengine;
namespace fs = std::filesystem;

namespace {

const char* kTinyRamanFree = R"json({
  "spans": [
    { "length_m": 60000, "gamma_per_w_m": 1.3e-3, "alpha_per_m": 2.3e-5,
      "beta2_s2_per_m": -21.3e-27, "beta3_s3_per_m": 0.12e-39 },
    { "length_m": 60000, "gamma_per_w_m": 1.3e-3, "alpha_per_m": 2.3e-5,
      "beta2_s2_per_m": -21.3e-27, "beta3_s3_per_m": 0.12e-39 }
  ],
  "amplifiers": [
    { "gain": 15.799842948260395 },
    { "gain": 15.799842948260395 }
  ],
  "channels": [
    { "center_hz": 193.0e12, "symbol_rate_baud": 40e9, "launch_power_w": 1e-3 },
    { "center_hz": 193.05e12, "symbol_rate_baud": 40e9, "launch_power_w": 1e-3 },
    { "center_hz": 193.1e12, "symbol_rate_baud": 40e9, "launch_power_w": 1e-3 }
  ],
  "solver": { "dz_m": 100 },
  "cut": 1
})json";

const char* kTinyRaman = R"json({
  "spans": [
    { "length_m": 50000, "gamma_per_w_m": 1.3e-3, "alpha_per_m": 2.3e-5,
      "beta2_s2_per_m": -21.3e-27,
      "raman_gain": {
        "offsets_hz": [1e12, 5e12, 10e12, 13.2e12, 15e12, 25e12, 40e12],
        "gain_per_w_m": [0.35e-4, 1.7e-4, 3.2e-4, 4.0e-4, 2.0e-4, 0.1e-4, 0.0]
      },
      "pumps": [{ "frequency_hz": 206.5e12, "power_w": 0.2,
                  "direction": "forward", "alpha_per_m": 2.88e-5 }] }
  ],
  "channels": [
    { "center_hz": 193.0e12, "symbol_rate_baud": 40e9, "launch_power_w": 1e-3 },
    { "center_hz": 193.05e12, "symbol_rate_baud": 40e9, "launch_power_w": 1e-3 }
  ],
  "solver": { "dz_m": 50 },
  "cut": 0
})json";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "lfengine_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("pipeline: artifacts exist and carry the expected headers") {
  auto cfg = parse_run_config(kTinyRamanFree);
  RunOptions opts;
  opts.out_dir = fresh_dir("artifacts");
  opts.threads = 2;
  auto result = run_pipeline(cfg, opts);

  REQUIRE(result.report.channels.size() == 1);
  CHECK(result.report.channels[0].channel == 1);
  CHECK(result.report.channels[0].nli_power_w > 0.0);

  CHECK(slurp(opts.out_dir / "profiles_span_0.csv")
            .starts_with("z_m,ch_0_P_W,ch_1_P_W,ch_2_P_W,ch_0_rho,ch_1_rho,ch_2_rho"));
  CHECK(slurp(opts.out_dir / "islands.csv")
            .starts_with("cut,ch1,ch2,ch3,f1_lo_hz,f1_hi_hz,f2_lo_hz,f2_hi_hz"));
  CHECK(slurp(opts.out_dir / "fits.csv")
            .starts_with("cut,ch1,ch2,ch3,span,residual,theta_re_per_m,theta_im_per_m,h_0"));
  CHECK(slurp(opts.out_dir / "nli.csv")
            .starts_with("channel,center_hz,nli_power_w,nli_psd_center_w_per_hz"));
  CHECK(fs::exists(opts.out_dir / "island_contributions.csv"));
  CHECK(fs::exists(opts.out_dir / "summary.txt"));

  SUBCASE("manifest lists every knob that affects the numbers") {
    const std::string manifest = slurp(result.manifest);
    for (const char* key :
         {"status: complete", "solver.dz_m:", "fit.degree: 10", "fit.weight_exponent: 2",
          "fit.theta_series_threshold: 0.001", "fit.series_terms: 24",
          "quadrature.rel_tol: 0.001", "quadrature.base_order: 12",
          "quadrature.max_refinements:", "power_integration_points: 1", "cut: 1",
          "threads: 2", "mode.oracle: off", "mode.no_raman: off"})
      CHECK_MESSAGE(manifest.find(key) != std::string::npos, "missing: ", key);
  }
}

TEST_CASE("pipeline: serial rerun reproduces every CSV byte for byte") {
  auto cfg = parse_run_config(kTinyRaman);
  RunOptions opts;
  opts.threads = 1;

  opts.out_dir = fresh_dir("rerun_a");
  auto first = run_pipeline(cfg, opts);
  auto dir_a = opts.out_dir;
  opts.out_dir = fresh_dir("rerun_b");
  auto second = run_pipeline(cfg, opts);

  for (const char* name : {"profiles_span_0.csv", "islands.csv", "fits.csv", "nli.csv",
                           "island_contributions.csv", "summary.txt"})
    CHECK_MESSAGE(slurp(dir_a / name) == slurp(opts.out_dir / name), "differs: ", name);

  SUBCASE("parallel run matches the serial bytes too") {
    RunOptions par = opts;
    par.out_dir = fresh_dir("rerun_par");
    par.threads = 4;
    run_pipeline(cfg, par);
    for (const char* name : {"fits.csv", "nli.csv", "island_contributions.csv"})
      CHECK_MESSAGE(slurp(dir_a / name) == slurp(par.out_dir / name), "differs: ", name);
  }
}

TEST_CASE("pipeline: oracle mode records sub-1e-3 deviations") {
  auto cfg = parse_run_config(kTinyRaman);
  RunOptions opts;
  opts.out_dir = fresh_dir("oracle");
  opts.oracle = true;
  auto result = run_pipeline(cfg, opts);
  (void)result;

  std::ifstream fits(opts.out_dir / "fits.csv");
  std::string header;
  std::getline(fits, header);
  REQUIRE(header.find("oracle_rel_dev") != std::string::npos);
  std::string line;
  int rows = 0;
  while (std::getline(fits, line)) {
    const auto pos = line.rfind(',');
    const double dev = std::stod(line.substr(pos + 1));
    CHECK(dev < 1e-3);
    ++rows;
  }
  CHECK(rows > 0);
}

TEST_CASE("pipeline: no-raman mode equals the polynomial path on a linear link") {
  auto cfg = parse_run_config(kTinyRamanFree);
  RunOptions opts;
  opts.out_dir = fresh_dir("noraman_poly");
  auto poly = run_pipeline(cfg, opts);
  opts.out_dir = fresh_dir("noraman_analytic");
  opts.no_raman = true;
  auto analytic = run_pipeline(cfg, opts);
  const double a = poly.report.channels[0].nli_power_w;
  const double b = analytic.report.channels[0].nli_power_w;
  CHECK(std::abs(a - b) <= 2e-3 * b);  // both paths quadratured at rel_tol 1e-3

  SUBCASE("no-raman mode refuses Raman links") {
    auto raman_cfg = parse_run_config(kTinyRaman);
    RunOptions bad;
    bad.out_dir = fresh_dir("noraman_bad");
    bad.no_raman = true;
    CHECK_THROWS_AS(run_pipeline(raman_cfg, bad), ConfigError);
  }
}

TEST_CASE("pipeline: invalid configuration fails loudly with the offender") {
  auto cfg = parse_run_config(kTinyRamanFree);
  cfg.channels[1].center_hz = cfg.channels[0].center_hz + 1e9;  // overlap
  RunOptions opts;
  opts.out_dir = fresh_dir("invalid");
  try {
    run_pipeline(cfg, opts);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("channels[1]") != std::string::npos);
  }
}

TEST_CASE("pipeline: overrides land in the manifest") {
  auto cfg = parse_run_config(kTinyRamanFree);
  RunOptions opts;
  opts.out_dir = fresh_dir("overrides");
  opts.dz_m = 200.0;
  opts.fit_degree = 6;
  opts.weight_exponent = 1.0;
  auto result = run_pipeline(cfg, opts);
  const std::string manifest = slurp(result.manifest);
  CHECK(manifest.find("solver.dz_m: 200") != std::string::npos);
  CHECK(manifest.find("fit.degree: 6") != std::string::npos);
  CHECK(manifest.find("fit.weight_exponent: 1") != std::string::npos);
}
