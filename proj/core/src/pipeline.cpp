#include "lfengine/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include "lfengine/csv.hpp"
#include "lfengine/errors.hpp"
#include "lfengine/parallel.hpp"
#include "lfengine/solver.hpp"
#include "lfengine/version.hpp"

namespace lfengine {

namespace {

class StageClock {
public:
  explicit StageClock(std::vector<StageTiming>& sink) : sink_(sink) {}

  template <typename Fn>
  void run(const std::string& stage, Fn&& fn) {
    current_ = stage;
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    sink_.push_back({stage, std::chrono::duration<double>(t1 - t0).count()});
  }

  const std::string& current() const noexcept { return current_; }

private:
  std::vector<StageTiming>& sink_;
  std::string current_ = "startup";
};

void write_profiles_csv(const Link& link, std::size_t s, const std::filesystem::path& path) {
  const auto& prof = link.profiles(s);
  std::vector<std::string> header = {"z_m"};
  for (std::size_t k = 0; k < prof.channels(); ++k)
    header.push_back("ch_" + std::to_string(k) + "_P_W");
  for (std::size_t k = 0; k < prof.channels(); ++k)
    header.push_back("ch_" + std::to_string(k) + "_rho");
  CsvWriter csv(path, header);
  for (std::size_t i = 0; i < prof.grid_points(); ++i) {
    csv.begin_row();
    csv.add(prof.z_m[i]);
    for (std::size_t k = 0; k < prof.channels(); ++k)
      csv.add(prof.power_w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    for (std::size_t k = 0; k < prof.channels(); ++k)
      csv.add(prof.rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
    csv.end_row();
  }
}

std::string mode_string(bool flag) { return flag ? "on" : "off"; }

}  // namespace

PipelineResult run_pipeline(const RunConfig& raw_cfg, const RunOptions& options) {
  RunConfig cfg = raw_cfg;
  if (options.dz_m) cfg.solver.dz_m = *options.dz_m;
  if (options.fit_degree) cfg.fit.degree = *options.fit_degree;
  if (options.weight_exponent) cfg.fit.weight_exponent = *options.weight_exponent;

  {
    auto diagnostics = validate_config(cfg);
    if (!diagnostics.empty()) {
      std::ostringstream msg;
      msg << "configuration is invalid:";
      for (const auto& d : diagnostics) msg << "\n  " << d.where << ": " << d.message;
      throw ConfigError(msg.str());
    }
  }

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + options.out_dir.string());

  PipelineResult result;
  StageClock clock(result.timings);
  const int threads = static_cast<int>(effective_threads(options.threads));
  std::string failed_stage;
  std::string failure_message;
  std::exception_ptr failure;

  Link link = build_link(cfg);
  if (options.no_raman && !link.raman_free())
    throw ConfigError("no-raman mode requested but the link has Raman gain or pumps");

  const auto cuts = resolve_cuts(cfg);
  std::vector<std::vector<Island>> islands_per_cut(cuts.size());
  std::vector<std::vector<IslandFits>> fits_per_cut(cuts.size());
  const LkPath path = options.no_raman ? LkPath::analytic_no_raman : LkPath::polynomial;

  try {
    clock.run("solve_profiles", [&] {
      fill_link_profiles(link, cfg.solver);
      for (std::size_t s = 0; s < link.span_count(); ++s) {
        auto file = options.out_dir / ("profiles_span_" + std::to_string(s) + ".csv");
        write_profiles_csv(link, s, file);
        result.artifacts.push_back(file);
      }
    });

    clock.run("enumerate_islands", [&] {
      for (std::size_t c = 0; c < cuts.size(); ++c)
        islands_per_cut[c] = enumerate_islands(link.grid(), cuts[c]);
      auto file = options.out_dir / "islands.csv";
      CsvWriter csv(file, {"cut", "ch1", "ch2", "ch3", "f1_lo_hz", "f1_hi_hz", "f2_lo_hz",
                           "f2_hi_hz", "rep1_hz", "rep2_hz", "rep3_hz"});
      for (std::size_t c = 0; c < cuts.size(); ++c) {
        for (const auto& island : islands_per_cut[c]) {
          csv.begin_row();
          csv.add(island.cut);
          csv.add(island.ch1);
          csv.add(island.ch2);
          csv.add(island.ch3);
          csv.add(island.f1_lo_hz);
          csv.add(island.f1_hi_hz);
          csv.add(island.f2_lo_hz);
          csv.add(island.f2_hi_hz);
          csv.add(island.rep1_hz);
          csv.add(island.rep2_hz);
          csv.add(island.rep3_hz);
          csv.end_row();
        }
      }
      result.artifacts.push_back(file);
    });

    std::vector<std::vector<std::vector<double>>> oracle_dev(cuts.size());
    clock.run("fit_profiles", [&] {
      if (path != LkPath::polynomial) return;
      for (std::size_t c = 0; c < cuts.size(); ++c) {
        const auto& islands = islands_per_cut[c];
        auto& fits = fits_per_cut[c];
        fits.resize(islands.size());
        auto& dev = oracle_dev[c];
        dev.resize(islands.size());
        parallel_for(islands.size(), threads, [&](std::size_t i) {
          IslandFits per_span(link.span_count());
          std::vector<double> per_span_dev;
          for (std::size_t s = 0; s < link.span_count(); ++s) {
            per_span[s] = fit_psi(link, s, islands[i], cfg.fit);
            if (options.oracle) {
              const auto probe = island_probe_point(link.grid(), islands[i]);
              const auto theta =
                  theta_exponent(link, s, probe.f1_hz, probe.f2_hz, probe.f3_hz);
              const auto poly = span_integral_poly(per_span[s], theta,
                                                   link.span(s).length_m, cfg.fit);
              const auto direct = span_integral_oracle(link, s, probe.f1_hz,
                                                       probe.f2_hz, probe.f3_hz);
              per_span_dev.push_back(std::abs(poly - direct) / std::abs(direct));
            }
          }
          fits[i] = std::move(per_span);
          dev[i] = std::move(per_span_dev);
        });
      }

      auto file = options.out_dir / "fits.csv";
      std::vector<std::string> header = {"cut",      "ch1",      "ch2",     "ch3",
                                         "span",     "residual", "theta_re_per_m",
                                         "theta_im_per_m"};
      for (int k = 0; k <= cfg.fit.degree; ++k) header.push_back("h_" + std::to_string(k));
      for (int m = 0; m <= cfg.fit.degree; ++m) header.push_back("tau_" + std::to_string(m));
      if (options.oracle) header.push_back("oracle_rel_dev");
      CsvWriter csv(file, header);
      for (std::size_t c = 0; c < cuts.size(); ++c) {
        for (std::size_t i = 0; i < islands_per_cut[c].size(); ++i) {
          for (std::size_t s = 0; s < link.span_count(); ++s) {
            const auto& fit = fits_per_cut[c][i][s];
            const auto theta = theta_exponent_for_island(link, s, fit.island);
            csv.begin_row();
            csv.add(fit.island.cut);
            csv.add(fit.island.ch1);
            csv.add(fit.island.ch2);
            csv.add(fit.island.ch3);
            csv.add(s);
            csv.add(fit.weighted_rms_residual);
            csv.add(theta.real());
            csv.add(theta.imag());
            for (double h : fit.coefficients) csv.add(h);
            for (double t : fit.tau) csv.add(t);
            if (options.oracle) csv.add(oracle_dev[c][i][s]);
            csv.end_row();
          }
        }
      }
      result.artifacts.push_back(file);
    });

    clock.run("gn_integration", [&] {
      auto nli_file = options.out_dir / "nli.csv";
      CsvWriter nli_csv(nli_file,
                        {"channel", "center_hz", "nli_power_w", "nli_psd_center_w_per_hz",
                         "islands", "quad_points", "max_quad_error_w_per_hz"});
      auto breakdown_file = options.out_dir / "island_contributions.csv";
      CsvWriter breakdown_csv(breakdown_file,
                              {"cut", "ch1", "ch2", "ch3", "psd_w_per_hz", "points",
                               "gl_order", "error_estimate_w_per_hz"});

      for (std::size_t c = 0; c < cuts.size(); ++c) {
        const std::size_t cut = cuts[c];
        const auto& islands = islands_per_cut[c];
        const auto& fits = fits_per_cut[c];
        const auto& channel = link.grid().channel(cut);

        ChannelNli entry;
        entry.channel = cut;
        entry.center_hz = channel.center_hz;
        entry.contributions =
            gn_island_contributions(link, channel.center_hz, islands, fits, cfg.fit,
                                    cfg.quadrature, path, threads);
        for (const auto& contribution : entry.contributions)
          entry.psd_center_w_per_hz += contribution.psd_w_per_hz;
        entry.nli_power_w =
            cfg.power_integration_points <= 1
                ? entry.psd_center_w_per_hz * channel.symbol_rate_baud
                : gn_nli_power(link, cut, islands, fits, cfg.fit, cfg.quadrature, path,
                               cfg.power_integration_points, threads);

        nli_csv.begin_row();
        nli_csv.add(entry.channel);
        nli_csv.add(entry.center_hz);
        nli_csv.add(entry.nli_power_w);
        nli_csv.add(entry.psd_center_w_per_hz);
        nli_csv.add(entry.contributions.size());
        nli_csv.add(entry.total_points());
        nli_csv.add(entry.max_error_estimate());
        nli_csv.end_row();

        for (const auto& contribution : entry.contributions) {
          breakdown_csv.begin_row();
          breakdown_csv.add(contribution.island.cut);
          breakdown_csv.add(contribution.island.ch1);
          breakdown_csv.add(contribution.island.ch2);
          breakdown_csv.add(contribution.island.ch3);
          breakdown_csv.add(contribution.psd_w_per_hz);
          breakdown_csv.add(contribution.points);
          breakdown_csv.add(static_cast<std::size_t>(contribution.order));
          breakdown_csv.add(contribution.error_estimate);
          breakdown_csv.end_row();
        }

        result.report.channels.push_back(std::move(entry));
      }
      result.artifacts.push_back(nli_file);
      result.artifacts.push_back(breakdown_file);
    });

    clock.run("summary", [&] {
      auto file = options.out_dir / "summary.txt";
      std::ofstream out(file);
      if (!out) throw IoError("cannot write " + file.string());
      out << "per-channel nonlinear interference\n";
      for (const auto& ch : result.report.channels) {
        const double dbm = ch.nli_power_w > 0.0
                               ? 10.0 * std::log10(ch.nli_power_w / 1e-3)
                               : -std::numeric_limits<double>::infinity();
        out << "  channel " << ch.channel << " @ " << format_double(ch.center_hz)
            << " Hz: NLI " << format_double(ch.nli_power_w) << " W (" << format_double(dbm)
            << " dBm), PSD " << format_double(ch.psd_center_w_per_hz) << " W/Hz over "
            << ch.contributions.size() << " islands\n";
      }
      result.artifacts.push_back(file);
    });
  } catch (const Error& e) {
    failed_stage = clock.current();
    failure_message = e.category() + ": " + e.what();
    failure = std::current_exception();
  } catch (const std::exception& e) {
    failed_stage = clock.current();
    failure_message = e.what();
    failure = std::current_exception();
  }

  // The manifest is written for both complete and partial runs; partial runs
  // record the failing stage and rethrow below.
  result.manifest = options.out_dir / "manifest.txt";
  {
    std::ofstream out(result.manifest);
    if (!out) throw IoError("cannot write " + result.manifest.string());
    out << "lf-engine run manifest\n";
    out << "version: " << kVersion << "\n";
    out << "status: "
        << (failure_message.empty() ? "complete"
                                    : "failed at " + failed_stage + " (" + failure_message + ")")
        << "\n";
    out << "mode.oracle: " << mode_string(options.oracle) << "\n";
    out << "mode.no_raman: " << mode_string(options.no_raman) << "\n";
    out << "threads: " << threads << "\n";
    out << "solver.dz_m: " << format_double(cfg.solver.dz_m) << "\n";
    out << "solver.shooting_tolerance: " << format_double(cfg.solver.shooting_tolerance)
        << "\n";
    out << "solver.max_shooting_iterations: " << cfg.solver.max_shooting_iterations << "\n";
    out << "fit.degree: " << cfg.fit.degree << "\n";
    out << "fit.weight_exponent: " << format_double(cfg.fit.weight_exponent) << "\n";
    out << "fit.theta_series_threshold: " << format_double(cfg.fit.theta_series_threshold)
        << "\n";
    out << "fit.series_terms: " << cfg.fit.series_terms << "\n";
    out << "fit.condition_limit: " << format_double(cfg.fit.condition_limit) << "\n";
    out << "quadrature.rel_tol: " << format_double(cfg.quadrature.rel_tol) << "\n";
    out << "quadrature.base_order: " << cfg.quadrature.base_order << "\n";
    out << "quadrature.max_refinements: " << cfg.quadrature.max_refinements << "\n";
    out << "power_integration_points: " << cfg.power_integration_points << "\n";
    out << "cut:";
    for (std::size_t cut : cuts) out << ' ' << cut;
    out << "\n";
    out << "spans: " << cfg.spans.size() << ", channels: " << cfg.channels.size() << "\n";
    for (std::size_t s = 0; s < link.span_count(); ++s) {
      out << "span_" << s << ".effective_dz_m: ";
      out << (link.has_profiles(s) ? format_double(link.profiles(s).dz_m) : "unsolved")
          << "\n";
    }
    out << "artifacts:";
    for (const auto& a : result.artifacts) out << ' ' << a.filename().string();
    out << "\n";
    out << "timings_s:";
    for (const auto& t : result.timings)
      out << ' ' << t.stage << '=' << format_double(t.seconds);
    out << "\n";
  }

  if (failure) std::rethrow_exception(failure);
  return result;
}

}  // namespace lfengine
