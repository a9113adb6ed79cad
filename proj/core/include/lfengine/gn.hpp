#pragma once

#include <cstddef>
#include <vector>

#include "lfengine/islands.hpp"
#include "lfengine/link.hpp"
#include "lfengine/link_function.hpp"
#include "lfengine/psi_fit.hpp"

namespace lfengine {

struct QuadratureConfig {
  double rel_tol = 1e-3;    // relative change between refinements
  int base_order = 12;      // Gauss-Legendre order of the first pass
  int max_refinements = 8;  // order grows by 3/2 each refinement
};

/// Which link-function evaluation backs the GN integrand.
enum class LkPath {
  polynomial,       // fitted-profile span integrals (the general path)
  analytic_no_raman // closed form, valid on Raman-free links only
};

struct IslandContribution {
  Island island;
  double psd_w_per_hz = 0.0;   // contribution to G_NLI at the evaluation frequency
  std::size_t points = 0;      // integrand evaluations spent
  double error_estimate = 0.0; // last refinement change
  int order = 0;               // final Gauss-Legendre order
};

struct ChannelNli {
  std::size_t channel = 0;
  double center_hz = 0.0;
  double nli_power_w = 0.0;
  double psd_center_w_per_hz = 0.0;
  std::vector<IslandContribution> contributions;  // at the channel center

  std::size_t total_points() const;
  double max_error_estimate() const;
};

struct NliReport {
  std::vector<ChannelNli> channels;
};

/// Fits for one island, one entry per span in span order.
using IslandFits = std::vector<PsiFit>;

/// GN contribution of a single island to the NLI PSD at frequency f: the
/// spectral factor G(f1) G(f2) G(f1+f2-f) is constant over the island, the
/// |LK|^2 factor is integrated by tensor Gauss-Legendre over the exact
/// region, refined until the relative change drops below quad.rel_tol.
IslandContribution island_nli_contribution(const Link& link, const Island& island,
                                           double f_hz, const IslandFits& fits,
                                           const FitConfig& fit_cfg,
                                           const QuadratureConfig& quad,
                                           LkPath path = LkPath::polynomial);

/// NLI power spectral density at f (inside the CUT band): the island sum of
/// (16/27) G G G |LK|^2 double integrals. `fits_per_island` is aligned with
/// `islands`; it is ignored on the analytic path.
double gn_nli_psd(const Link& link, double f_hz, const std::vector<Island>& islands,
                  const std::vector<IslandFits>& fits_per_island,
                  const FitConfig& fit_cfg = {}, const QuadratureConfig& quad = {},
                  LkPath path = LkPath::polynomial, int threads = 1);

/// Per-island breakdown behind gn_nli_psd, in island order.
std::vector<IslandContribution> gn_island_contributions(
    const Link& link, double f_hz, const std::vector<Island>& islands,
    const std::vector<IslandFits>& fits_per_island, const FitConfig& fit_cfg = {},
    const QuadratureConfig& quad = {}, LkPath path = LkPath::polynomial,
    int threads = 1);

/// NLI power in the CUT band. With band_points == 1 this is the
/// locally-white estimate PSD(center) x symbol rate; larger values integrate
/// the PSD across the band with a trapezoid rule.
double gn_nli_power(const Link& link, std::size_t cut_index,
                    const std::vector<Island>& islands,
                    const std::vector<IslandFits>& fits_per_island,
                    const FitConfig& fit_cfg = {}, const QuadratureConfig& quad = {},
                    LkPath path = LkPath::polynomial, int band_points = 1,
                    int threads = 1);

}  // namespace lfengine
