#pragma once

#include <vector>

#include "lfengine/link.hpp"
#include "lfengine/raman.hpp"

namespace lfengine {

struct SolverOptions {
  double dz_m = 10.0;
  double shooting_tolerance = 1e-8;  // max relative boundary residual at z = L
  int max_shooting_iterations = 50;
};

/// Fixed-step 4th-order Runge-Kutta integration of the coupled Raman power
/// equations over one span. Backward pumps specify their power at z = L; the
/// unknown z = 0 values are found by damped-Newton shooting on the z = L
/// boundary residual. The returned profiles contain channels only.
PowerProfileSet solve_power_evolution(double span_length_m, const RamanGainProfile& gain,
                                      const std::vector<SpectralComponent>& components,
                                      const SolverOptions& options = {});

/// Span-level convenience: channels are built from the grid launch powers and
/// the span's per-channel loss, pumps come from the span itself.
PowerProfileSet solve_power_evolution(const FiberSpan& span,
                                      const std::vector<SpectralComponent>& launch_channels,
                                      const SolverOptions& options = {});

/// Channel components entering a span, given the power launched into it.
std::vector<SpectralComponent> launch_components(const FiberSpan& span,
                                                 const WdmGrid& grid,
                                                 const std::vector<double>& power_w);

/// Solves every span of the link in order, chaining launch powers through
/// end-of-span rho and amplifier gains, and stores the profiles on the link.
void fill_link_profiles(Link& link, const SolverOptions& options = {});

}  // namespace lfengine
