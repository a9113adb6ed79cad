#pragma once

#include <cstddef>
#include <vector>

#include "lfengine/islands.hpp"
#include "lfengine/link.hpp"

namespace lfengine {

struct FitConfig {
  int degree = 10;                       // polynomial degree of the profile fit
  double weight_exponent = 2.0;          // exponent on vartheta in the fit weight
  double theta_series_threshold = 1e-3;  // |theta L| below which the series kernel runs
  int series_terms = 24;
  double condition_limit = 1e12;         // fit declared degenerate past this
};

/// Weighted polynomial fit of the profile kernel for one span and one island.
/// Coefficients live in the normalized coordinate u = z / L_s, so they are
/// dimensionless; `tau` are the derived alternating-factorial companions used
/// by the analytic span integral, also in the u basis.
struct PsiFit {
  std::size_t span_index = 0;
  Island island;
  int degree = 0;
  std::vector<double> coefficients;  // h_0 .. h_degree
  std::vector<double> tau;           // tau_0 .. tau_degree
  double weighted_rms_residual = 0.0;

  double evaluate(double u) const;  // fitted polynomial at u = z / L_s
};

/// The square-root profile ratio sqrt(rho(f1) rho(f2) rho(f3) / rho(f1+f2-f3))
/// at distance z along span n_s. All four frequencies must resolve to
/// channels.
double vartheta(const Link& link, std::size_t n_s, double z_m, double f1_hz,
                double f2_hz, double f3_hz);

/// vartheta with the frequency-flat part of the loss compensated:
/// vartheta * exp(z [alpha(f1)+alpha(f2)+alpha(f3)-alpha(f1+f2-f3)]).
/// Identically 1 on a Raman-free span with frequency-flat loss.
double psi(const Link& link, std::size_t n_s, double z_m, double f1_hz, double f2_hz,
           double f3_hz);

/// Weighted least-squares fit of psi on the span's profile grid at the
/// island's representative frequencies. The weight is
/// vartheta^weight_exponent / psi^2; moment integrals use the trapezoid rule
/// on the solver grid. Inside one island the per-channel profiles are
/// constant, so the coefficients do not depend on the in-band frequency
/// choice.
PsiFit fit_psi(const Link& link, std::size_t n_s, const Island& island,
               const FitConfig& cfg = {});

/// Same fit at explicit frequencies, which must lie inside the island's
/// channel bands. Produces coefficients identical to fit_psi.
PsiFit fit_psi_at(const Link& link, std::size_t n_s, const Island& island, double f1_hz,
                  double f2_hz, double f3_hz, const FitConfig& cfg = {});

}  // namespace lfengine
