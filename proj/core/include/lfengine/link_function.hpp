#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "lfengine/islands.hpp"
#include "lfengine/link.hpp"
#include "lfengine/psi_fit.hpp"

namespace lfengine {

/// The z-independent complex rate combining the loss imbalance and the
/// dispersion phase matching of a frequency triple on span n_s:
///   -alpha(f1) - alpha(f2) - alpha(f3) + alpha(f1+f2-f3)
///   + j 4 pi^2 (f1-f3)(f2-f3) [beta2 + pi beta3 (f1+f2-2 f_c)].
/// Distinct from the amplifier phase; when the triple belongs to an island,
/// the fourth loss term resolves to the channel under test.
std::complex<double> theta_exponent(const Link& link, std::size_t n_s, double f1_hz,
                                    double f2_hz, double f3_hz);

/// theta_exponent at an island's representative frequencies, with the fourth
/// loss term taken from the island's channel under test.
std::complex<double> theta_exponent_for_island(const Link& link, std::size_t n_s,
                                               const Island& island);

/// Integral of z^k exp(z theta) over [0, L]. Below |theta L| =
/// series_threshold a truncated Taylor series in theta is used; above it the
/// closed form, arranged so the two branches agree to better than 1e-12 at
/// the switch and no cancellation occurs near the theta = 0 wall.
std::complex<double> monomial_exp_integral(int k, std::complex<double> theta_per_m,
                                           double length_m, double series_threshold = 1e-3,
                                           int series_terms = 24);

namespace detail {
// Normalized kernels over u in [0, 1] with s = theta * L:
// integral of u^k exp(s u) du.
std::complex<double> monomial_kernel_series(int k, std::complex<double> s, int terms);
std::complex<double> monomial_kernel_closed(int k, std::complex<double> s);
}  // namespace detail

/// Analytic span integral from the fitted polynomial: the coefficients of the
/// u-basis fit contracted against the monomial kernels at s = theta L, scaled
/// back to meters.
std::complex<double> span_integral_poly(const PsiFit& fit, std::complex<double> theta_per_m,
                                        double length_m, const FitConfig& cfg = {});

struct OracleOptions {
  double max_phase_step_rad = 0.05;  // |Im theta| dz bound per trapezoid cell
  double rel_tol = 1e-8;             // agreement between successive refinements
  std::size_t max_points = std::size_t{1} << 24;
};

/// Direct trapezoid quadrature of the span integral from the sampled
/// profiles. Validation only: this is the z-resolution-sensitive computation
/// the polynomial path avoids.
std::complex<double> span_integral_oracle(const Link& link, std::size_t n_s, double f1_hz,
                                          double f2_hz, double f3_hz,
                                          const OracleOptions& options = {});

/// The link function: the per-span sum of nonlinearity times amplifier-phase,
/// gain/loss-chain, accumulated-dispersion, and span-integral factors. The
/// global phase prefactor in f1+f2-f3 (common to every span) is dropped; it
/// cancels from every |LK|^2 consumer. `fits_per_span` holds one fit per
/// span, all for the island containing (f1, f2, f3).
std::complex<double> link_function(const Link& link, double f1_hz, double f2_hz,
                                   double f3_hz, std::span<const PsiFit> fits_per_span,
                                   const FitConfig& cfg = {});

/// Closed-form link function for Raman-free links (pure exponential decay in
/// every span). Same dropped-prefactor convention as link_function; serves as
/// the independent analytic cross-check path.
std::complex<double> link_function_no_raman(const Link& link, double f1_hz, double f2_hz,
                                            double f3_hz);

}  // namespace lfengine
