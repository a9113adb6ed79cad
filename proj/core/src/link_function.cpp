#include "lfengine/link_function.hpp"

#include <cmath>
#include <string>

#include "lfengine/errors.hpp"

namespace lfengine {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kFourPiSq = 4.0 * kPi * kPi;

double phase_match_rate(const FiberSpan& span, double f1, double f2, double f3) {
  return kFourPiSq * (f1 - f3) * (f2 - f3) *
         (span.beta2_s2_per_m +
          kPi * span.beta3_s3_per_m * (f1 + f2 - 2.0 * span.taylor_center_hz));
}

}  // namespace

std::complex<double> theta_exponent(const Link& link, std::size_t n_s, double f1_hz,
                                    double f2_hz, double f3_hz) {
  const auto& grid = link.grid();
  const double re = -link.alpha(n_s, grid.channel_index_of(f1_hz)) -
                    link.alpha(n_s, grid.channel_index_of(f2_hz)) -
                    link.alpha(n_s, grid.channel_index_of(f3_hz)) +
                    link.alpha(n_s, grid.channel_index_of(f1_hz + f2_hz - f3_hz));
  return {re, phase_match_rate(link.span(n_s), f1_hz, f2_hz, f3_hz)};
}

std::complex<double> theta_exponent_for_island(const Link& link, std::size_t n_s,
                                               const Island& island) {
  const double re = -link.alpha(n_s, island.ch1) - link.alpha(n_s, island.ch2) -
                    link.alpha(n_s, island.ch3) + link.alpha(n_s, island.cut);
  return {re, phase_match_rate(link.span(n_s), island.rep1_hz, island.rep2_hz,
                               island.rep3_hz)};
}

namespace detail {

std::complex<double> monomial_kernel_series(int k, std::complex<double> s, int terms) {
  // integral u^k e^{su} du = sum_n s^n / (n! (k+n+1))
  std::complex<double> term(1.0 / (k + 1.0), 0.0);
  std::complex<double> sum = term;
  for (int n = 1; n < terms; ++n) {
    term *= s * (static_cast<double>(k + n) / (static_cast<double>(n) * (k + n + 1.0)));
    sum += term;
  }
  return sum;
}

std::complex<double> monomial_kernel_closed(int k, std::complex<double> s) {
  const double abs_s = std::abs(s);
  if (abs_s < static_cast<double>(k) + 10.0) {
    // Remainder-series arrangement of the closed form,
    //   k! e^{s} sum_m (-s)^m / (m+k+1)!,
    // which is free of the subtractive cancellation the textbook form
    // suffers when |s| is comparable to k.
    std::complex<double> term(1.0, 0.0);
    for (int j = 1; j <= k + 1; ++j) term /= static_cast<double>(j);  // 1/(k+1)!
    double kfact = 1.0;
    for (int j = 2; j <= k; ++j) kfact *= j;
    std::complex<double> sum = term;
    for (int m = 1; m < 400; ++m) {
      term *= -s / static_cast<double>(m + k + 1);
      sum += term;
      if (std::abs(term) < 1e-20 * std::abs(sum)) break;
    }
    return kfact * std::exp(s) * sum;
  }

  // Direct closed form (k!/s^{k+1}) (-1)^k (e^s sum_{n<=k} (-s)^n/n! - 1),
  // assembled from terms a_n = (-1)^{k+n} k! / (n! s^{k+1-n}) so nothing
  // overflows: a_k = 1/s and |a_n| only shrinks going down.
  std::complex<double> a = 1.0 / s;
  std::complex<double> a_sum = a;
  for (int n = k; n > 0; --n) {
    a *= -static_cast<double>(n) / s;
    a_sum += a;
  }
  return std::exp(s) * a_sum - a;  // a now holds a_0 = (-1)^k k!/s^{k+1}
}

}  // namespace detail

std::complex<double> monomial_exp_integral(int k, std::complex<double> theta_per_m,
                                           double length_m, double series_threshold,
                                           int series_terms) {
  if (k < 0 || k > 60) throw ContractError("monomial exponent k must be in [0, 60]");
  if (!(length_m > 0.0)) throw ContractError("integration length must be > 0");
  const std::complex<double> s = theta_per_m * length_m;
  const std::complex<double> kernel =
      std::abs(s) < series_threshold ? detail::monomial_kernel_series(k, s, series_terms)
                                     : detail::monomial_kernel_closed(k, s);
  return std::pow(length_m, k + 1) * kernel;
}

std::complex<double> span_integral_poly(const PsiFit& fit, std::complex<double> theta_per_m,
                                        double length_m, const FitConfig& cfg) {
  const std::complex<double> s = theta_per_m * length_m;
  const bool series = std::abs(s) < cfg.theta_series_threshold;
  std::complex<double> acc(0.0, 0.0);
  for (int k = 0; k <= fit.degree; ++k) {
    const std::complex<double> kernel =
        series ? detail::monomial_kernel_series(k, s, cfg.series_terms)
               : detail::monomial_kernel_closed(k, s);
    acc += fit.coefficients[static_cast<std::size_t>(k)] * kernel;
  }
  return length_m * acc;
}

std::complex<double> span_integral_oracle(const Link& link, std::size_t n_s, double f1_hz,
                                          double f2_hz, double f3_hz,
                                          const OracleOptions& options) {
  const auto& grid = link.grid();
  const auto& prof = link.profiles(n_s);
  const std::size_t c1 = grid.channel_index_of(f1_hz);
  const std::size_t c2 = grid.channel_index_of(f2_hz);
  const std::size_t c3 = grid.channel_index_of(f3_hz);
  const std::size_t c4 = grid.channel_index_of(f1_hz + f2_hz - f3_hz);
  const double length = prof.length_m();
  const double delta = phase_match_rate(link.span(n_s), f1_hz, f2_hz, f3_hz);

  auto integrand = [&](double z) {
    const double vth = std::sqrt(prof.rho_at(c1, z) * prof.rho_at(c2, z) *
                                 prof.rho_at(c3, z) / prof.rho_at(c4, z));
    return vth * std::exp(std::complex<double>(0.0, delta * z));
  };

  auto trapezoid = [&](std::size_t n) {
    const double h = length / static_cast<double>(n);
    std::complex<long double> acc = 0.5L * std::complex<long double>(integrand(0.0)) +
                                    0.5L * std::complex<long double>(integrand(length));
    for (std::size_t i = 1; i < n; ++i)
      acc += std::complex<long double>(integrand(static_cast<double>(i) * h));
    acc *= h;
    return std::complex<double>(static_cast<double>(acc.real()),
                                static_cast<double>(acc.imag()));
  };

  std::size_t n = std::max<std::size_t>(prof.grid_points() - 1, 64);
  const double phase_per_cell = std::abs(delta) * length;
  while (static_cast<double>(n) * options.max_phase_step_rad < phase_per_cell) n *= 2;
  if (n > options.max_points)
    throw OracleResolutionError("oracle needs more than " +
                                std::to_string(options.max_points) + " points");

  std::complex<double> prev = trapezoid(n);
  for (;;) {
    n *= 2;
    if (n > options.max_points)
      throw OracleResolutionError(
          "oracle refinement exceeded " + std::to_string(options.max_points) +
          " points without reaching " + std::to_string(options.rel_tol) + " agreement");
    const std::complex<double> cur = trapezoid(n);
    if (std::abs(cur - prev) <= options.rel_tol * std::abs(cur)) return cur;
    prev = cur;
  }
}

std::complex<double> link_function(const Link& link, double f1_hz, double f2_hz,
                                   double f3_hz, std::span<const PsiFit> fits_per_span,
                                   const FitConfig& cfg) {
  const std::size_t n_spans = link.span_count();
  if (fits_per_span.size() != n_spans)
    throw ContractError("link_function needs one profile fit per span");
  for (std::size_t s = 0; s < n_spans; ++s) {
    if (fits_per_span[s].span_index != s)
      throw ContractError("profile fit " + std::to_string(s) + " belongs to span " +
                          std::to_string(fits_per_span[s].span_index));
    if (!fits_per_span[s].island.same_triple(fits_per_span[0].island))
      throw ContractError("profile fits mix different islands");
  }

  const auto& grid = link.grid();
  const Island& island = fits_per_span[0].island;
  const double f4 = f1_hz + f2_hz - f3_hz;
  const std::size_t c1 = grid.channel_index_of(f1_hz, island.ch1);
  const std::size_t c2 = grid.channel_index_of(f2_hz, island.ch2);
  const std::size_t c3 = grid.channel_index_of(f3_hz, island.ch3);
  const std::size_t c4 = grid.channel_index_of(f4, island.cut);
  if (c1 != island.ch1 || c2 != island.ch2 || c3 != island.ch3 || c4 != island.cut)
    throw ContractError("(f1, f2, f3) does not belong to the island the fits were made for");

  // Downstream gain/loss chain at f1+f2-f3, accumulated from the back.
  std::vector<double> suffix(n_spans + 1, 1.0);
  for (std::size_t p = n_spans; p-- > 0;)
    suffix[p] = suffix[p + 1] * std::sqrt(link.amplifier(p).gain_at(c4) * link.rho_end(p, c4));

  std::complex<double> lk(0.0, 0.0);
  double prefix_gain = 1.0;   // upstream chain at f1, f2, f3
  double amp_phase = 0.0;     // accumulated amplifier phase
  double disp_accum = 0.0;    // accumulated dispersion, scaled below
  for (std::size_t s = 0; s < n_spans; ++s) {
    const FiberSpan& span = link.span(s);
    const std::complex<double> theta(
        -link.alpha(s, c1) - link.alpha(s, c2) - link.alpha(s, c3) + link.alpha(s, c4),
        phase_match_rate(span, f1_hz, f2_hz, f3_hz));
    const std::complex<double> integral =
        span_integral_poly(fits_per_span[s], theta, span.length_m, cfg);

    const std::complex<double> phases =
        std::exp(std::complex<double>(0.0, amp_phase + kFourPiSq * (f1_hz - f3_hz) *
                                                           (f2_hz - f3_hz) * disp_accum));
    lk += span.gamma_per_w_m * prefix_gain * suffix[s] * phases * integral;

    const auto& amp = link.amplifier(s);
    prefix_gain *= std::sqrt(amp.gain_at(c1) * amp.gain_at(c2) * amp.gain_at(c3) *
                             link.rho_end(s, c1) * link.rho_end(s, c2) * link.rho_end(s, c3));
    amp_phase += amp.phase_at(c1) + amp.phase_at(c2) - amp.phase_at(c3) - amp.phase_at(c4);
    disp_accum += amp.dcu_s2 +
                  span.length_m * (span.beta2_s2_per_m +
                                   kPi * span.beta3_s3_per_m *
                                       (f1_hz + f2_hz - 2.0 * span.taylor_center_hz));
  }
  return lk;
}

std::complex<double> link_function_no_raman(const Link& link, double f1_hz, double f2_hz,
                                            double f3_hz) {
  if (!link.raman_free())
    throw ContractError("closed-form link function requires a Raman-free link");

  const auto& grid = link.grid();
  const double f4 = f1_hz + f2_hz - f3_hz;
  const std::size_t c1 = grid.channel_index_of(f1_hz);
  const std::size_t c2 = grid.channel_index_of(f2_hz);
  const std::size_t c3 = grid.channel_index_of(f3_hz);
  const std::size_t c4 = grid.channel_index_of(f4);
  const std::size_t n_spans = link.span_count();

  std::vector<double> suffix(n_spans + 1, 1.0);
  for (std::size_t p = n_spans; p-- > 0;)
    suffix[p] = suffix[p + 1] * std::sqrt(link.amplifier(p).gain_at(c4) *
                                          std::exp(-2.0 * link.alpha(p, c4) *
                                                   link.span(p).length_m));

  std::complex<double> lk(0.0, 0.0);
  double prefix_gain = 1.0;
  double amp_phase = 0.0;
  double disp_accum = 0.0;
  for (std::size_t s = 0; s < n_spans; ++s) {
    const FiberSpan& span = link.span(s);
    const double loss_sum = link.alpha(s, c1) + link.alpha(s, c2) + link.alpha(s, c3) -
                            link.alpha(s, c4);
    const std::complex<double> denom(loss_sum, -phase_match_rate(span, f1_hz, f2_hz, f3_hz));

    // (1 - e^{-L denom}) / denom, guarded near denom = 0.
    const std::complex<double> x = denom * span.length_m;
    std::complex<double> integral;
    if (std::abs(x) < 1e-6) {
      integral = span.length_m *
                 (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
    } else {
      integral = (1.0 - std::exp(-x)) / denom;
    }

    const std::complex<double> phases =
        std::exp(std::complex<double>(0.0, amp_phase + kFourPiSq * (f1_hz - f3_hz) *
                                                           (f2_hz - f3_hz) * disp_accum));
    lk += span.gamma_per_w_m * prefix_gain * suffix[s] * phases * integral;

    const auto& amp = link.amplifier(s);
    prefix_gain *= std::sqrt(amp.gain_at(c1) * amp.gain_at(c2) * amp.gain_at(c3) *
                             std::exp(-2.0 * span.length_m *
                                      (link.alpha(s, c1) + link.alpha(s, c2) +
                                       link.alpha(s, c3))));
    amp_phase += amp.phase_at(c1) + amp.phase_at(c2) - amp.phase_at(c3) - amp.phase_at(c4);
    disp_accum += amp.dcu_s2 +
                  span.length_m * (span.beta2_s2_per_m +
                                   kPi * span.beta3_s3_per_m *
                                       (f1_hz + f2_hz - 2.0 * span.taylor_center_hz));
  }
  return lk;
}

}  // namespace lfengine
