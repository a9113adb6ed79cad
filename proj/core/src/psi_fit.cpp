#include "lfengine/psi_fit.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "lfengine/errors.hpp"

namespace lfengine {

double PsiFit::evaluate(double u) const {
  double acc = 0.0;
  for (std::size_t k = coefficients.size(); k-- > 0;) acc = coefficients[k] + u * acc;
  return acc;
}

double vartheta(const Link& link, std::size_t n_s, double z_m, double f1_hz,
                double f2_hz, double f3_hz) {
  const auto& grid = link.grid();
  const auto& prof = link.profiles(n_s);
  const std::size_t c1 = grid.channel_index_of(f1_hz);
  const std::size_t c2 = grid.channel_index_of(f2_hz);
  const std::size_t c3 = grid.channel_index_of(f3_hz);
  const std::size_t c4 = grid.channel_index_of(f1_hz + f2_hz - f3_hz);
  return std::sqrt(prof.rho_at(c1, z_m) * prof.rho_at(c2, z_m) * prof.rho_at(c3, z_m) /
                   prof.rho_at(c4, z_m));
}

double psi(const Link& link, std::size_t n_s, double z_m, double f1_hz, double f2_hz,
           double f3_hz) {
  const auto& grid = link.grid();
  const double alpha_sum =
      link.alpha(n_s, grid.channel_index_of(f1_hz)) +
      link.alpha(n_s, grid.channel_index_of(f2_hz)) +
      link.alpha(n_s, grid.channel_index_of(f3_hz)) -
      link.alpha(n_s, grid.channel_index_of(f1_hz + f2_hz - f3_hz));
  return vartheta(link, n_s, z_m, f1_hz, f2_hz, f3_hz) * std::exp(z_m * alpha_sum);
}

namespace {

PsiFit fit_channels(const Link& link, std::size_t n_s, const Island& island,
                    const FitConfig& cfg) {
  if (cfg.degree < 0 || cfg.degree > 60)
    throw ContractError("fit degree must be in [0, 60]");
  if (cfg.weight_exponent < 0.0)
    throw ContractError("fit weight exponent must be >= 0");
  const auto& prof = link.profiles(n_s);
  const std::size_t n = prof.grid_points();
  const int d = cfg.degree;
  if (static_cast<std::size_t>(d) + 1 > n)
    throw ContractError("fit degree exceeds the number of profile grid points");

  const double length = prof.length_m();
  // The mixing product f1 + f2 - f3 lands inside the channel under test for
  // every point of the island, so its profile and loss are the CUT channel's.
  const double alpha_sum = link.alpha(n_s, island.ch1) + link.alpha(n_s, island.ch2) +
                           link.alpha(n_s, island.ch3) - link.alpha(n_s, island.cut);

  // Weighted least squares in u = z/L via column-pivoted QR of the design
  // matrix: the same normal equations as the trapezoid moment matrix, at the
  // square root of its condition number. Extended precision throughout keeps
  // the monomial-basis amplification of sample rounding noise below the
  // coefficient scale of interest.
  using Ld = long double;
  using MatrixXld = Eigen::Matrix<Ld, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorXld = Eigen::Matrix<Ld, Eigen::Dynamic, 1>;

  MatrixXld design(n, d + 1);
  VectorXld y(n);
  Ld weight_sum = 0.0L;
  const Ld du = 1.0L / static_cast<Ld>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const Ld z = prof.z_m[i];
    const Ld u = z / static_cast<Ld>(length);
    const Ld vth = std::sqrt(static_cast<Ld>(prof.rho(i, island.ch1)) *
                             static_cast<Ld>(prof.rho(i, island.ch2)) *
                             static_cast<Ld>(prof.rho(i, island.ch3)) /
                             static_cast<Ld>(prof.rho(i, island.cut)));
    const Ld ps = vth * std::exp(z * static_cast<Ld>(alpha_sum));
    const Ld w = std::pow(vth, static_cast<Ld>(cfg.weight_exponent)) / (ps * ps);
    const Ld trap = (i == 0 || i == n - 1) ? 0.5L * du : du;
    const Ld sw = std::sqrt(trap * w);
    weight_sum += trap * w;

    Ld p = sw;
    for (int k = 0; k <= d; ++k) {
      design(static_cast<Eigen::Index>(i), k) = p;
      p *= u;
    }
    y[static_cast<Eigen::Index>(i)] = sw * ps;
  }

  Eigen::ColPivHouseholderQR<MatrixXld> qr(design);
  const VectorXld r_diag = qr.matrixR().diagonal().head(d + 1).cwiseAbs();
  const double r_max = static_cast<double>(r_diag.maxCoeff());
  const double r_min = static_cast<double>(r_diag.minCoeff());
  if (!(r_min > 0.0) || r_max / r_min > cfg.condition_limit)
    throw FitDegeneracyError(
        "profile fit is numerically degenerate on span " + std::to_string(n_s) +
        " (condition estimate " +
        std::to_string(r_min > 0.0 ? r_max / r_min : std::numeric_limits<double>::infinity()) +
        "); lower the fit degree");
  const VectorXld h = qr.solve(y);

  PsiFit fit;
  fit.span_index = n_s;
  fit.island = island;
  fit.degree = d;
  fit.coefficients.resize(static_cast<std::size_t>(d) + 1);
  for (int k = 0; k <= d; ++k)
    fit.coefficients[static_cast<std::size_t>(k)] = static_cast<double>(h[k]);

  const VectorXld resid = design * h - y;
  fit.weighted_rms_residual =
      static_cast<double>(std::sqrt(resid.squaredNorm() / weight_sum));

  // tau_m = sum_{k>=m} (-1)^m h_k k! / (k-m)! in the u basis.
  fit.tau.assign(static_cast<std::size_t>(d) + 1, 0.0);
  for (int m = 0; m <= d; ++m) {
    double falling = 1.0;  // k!/(k-m)! built incrementally from k = m
    for (int j = 1; j <= m; ++j) falling *= j;
    double acc = 0.0;
    for (int k = m; k <= d; ++k) {
      acc += fit.coefficients[static_cast<std::size_t>(k)] * falling;
      falling *= static_cast<double>(k + 1) / static_cast<double>(k + 1 - m);
    }
    fit.tau[static_cast<std::size_t>(m)] = (m % 2 == 0 ? 1.0 : -1.0) * acc;
  }
  return fit;
}

}  // namespace

PsiFit fit_psi(const Link& link, std::size_t n_s, const Island& island,
               const FitConfig& cfg) {
  return fit_channels(link, n_s, island, cfg);
}

PsiFit fit_psi_at(const Link& link, std::size_t n_s, const Island& island, double f1_hz,
                  double f2_hz, double f3_hz, const FitConfig& cfg) {
  const auto& grid = link.grid();
  if (grid.channel_index_of(f1_hz, island.ch1) != island.ch1 ||
      grid.channel_index_of(f2_hz, island.ch2) != island.ch2 ||
      grid.channel_index_of(f3_hz, island.ch3) != island.ch3)
    throw ContractError("fit frequencies must lie inside the island's channel bands");
  return fit_channels(link, n_s, island, cfg);
}

}  // namespace lfengine
