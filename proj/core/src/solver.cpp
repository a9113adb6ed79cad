#include "lfengine/solver.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "lfengine/errors.hpp"

namespace lfengine {

namespace {

struct Rk4Workspace {
  Eigen::VectorXd k1, k2, k3, k4, tmp;
  explicit Rk4Workspace(Eigen::Index n) : k1(n), k2(n), k3(n), k4(n), tmp(n) {}
};

void rk4_step(const detail::RamanSystem& system, Eigen::VectorXd& y, double h,
              Rk4Workspace& ws) {
  system.rhs(y, ws.k1);
  ws.tmp = y + 0.5 * h * ws.k1;
  system.rhs(ws.tmp, ws.k2);
  ws.tmp = y + 0.5 * h * ws.k2;
  system.rhs(ws.tmp, ws.k3);
  ws.tmp = y + h * ws.k3;
  system.rhs(ws.tmp, ws.k4);
  y += (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

// Integrates from z = 0 to z = L; when `trajectory` is non-null every grid
// point is stored (rows: grid point, cols: component).
void integrate(const detail::RamanSystem& system, Eigen::VectorXd& state,
               std::size_t n_steps, double dz, Eigen::MatrixXd* trajectory) {
  Rk4Workspace ws(state.size());
  if (trajectory) trajectory->row(0) = state;
  for (std::size_t i = 0; i < n_steps; ++i) {
    rk4_step(system, state, dz, ws);
    for (Eigen::Index c = 0; c < state.size(); ++c) {
      if (!std::isfinite(state[c]) || state[c] < 0.0)
        throw StepSizeError("negative or non-finite power at z = " +
                            std::to_string((i + 1) * dz) + " m (component " +
                            std::to_string(c) + "); reduce dz");
    }
    if (trajectory) trajectory->row(static_cast<Eigen::Index>(i + 1)) = state;
  }
}

}  // namespace

PowerProfileSet solve_power_evolution(double span_length_m, const RamanGainProfile& gain,
                                      const std::vector<SpectralComponent>& components,
                                      const SolverOptions& options) {
  if (!(span_length_m > 0.0)) throw ContractError("span length must be > 0");
  if (!(options.dz_m > 0.0) || options.dz_m > span_length_m)
    throw ContractError("dz must satisfy 0 < dz <= span length");
  if (components.empty()) throw ContractError("no spectral components to propagate");

  for (std::size_t i = 0; i < components.size(); ++i) {
    const auto& c = components[i];
    if (!(c.frequency_hz > 0.0) || c.power_w < 0.0 || c.alpha_per_m < 0.0)
      throw ContractError("component " + std::to_string(i) + ": invalid frequency, power, or loss");
    if (c.kind == ComponentKind::channel && c.direction != Direction::forward)
      throw ContractError("component " + std::to_string(i) + ": channels must propagate forward");
  }

  const std::size_t n_steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(span_length_m / options.dz_m - 1e-9)));
  const double dz = span_length_m / static_cast<double>(n_steps);
  const Eigen::Index n_comp = static_cast<Eigen::Index>(components.size());

  // The state is rho for channels and absolute power for pumps. Scaling the
  // donor columns of the coupling matrix by the launch powers makes the two
  // formulations identical, keeps rho(0) = 1 exact, and stays well defined
  // for channels launched with zero power.
  detail::RamanSystem system(components, gain);
  Eigen::VectorXd scale(n_comp);
  for (Eigen::Index i = 0; i < n_comp; ++i) {
    const auto& c = components[static_cast<std::size_t>(i)];
    scale[i] = c.kind == ComponentKind::channel ? c.power_w : 1.0;
    system.coupling.col(i) *= scale[i];
  }

  std::vector<Eigen::Index> backward;
  for (Eigen::Index i = 0; i < n_comp; ++i)
    if (components[static_cast<std::size_t>(i)].direction == Direction::backward)
      backward.push_back(i);

  Eigen::VectorXd start(n_comp);
  for (Eigen::Index i = 0; i < n_comp; ++i) {
    const auto& c = components[static_cast<std::size_t>(i)];
    start[i] = c.kind == ComponentKind::channel ? 1.0 : c.power_w;
  }

  // Backward pumps: their configured power is the z = L boundary value. Seed
  // the unknown z = 0 value with the undepleted decay over the span.
  Eigen::VectorXd target(static_cast<Eigen::Index>(backward.size()));
  for (std::size_t b = 0; b < backward.size(); ++b) {
    const auto& c = components[static_cast<std::size_t>(backward[b])];
    target[static_cast<Eigen::Index>(b)] = c.power_w;
    start[backward[b]] = c.power_w * std::exp(-2.0 * c.alpha_per_m * span_length_m);
  }

  auto boundary_residual = [&](const Eigen::VectorXd& guesses) {
    Eigen::VectorXd state = start;
    for (std::size_t b = 0; b < backward.size(); ++b)
      state[backward[b]] = guesses[static_cast<Eigen::Index>(b)];
    integrate(system, state, n_steps, dz, nullptr);
    Eigen::VectorXd r(target.size());
    for (std::size_t b = 0; b < backward.size(); ++b) {
      double denom = std::max(std::abs(target[static_cast<Eigen::Index>(b)]), 1e-30);
      r[static_cast<Eigen::Index>(b)] =
          (state[backward[b]] - target[static_cast<Eigen::Index>(b)]) / denom;
    }
    return r;
  };

  if (!backward.empty()) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(backward.size()));
    for (std::size_t b = 0; b < backward.size(); ++b)
      x[static_cast<Eigen::Index>(b)] = start[backward[b]];

    Eigen::VectorXd r = boundary_residual(x);
    double rnorm = r.lpNorm<Eigen::Infinity>();
    int iter = 0;
    while (rnorm >= options.shooting_tolerance) {
      if (++iter > options.max_shooting_iterations)
        throw IterativeFailureError(
            "backward-pump shooting did not converge in " +
                std::to_string(options.max_shooting_iterations) +
                " iterations (residual " + std::to_string(rnorm) + ")",
            rnorm);

      // Finite-difference Jacobian; the system is a handful of pumps at most.
      Eigen::MatrixXd jac(x.size(), x.size());
      for (Eigen::Index col = 0; col < x.size(); ++col) {
        double h = std::max(1e-6 * std::abs(x[col]), 1e-12);
        Eigen::VectorXd xp = x;
        xp[col] += h;
        jac.col(col) = (boundary_residual(xp) - r) / h;
      }
      Eigen::VectorXd step = jac.fullPivLu().solve(-r);

      double lambda = 1.0;
      for (;;) {
        Eigen::VectorXd x_new = x + lambda * step;
        if ((x_new.array() > 0.0).all()) {
          bool ok = true;
          Eigen::VectorXd r_new;
          try {
            r_new = boundary_residual(x_new);
          } catch (const StepSizeError&) {
            ok = false;  // overshoot drove a power negative; damp harder
          }
          if (ok && (r_new.lpNorm<Eigen::Infinity>() < rnorm || lambda <= 1.0 / 1024.0)) {
            x = x_new;
            r = r_new;
            rnorm = r.lpNorm<Eigen::Infinity>();
            break;
          }
        }
        lambda *= 0.5;
        if (lambda < 1.0 / 4096.0)
          throw IterativeFailureError(
              "backward-pump shooting line search stalled (residual " +
                  std::to_string(rnorm) + ")",
              rnorm);
      }
    }
    for (std::size_t b = 0; b < backward.size(); ++b)
      start[backward[b]] = x[static_cast<Eigen::Index>(b)];
  }

  Eigen::MatrixXd trajectory(static_cast<Eigen::Index>(n_steps + 1), n_comp);
  Eigen::VectorXd state = start;
  integrate(system, state, n_steps, dz, &trajectory);

  std::vector<Eigen::Index> channel_cols;
  for (Eigen::Index i = 0; i < n_comp; ++i)
    if (components[static_cast<std::size_t>(i)].kind == ComponentKind::channel)
      channel_cols.push_back(i);

  PowerProfileSet out;
  out.dz_m = dz;
  out.z_m.resize(n_steps + 1);
  for (std::size_t i = 0; i <= n_steps; ++i) out.z_m[i] = static_cast<double>(i) * dz;
  out.z_m.back() = span_length_m;

  out.power_w.resize(trajectory.rows(), static_cast<Eigen::Index>(channel_cols.size()));
  out.rho.resize(trajectory.rows(), static_cast<Eigen::Index>(channel_cols.size()));
  for (std::size_t c = 0; c < channel_cols.size(); ++c) {
    const double launch = components[static_cast<std::size_t>(channel_cols[c])].power_w;
    out.rho.col(static_cast<Eigen::Index>(c)) = trajectory.col(channel_cols[c]);
    out.power_w.col(static_cast<Eigen::Index>(c)) = launch * trajectory.col(channel_cols[c]);
  }
  for (Eigen::Index i = 0; i < n_comp; ++i) {
    if (components[static_cast<std::size_t>(i)].kind != ComponentKind::pump) continue;
    out.pump_start_power_w.push_back(trajectory(0, i));
    out.pump_end_power_w.push_back(trajectory(trajectory.rows() - 1, i));
  }
  return out;
}

PowerProfileSet solve_power_evolution(const FiberSpan& span,
                                      const std::vector<SpectralComponent>& launch_channels,
                                      const SolverOptions& options) {
  std::vector<SpectralComponent> components = launch_channels;
  components.insert(components.end(), span.pumps.begin(), span.pumps.end());
  return solve_power_evolution(span.length_m, span.raman, components, options);
}

std::vector<SpectralComponent> launch_components(const FiberSpan& span, const WdmGrid& grid,
                                                 const std::vector<double>& power_w) {
  if (power_w.size() != grid.size())
    throw ContractError("launch power count must match the channel count");
  if (span.alpha_per_m.size() != grid.size())
    throw ContractError("span alpha count must match the channel count");
  std::vector<SpectralComponent> channels(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    channels[k].frequency_hz = grid.channel(k).center_hz;
    channels[k].power_w = power_w[k];
    channels[k].direction = Direction::forward;
    channels[k].alpha_per_m = span.alpha_per_m[k];
    channels[k].kind = ComponentKind::channel;
  }
  return channels;
}

void fill_link_profiles(Link& link, const SolverOptions& options) {
  std::vector<double> power(link.grid().size());
  for (std::size_t k = 0; k < power.size(); ++k)
    power[k] = link.grid().channel(k).launch_power_w;

  // Spans chain: the power entering span s is the launch power filtered by
  // every upstream span's end-of-span rho and amplifier gain.
  for (std::size_t s = 0; s < link.span_count(); ++s) {
    auto channels = launch_components(link.span(s), link.grid(), power);
    link.set_profiles(s, solve_power_evolution(link.span(s), channels, options));
    for (std::size_t k = 0; k < power.size(); ++k)
      power[k] *= link.rho_end(s, k) * link.amplifier(s).gain_at(k);
  }
}

}  // namespace lfengine
