#include "lfengine/raman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfengine/errors.hpp"

namespace lfengine {

RamanGainProfile::RamanGainProfile(std::vector<double> offsets_hz,
                                   std::vector<double> gain_per_w_m)
    : offsets_hz_(std::move(offsets_hz)), gain_per_w_m_(std::move(gain_per_w_m)) {
  if (offsets_hz_.size() != gain_per_w_m_.size())
    throw ContractError("Raman gain table: offsets and gains differ in length");
  double prev = 0.0;
  for (std::size_t i = 0; i < offsets_hz_.size(); ++i) {
    if (!(offsets_hz_[i] > prev))
      throw ContractError("Raman gain table: offsets must be strictly increasing and positive");
    if (!std::isfinite(gain_per_w_m_[i]) || gain_per_w_m_[i] < 0.0)
      throw ContractError("Raman gain table: gains must be finite and >= 0");
    prev = offsets_hz_[i];
  }
}

double RamanGainProfile::gain_at(double offset_hz) const {
  if (offset_hz == 0.0 || offsets_hz_.empty()) return 0.0;
  const double u = std::abs(offset_hz);
  const double sign = offset_hz > 0.0 ? 1.0 : -1.0;
  if (u >= offsets_hz_.back()) return sign * gain_per_w_m_.back();
  auto it = std::upper_bound(offsets_hz_.begin(), offsets_hz_.end(), u);
  std::size_t hi = static_cast<std::size_t>(it - offsets_hz_.begin());
  double x0 = hi == 0 ? 0.0 : offsets_hz_[hi - 1];
  double y0 = hi == 0 ? 0.0 : gain_per_w_m_[hi - 1];
  double x1 = offsets_hz_[hi];
  double y1 = gain_per_w_m_[hi];
  return sign * (y0 + (y1 - y0) * (u - x0) / (x1 - x0));
}

double PowerProfileSet::rho_at(std::size_t channel, double z) const {
  if (channel >= channels()) throw ContractError("profile channel index out of range");
  if (z < 0.0 || z > length_m() * (1.0 + 1e-12))
    throw ContractError("z outside the span profile grid");
  if (z >= length_m()) return rho(static_cast<Eigen::Index>(grid_points()) - 1, channel);
  std::size_t i = static_cast<std::size_t>(z / dz_m);
  if (i + 1 >= grid_points()) i = grid_points() - 2;
  double t = (z - z_m[i]) / (z_m[i + 1] - z_m[i]);
  return (1.0 - t) * rho(i, channel) + t * rho(i + 1, channel);
}

double PowerProfileSet::rho_end(std::size_t channel) const {
  if (channel >= channels()) throw ContractError("profile channel index out of range");
  return rho(static_cast<Eigen::Index>(grid_points()) - 1, channel);
}

PowerProfileSet PowerProfileSet::from_rho(std::vector<double> z, Eigen::MatrixXd rho,
                                          std::vector<double> launch_power_w) {
  if (z.size() < 2) throw ContractError("profile grid needs at least two points");
  if (rho.rows() != static_cast<Eigen::Index>(z.size()))
    throw ContractError("rho rows must match the grid size");
  if (launch_power_w.size() != static_cast<std::size_t>(rho.cols()))
    throw ContractError("launch power count must match rho columns");
  PowerProfileSet set;
  set.dz_m = z[1] - z[0];
  set.z_m = std::move(z);
  set.power_w = rho;
  for (Eigen::Index c = 0; c < rho.cols(); ++c) {
    if (rho(0, c) != 1.0) throw ContractError("rho must equal 1 at z = 0");
    set.power_w.col(c) *= launch_power_w[static_cast<std::size_t>(c)];
  }
  set.rho = std::move(rho);
  return set;
}

double zeta(double x) {
  if (!std::isfinite(x) || x <= 0.0)
    throw DomainError("zeta requires a positive finite frequency ratio");
  if (x > 1.0) return x;
  if (x == 1.0) return 0.0;
  return 1.0;
}

namespace detail {

RamanSystem::RamanSystem(const std::vector<SpectralComponent>& components,
                         const RamanGainProfile& gain) {
  const Eigen::Index n = static_cast<Eigen::Index>(components.size());
  coupling.setZero(n, n);
  two_alpha.resize(n);
  direction.resize(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const auto& rec = components[static_cast<std::size_t>(l)];
    two_alpha[l] = 2.0 * rec.alpha_per_m;
    direction[l] = rec.direction == Direction::forward ? 1.0 : -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == l) continue;  // self term vanishes: C_R(0) = 0
      const auto& don = components[static_cast<std::size_t>(i)];
      coupling(l, i) = zeta(rec.frequency_hz / don.frequency_hz) *
                       gain.gain_at(don.frequency_hz - rec.frequency_hz);
    }
  }
}

void RamanSystem::rhs(const Eigen::VectorXd& powers, Eigen::VectorXd& dpdz) const {
  dpdz.noalias() = coupling * powers;
  dpdz -= two_alpha;
  dpdz.array() *= powers.array() * direction.array();
}

}  // namespace detail

std::vector<double> raman_rhs(double /*z*/, const std::vector<double>& powers_w,
                              const std::vector<SpectralComponent>& components,
                              const RamanGainProfile& gain) {
  if (powers_w.size() != components.size())
    throw ContractError("raman_rhs: power vector and component list differ in length");
  for (double p : powers_w)
    if (!(p >= 0.0)) throw ContractError("raman_rhs: powers must be >= 0");

  detail::RamanSystem system(components, gain);
  Eigen::VectorXd p = Eigen::Map<const Eigen::VectorXd>(
      powers_w.data(), static_cast<Eigen::Index>(powers_w.size()));
  Eigen::VectorXd d(p.size());
  system.rhs(p, d);
  return std::vector<double>(d.data(), d.data() + d.size());
}

}  // namespace lfengine
