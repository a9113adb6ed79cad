#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace lfengine {

/// Piecewise-linear Raman gain coefficient C_R(u) over the frequency offset
/// u = f_donor - f_receiver. Only non-negative offsets are stored; the odd
/// extension C_R(-u) = -C_R(u) is applied on evaluation and C_R(0) = 0 always.
/// Past the last sample the profile is held constant.
class RamanGainProfile {
public:
  RamanGainProfile() = default;  // identically zero: no Raman interaction
  RamanGainProfile(std::vector<double> offsets_hz, std::vector<double> gain_per_w_m);

  bool empty() const noexcept { return offsets_hz_.empty(); }
  double gain_at(double offset_hz) const;

  const std::vector<double>& offsets_hz() const noexcept { return offsets_hz_; }
  const std::vector<double>& gain_per_w_m() const noexcept { return gain_per_w_m_; }

private:
  std::vector<double> offsets_hz_;
  std::vector<double> gain_per_w_m_;
};

enum class Direction : int { forward = +1, backward = -1 };
enum class ComponentKind { channel, pump };

/// One wave entering the coupled power-evolution equations. `alpha_per_m` is
/// the field loss coefficient: power decays as exp(-2 alpha z). `power_w` is
/// the boundary power, at z = 0 for forward waves and z = L for backward
/// pumps. WDM channels always propagate forward.
struct SpectralComponent {
  double frequency_hz = 0.0;
  double power_w = 0.0;
  Direction direction = Direction::forward;
  double alpha_per_m = 0.0;
  ComponentKind kind = ComponentKind::channel;
};

/// Per-channel power evolution along one span, sampled on a uniform z grid
/// that includes both endpoints. `rho` is power normalized to its z = 0
/// value, so rho(0, f) = 1 for every channel. Pumps are internal to the
/// solve; only their converged boundary powers are kept for diagnostics.
struct PowerProfileSet {
  std::vector<double> z_m;
  Eigen::MatrixXd power_w;  // grid point x channel
  Eigen::MatrixXd rho;
  double dz_m = 0.0;
  std::vector<double> pump_start_power_w;  // z = 0, in span pump order
  std::vector<double> pump_end_power_w;    // z = L

  std::size_t grid_points() const { return z_m.size(); }
  std::size_t channels() const { return static_cast<std::size_t>(rho.cols()); }
  double length_m() const { return z_m.empty() ? 0.0 : z_m.back(); }

  /// rho of one channel, linearly interpolated between grid samples.
  double rho_at(std::size_t channel, double z) const;
  double rho_end(std::size_t channel) const;

  /// Builds a profile set directly from rho samples on a uniform grid.
  static PowerProfileSet from_rho(std::vector<double> z_m, Eigen::MatrixXd rho,
                                  std::vector<double> launch_power_w);
};

/// Photon-number weight of the pump-side coupling term: x for x > 1, 0 at
/// exactly 1, otherwise 1. x is a ratio of stored frequencies, so equal
/// frequencies compare equal bit-exactly.
double zeta(double x);

/// Right-hand side dP/dz of the coupled Raman equations for every component.
std::vector<double> raman_rhs(double z, const std::vector<double>& powers_w,
                              const std::vector<SpectralComponent>& components,
                              const RamanGainProfile& gain);

namespace detail {

/// Precomputed coupling matrix for one span solve: the z-independent factors
/// zeta(f_l/f_i) * C_R(f_i - f_l) plus the loss and direction terms.
struct RamanSystem {
  Eigen::MatrixXd coupling;       // receiver l x donor i
  Eigen::VectorXd two_alpha;
  Eigen::VectorXd direction;      // +1 / -1

  RamanSystem(const std::vector<SpectralComponent>& components,
              const RamanGainProfile& gain);

  void rhs(const Eigen::VectorXd& powers, Eigen::VectorXd& dpdz) const;
};

}  // namespace detail

}  // namespace lfengine
