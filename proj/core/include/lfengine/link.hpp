#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "lfengine/raman.hpp"

namespace lfengine {

/// One fiber span: geometry, per-channel loss, dispersion Taylor terms about
/// `taylor_center_hz`, Kerr nonlinearity, and the Raman configuration.
/// beta0/beta1 are accepted for completeness but cancel from the link
/// function, so they never enter any computed quantity.
struct FiberSpan {
  double length_m = 0.0;
  double gamma_per_w_m = 0.0;
  std::vector<double> alpha_per_m;  // one entry per WDM channel
  double beta0_per_m = 0.0;
  double beta1_s_per_m = 0.0;
  double beta2_s2_per_m = 0.0;
  double beta3_s3_per_m = 0.0;
  double taylor_center_hz = 0.0;
  RamanGainProfile raman;
  std::vector<SpectralComponent> pumps;

  bool raman_free() const { return raman.empty() && pumps.empty(); }
};

/// Lumped amplifier at the end of a span: per-channel power gain and phase
/// plus optional lumped dispersion. An empty phase vector means zero phase.
struct Amplifier {
  std::vector<double> gain;
  std::vector<double> phase_rad;
  double dcu_s2 = 0.0;

  double gain_at(std::size_t channel) const;
  double phase_at(std::size_t channel) const;
};

struct WdmChannel {
  double center_hz = 0.0;
  double symbol_rate_baud = 0.0;
  double launch_power_w = 0.0;

  double lower_hz() const { return center_hz - 0.5 * symbol_rate_baud; }
  double upper_hz() const { return center_hz + 0.5 * symbol_rate_baud; }
  /// Flat PSD of a rectangular spectrum over the channel band.
  double psd_w_per_hz() const { return launch_power_w / symbol_rate_baud; }
};

/// The WDM comb. Channels are kept sorted by center frequency; bands must not
/// overlap (sharing an edge is allowed).
class WdmGrid {
public:
  WdmGrid() = default;
  explicit WdmGrid(std::vector<WdmChannel> channels);

  std::size_t size() const noexcept { return channels_.size(); }
  const WdmChannel& channel(std::size_t k) const { return channels_.at(k); }
  const std::vector<WdmChannel>& channels() const noexcept { return channels_; }

  /// Index of the channel whose closed band contains f. Where two contiguous
  /// bands share an edge the lower index wins; `hint` short-circuits the scan
  /// when f lies inside the hinted channel's band.
  std::size_t channel_index_of(double f_hz,
                               std::optional<std::size_t> hint = std::nullopt) const;
  std::optional<std::size_t> try_channel_index_of(double f_hz) const noexcept;

private:
  std::vector<WdmChannel> channels_;
};

/// A multi-span link: (span, amplifier) pairs, the WDM grid, and per-span
/// power profiles filled in by the Raman solver. Immutable once the profiles
/// are in place; safe to share across worker threads.
class Link {
public:
  Link(std::vector<FiberSpan> spans, std::vector<Amplifier> amplifiers, WdmGrid grid);

  std::size_t span_count() const noexcept { return spans_.size(); }
  const FiberSpan& span(std::size_t s) const { return spans_.at(s); }
  const Amplifier& amplifier(std::size_t s) const { return amplifiers_.at(s); }
  const WdmGrid& grid() const noexcept { return grid_; }

  void set_profiles(std::size_t s, PowerProfileSet profiles);
  bool has_profiles(std::size_t s) const;
  bool all_profiles_ready() const;
  const PowerProfileSet& profiles(std::size_t s) const;

  bool raman_free() const;

  double alpha(std::size_t s, std::size_t channel) const;
  double alpha_at(std::size_t s, double f_hz) const;

  /// rho of the channel containing f, interpolated in z.
  double rho_at(std::size_t s, double z_m, double f_hz) const;
  double rho_end(std::size_t s, std::size_t channel) const;

  /// The real positive product of both gain/loss chains around span n_s: the
  /// downstream chain at f1+f2-f3 and the upstream chain at f1, f2, f3.
  double end_of_span_factors(std::size_t n_s, double f1_hz, double f2_hz,
                             double f3_hz) const;

private:
  std::vector<FiberSpan> spans_;
  std::vector<Amplifier> amplifiers_;
  WdmGrid grid_;
  std::vector<std::optional<PowerProfileSet>> profiles_;
};

}  // namespace lfengine
