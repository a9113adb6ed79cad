#include "lfengine/link.hpp"

#include <cmath>
#include <string>

#include "lfengine/errors.hpp"

namespace lfengine {

double Amplifier::gain_at(std::size_t channel) const {
  if (channel >= gain.size()) throw ContractError("amplifier gain: channel index out of range");
  return gain[channel];
}

double Amplifier::phase_at(std::size_t channel) const {
  if (phase_rad.empty()) return 0.0;
  if (channel >= phase_rad.size())
    throw ContractError("amplifier phase: channel index out of range");
  return phase_rad[channel];
}

WdmGrid::WdmGrid(std::vector<WdmChannel> channels) : channels_(std::move(channels)) {
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    const auto& ch = channels_[k];
    if (!(ch.center_hz > 0.0) || !(ch.symbol_rate_baud > 0.0) || ch.launch_power_w < 0.0)
      throw ContractError("channel " + std::to_string(k) + ": invalid center, rate, or power");
    if (k > 0) {
      if (!(channels_[k - 1].center_hz < ch.center_hz))
        throw ContractError("channel centers must be strictly increasing");
      if (channels_[k - 1].upper_hz() > ch.lower_hz())
        throw ContractError("channels " + std::to_string(k - 1) + " and " +
                            std::to_string(k) + " overlap");
    }
  }
}

std::size_t WdmGrid::channel_index_of(double f_hz, std::optional<std::size_t> hint) const {
  if (hint && *hint < channels_.size()) {
    const auto& ch = channels_[*hint];
    if (f_hz >= ch.lower_hz() && f_hz <= ch.upper_hz()) return *hint;
  }
  auto found = try_channel_index_of(f_hz);
  if (!found)
    throw FrequencyLookupError("frequency " + std::to_string(f_hz) +
                               " Hz is outside every WDM channel band");
  return *found;
}

std::optional<std::size_t> WdmGrid::try_channel_index_of(double f_hz) const noexcept {
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    if (f_hz < channels_[k].lower_hz()) return std::nullopt;
    if (f_hz <= channels_[k].upper_hz()) return k;
  }
  return std::nullopt;
}

Link::Link(std::vector<FiberSpan> spans, std::vector<Amplifier> amplifiers, WdmGrid grid)
    : spans_(std::move(spans)), amplifiers_(std::move(amplifiers)), grid_(std::move(grid)) {
  if (spans_.empty()) throw ContractError("a link needs at least one span");
  if (amplifiers_.size() != spans_.size())
    throw ContractError("one amplifier per span is required");
  for (std::size_t s = 0; s < spans_.size(); ++s) {
    const auto& sp = spans_[s];
    if (!(sp.length_m > 0.0))
      throw ContractError("span " + std::to_string(s) + ": length must be > 0");
    if (sp.gamma_per_w_m < 0.0)
      throw ContractError("span " + std::to_string(s) + ": gamma must be >= 0");
    if (!(sp.taylor_center_hz > 0.0))
      throw ContractError("span " + std::to_string(s) + ": Taylor center must be > 0");
    if (sp.alpha_per_m.size() != grid_.size())
      throw ContractError("span " + std::to_string(s) + ": need one alpha per channel");
    if (amplifiers_[s].gain.size() != grid_.size())
      throw ContractError("amplifier " + std::to_string(s) + ": need one gain per channel");
    for (double g : amplifiers_[s].gain)
      if (!(g > 0.0))
        throw ContractError("amplifier " + std::to_string(s) + ": gains must be > 0");
    if (!amplifiers_[s].phase_rad.empty() && amplifiers_[s].phase_rad.size() != grid_.size())
      throw ContractError("amplifier " + std::to_string(s) +
                          ": phase list must be empty or one entry per channel");
  }
  profiles_.resize(spans_.size());
}

void Link::set_profiles(std::size_t s, PowerProfileSet profiles) {
  if (s >= spans_.size()) throw ContractError("span index out of range");
  if (profiles.channels() != grid_.size())
    throw ContractError("profile set must cover every WDM channel");
  if (std::abs(profiles.length_m() - spans_[s].length_m) > 1e-6 * spans_[s].length_m)
    throw ContractError("profile grid does not cover the span length");
  profiles_[s] = std::move(profiles);
}

bool Link::has_profiles(std::size_t s) const {
  return s < profiles_.size() && profiles_[s].has_value();
}

bool Link::all_profiles_ready() const {
  for (const auto& p : profiles_)
    if (!p) return false;
  return true;
}

const PowerProfileSet& Link::profiles(std::size_t s) const {
  if (s >= profiles_.size() || !profiles_[s])
    throw ContractError("span " + std::to_string(s) +
                        " has no power profiles; solve the span first");
  return *profiles_[s];
}

bool Link::raman_free() const {
  for (const auto& sp : spans_)
    if (!sp.raman_free()) return false;
  return true;
}

double Link::alpha(std::size_t s, std::size_t channel) const {
  return spans_.at(s).alpha_per_m.at(channel);
}

double Link::alpha_at(std::size_t s, double f_hz) const {
  return alpha(s, grid_.channel_index_of(f_hz));
}

double Link::rho_at(std::size_t s, double z_m, double f_hz) const {
  return profiles(s).rho_at(grid_.channel_index_of(f_hz), z_m);
}

double Link::rho_end(std::size_t s, std::size_t channel) const {
  return profiles(s).rho_end(channel);
}

double Link::end_of_span_factors(std::size_t n_s, double f1_hz, double f2_hz,
                                 double f3_hz) const {
  if (n_s >= spans_.size()) throw ContractError("span index out of range");
  const std::size_t c1 = grid_.channel_index_of(f1_hz);
  const std::size_t c2 = grid_.channel_index_of(f2_hz);
  const std::size_t c3 = grid_.channel_index_of(f3_hz);
  const std::size_t c4 = grid_.channel_index_of(f1_hz + f2_hz - f3_hz);

  double factor = 1.0;
  for (std::size_t p = n_s; p < spans_.size(); ++p)
    factor *= std::sqrt(amplifiers_[p].gain_at(c4) * rho_end(p, c4));
  for (std::size_t p = 0; p < n_s; ++p) {
    factor *= std::sqrt(amplifiers_[p].gain_at(c1) * amplifiers_[p].gain_at(c2) *
                        amplifiers_[p].gain_at(c3) * rho_end(p, c1) * rho_end(p, c2) *
                        rho_end(p, c3));
  }
  return factor;
}

}  // namespace lfengine
