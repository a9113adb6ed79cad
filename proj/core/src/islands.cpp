#include "lfengine/islands.hpp"

#include <algorithm>
#include <string>

#include "lfengine/errors.hpp"

namespace lfengine {

std::vector<Island> enumerate_islands(const WdmGrid& grid, std::size_t cut_index) {
  if (cut_index >= grid.size())
    throw ContractError("cut index " + std::to_string(cut_index) + " out of range");

  const auto& cut = grid.channel(cut_index);
  std::vector<Island> islands;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& bi = grid.channel(i);
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const auto& bj = grid.channel(j);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto& bk = grid.channel(k);

        // f1 + f2 must fall inside band_k + band_cut for some admissible pair
        // (f3, f). Strict inequalities drop measure-zero touch-only overlaps.
        const double sum_lo = std::max(bi.lower_hz() + bj.lower_hz(),
                                       bk.lower_hz() + cut.lower_hz());
        const double sum_hi = std::min(bi.upper_hz() + bj.upper_hz(),
                                       bk.upper_hz() + cut.upper_hz());
        if (!(sum_lo < sum_hi)) continue;

        Island island;
        island.ch1 = i;
        island.ch2 = j;
        island.ch3 = k;
        island.cut = cut_index;
        island.f1_lo_hz = std::max(bi.lower_hz(), sum_lo - bj.upper_hz());
        island.f1_hi_hz = std::min(bi.upper_hz(), sum_hi - bj.lower_hz());
        island.f2_lo_hz = std::max(bj.lower_hz(), sum_lo - bi.upper_hz());
        island.f2_hi_hz = std::min(bj.upper_hz(), sum_hi - bi.lower_hz());
        island.rep1_hz = bi.center_hz;
        island.rep2_hz = bj.center_hz;
        island.rep3_hz = bk.center_hz;
        islands.push_back(island);
      }
    }
  }
  return islands;
}

ProbeTriple island_probe_point(const WdmGrid& grid, const Island& island) {
  const auto& bi = grid.channel(island.ch1);
  const auto& bj = grid.channel(island.ch2);
  const auto& bk = grid.channel(island.ch3);
  const auto& bc = grid.channel(island.cut);

  const double sum_lo =
      std::max(bi.lower_hz() + bj.lower_hz(), bk.lower_hz() + bc.lower_hz());
  const double sum_hi =
      std::min(bi.upper_hz() + bj.upper_hz(), bk.upper_hz() + bc.upper_hz());
  if (!(sum_lo < sum_hi)) throw ContractError("island has an empty region");
  const double s = 0.5 * (sum_lo + sum_hi);

  ProbeTriple probe;
  probe.f1_hz = 0.5 * (std::max(bi.lower_hz(), s - bj.upper_hz()) +
                       std::min(bi.upper_hz(), s - bj.lower_hz()));
  probe.f2_hz = s - probe.f1_hz;
  probe.f3_hz = 0.5 * (std::max(bk.lower_hz(), s - bc.upper_hz()) +
                       std::min(bk.upper_hz(), s - bc.lower_hz()));
  return probe;
}

}  // namespace lfengine
