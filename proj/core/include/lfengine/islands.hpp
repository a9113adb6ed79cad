#pragma once

#include <cstddef>
#include <vector>

#include "lfengine/link.hpp"

namespace lfengine {

/// One non-null integration region in the (f1, f2) plane: the interaction of
/// channel triple (ch1, ch2, ch3) whose mixing product f1 + f2 - f3 can land
/// inside the channel under test. The stored rectangle is the tight bounding
/// box of the region; the representative frequencies are the channel centers
/// and are the frequencies at which the per-span profile fits are computed.
struct Island {
  std::size_t ch1 = 0;
  std::size_t ch2 = 0;
  std::size_t ch3 = 0;
  std::size_t cut = 0;
  double f1_lo_hz = 0.0, f1_hi_hz = 0.0;
  double f2_lo_hz = 0.0, f2_hi_hz = 0.0;
  double rep1_hz = 0.0, rep2_hz = 0.0, rep3_hz = 0.0;

  bool same_triple(const Island& other) const {
    return ch1 == other.ch1 && ch2 == other.ch2 && ch3 == other.ch3 && cut == other.cut;
  }
};

/// Every ordered channel triple (i, j, k) for which the set
/// { (f1, f2) in band_i x band_j : f1 + f2 - f3 in band_cut for some f3 in
///   band_k } has positive measure, in lexicographic (i, j, k) order.
/// Touch-only overlaps contribute nothing to the double integral and are
/// excluded.
std::vector<Island> enumerate_islands(const WdmGrid& grid, std::size_t cut_index);

struct ProbeTriple {
  double f1_hz = 0.0;
  double f2_hz = 0.0;
  double f3_hz = 0.0;
};

/// An interior point of the island's exact region whose mixing product
/// f1 + f2 - f3 lies strictly inside the CUT band. The representative channel
/// centers do not always have that property (their combination can fall
/// outside the comb on asymmetric grids), so island-level evaluations that
/// need a concrete frequency triple use this probe.
ProbeTriple island_probe_point(const WdmGrid& grid, const Island& island);

}  // namespace lfengine
