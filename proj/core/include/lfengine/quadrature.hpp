#pragma once

#include <cstddef>
#include <vector>

namespace lfengine {

struct GaussLegendreRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre nodes and weights of the given order. Rules are computed by
/// Newton iteration on the Legendre recurrence and cached per order.
const GaussLegendreRule& gauss_legendre(int order);

}  // namespace lfengine
