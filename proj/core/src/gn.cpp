#include "lfengine/gn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfengine/errors.hpp"
#include "lfengine/parallel.hpp"
#include "lfengine/quadrature.hpp"

namespace lfengine {

namespace {

constexpr double kGnPrefactor = 16.0 / 27.0;

struct Segment {
  double lo, hi;
};

// |LK|^2 integrated over the exact island region at fixed f:
//   { (f1, f2) in band_1 x band_2 : f1 + f2 - f in band_3 }.
// The f2 limits are f1-dependent, so the outer range is split at the kinks of
// max/min and each piece is integrated by a tensor Gauss-Legendre rule.
double lk_squared_integral(const Link& link, const Island& island, double f_hz,
                           const IslandFits& fits, const FitConfig& fit_cfg, LkPath path,
                           int order, std::size_t* points) {
  const auto& b1 = link.grid().channel(island.ch1);
  const auto& b2 = link.grid().channel(island.ch2);
  const auto& b3 = link.grid().channel(island.ch3);

  const double f1_lo = std::max(b1.lower_hz(), f_hz + b3.lower_hz() - b2.upper_hz());
  const double f1_hi = std::min(b1.upper_hz(), f_hz + b3.upper_hz() - b2.lower_hz());
  if (!(f1_lo < f1_hi)) return 0.0;

  std::vector<Segment> segments;
  {
    std::vector<double> cuts = {f1_lo, f1_hi};
    for (double kink : {f_hz + b3.lower_hz() - b2.lower_hz(),
                        f_hz + b3.upper_hz() - b2.upper_hz()}) {
      if (kink > f1_lo && kink < f1_hi) cuts.push_back(kink);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i] < cuts[i + 1]) segments.push_back({cuts[i], cuts[i + 1]});
  }

  const auto& rule = gauss_legendre(order);
  double total = 0.0;
  for (const auto& seg : segments) {
    const double c1 = 0.5 * (seg.lo + seg.hi);
    const double h1 = 0.5 * (seg.hi - seg.lo);
    double seg_sum = 0.0;
    for (int a = 0; a < order; ++a) {
      const double f1 = c1 + h1 * rule.nodes[static_cast<std::size_t>(a)];
      const double f2_lo = std::max(b2.lower_hz(), f_hz + b3.lower_hz() - f1);
      const double f2_hi = std::min(b2.upper_hz(), f_hz + b3.upper_hz() - f1);
      if (!(f2_lo < f2_hi)) continue;
      const double c2 = 0.5 * (f2_lo + f2_hi);
      const double h2 = 0.5 * (f2_hi - f2_lo);
      double inner = 0.0;
      for (int b = 0; b < order; ++b) {
        const double f2 = c2 + h2 * rule.nodes[static_cast<std::size_t>(b)];
        const double f3 = f1 + f2 - f_hz;
        const std::complex<double> lk =
            path == LkPath::polynomial
                ? link_function(link, f1, f2, f3, fits, fit_cfg)
                : link_function_no_raman(link, f1, f2, f3);
        inner += rule.weights[static_cast<std::size_t>(b)] * std::norm(lk);
      }
      seg_sum += rule.weights[static_cast<std::size_t>(a)] * h2 * inner;
      *points += static_cast<std::size_t>(order);
    }
    total += h1 * seg_sum;
  }
  return total;
}

}  // namespace

std::size_t ChannelNli::total_points() const {
  std::size_t n = 0;
  for (const auto& c : contributions) n += c.points;
  return n;
}

double ChannelNli::max_error_estimate() const {
  double e = 0.0;
  for (const auto& c : contributions) e = std::max(e, c.error_estimate);
  return e;
}

IslandContribution island_nli_contribution(const Link& link, const Island& island,
                                           double f_hz, const IslandFits& fits,
                                           const FitConfig& fit_cfg,
                                           const QuadratureConfig& quad, LkPath path) {
  if (path == LkPath::polynomial && fits.size() != link.span_count())
    throw ContractError("island fits must cover every span");

  const double psd_product = link.grid().channel(island.ch1).psd_w_per_hz() *
                             link.grid().channel(island.ch2).psd_w_per_hz() *
                             link.grid().channel(island.ch3).psd_w_per_hz();

  IslandContribution out;
  out.island = island;
  if (psd_product == 0.0) return out;

  int order = quad.base_order;
  double prev = lk_squared_integral(link, island, f_hz, fits, fit_cfg, path, order,
                                    &out.points);
  out.order = order;
  for (int refinement = 0;; ++refinement) {
    if (prev == 0.0) {
      // Empty region at this f (the island is non-null for other f in the
      // CUT band); nothing to refine.
      out.psd_w_per_hz = 0.0;
      out.error_estimate = 0.0;
      return out;
    }
    if (refinement >= quad.max_refinements)
      throw QuadratureToleranceError(
          "island (" + std::to_string(island.ch1) + "," + std::to_string(island.ch2) +
          "," + std::to_string(island.ch3) + ") quadrature did not reach rel_tol " +
          std::to_string(quad.rel_tol) + " after " + std::to_string(quad.max_refinements) +
          " refinements at f = " + std::to_string(f_hz) + " Hz");
    order = std::max(order + 2, order * 3 / 2);
    double cur = lk_squared_integral(link, island, f_hz, fits, fit_cfg, path, order,
                                     &out.points);
    const double change = std::abs(cur - prev);
    out.order = order;
    if (change <= quad.rel_tol * std::abs(cur)) {
      out.psd_w_per_hz = kGnPrefactor * psd_product * cur;
      out.error_estimate = kGnPrefactor * psd_product * change;
      return out;
    }
    prev = cur;
  }
}

std::vector<IslandContribution> gn_island_contributions(
    const Link& link, double f_hz, const std::vector<Island>& islands,
    const std::vector<IslandFits>& fits_per_island, const FitConfig& fit_cfg,
    const QuadratureConfig& quad, LkPath path, int threads) {
  if (path == LkPath::polynomial && fits_per_island.size() != islands.size())
    throw ContractError("one fit set per island is required");

  std::vector<IslandContribution> contributions(islands.size());
  static const IslandFits no_fits;
  parallel_for(islands.size(), threads, [&](std::size_t i) {
    const IslandFits& fits = path == LkPath::polynomial ? fits_per_island[i] : no_fits;
    contributions[i] =
        island_nli_contribution(link, islands[i], f_hz, fits, fit_cfg, quad, path);
  });
  return contributions;
}

double gn_nli_psd(const Link& link, double f_hz, const std::vector<Island>& islands,
                  const std::vector<IslandFits>& fits_per_island, const FitConfig& fit_cfg,
                  const QuadratureConfig& quad, LkPath path, int threads) {
  auto contributions = gn_island_contributions(link, f_hz, islands, fits_per_island,
                                               fit_cfg, quad, path, threads);
  // Ordered reduction: the total is bitwise independent of the worker count.
  double total = 0.0;
  for (const auto& c : contributions) total += c.psd_w_per_hz;
  return total;
}

double gn_nli_power(const Link& link, std::size_t cut_index,
                    const std::vector<Island>& islands,
                    const std::vector<IslandFits>& fits_per_island, const FitConfig& fit_cfg,
                    const QuadratureConfig& quad, LkPath path, int band_points,
                    int threads) {
  const auto& cut = link.grid().channel(cut_index);
  if (band_points <= 1) {
    return gn_nli_psd(link, cut.center_hz, islands, fits_per_island, fit_cfg, quad, path,
                      threads) *
           cut.symbol_rate_baud;
  }
  // Trapezoid across the band.
  const double lo = cut.lower_hz();
  const double step = cut.symbol_rate_baud / static_cast<double>(band_points - 1);
  double acc = 0.0;
  for (int i = 0; i < band_points; ++i) {
    const double f = lo + step * static_cast<double>(i);
    const double w = (i == 0 || i == band_points - 1) ? 0.5 : 1.0;
    acc += w * gn_nli_psd(link, f, islands, fits_per_island, fit_cfg, quad, path, threads);
  }
  return acc * step;
}

}  // namespace lfengine
