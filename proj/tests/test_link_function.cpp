#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "lfengine/errors.hpp"
#include "lfengine/link_function.hpp"
#include "support/test_links.hpp"

using namespace lfengine;
using namespace lfetest;
using Complex = std::complex<double>;

namespace {

constexpr double kTestPi = 3.14159265358979323846;

std::vector<PsiFit> fits_for(const Link& link, const Island& island,
                             const FitConfig& cfg = {}) {
  std::vector<PsiFit> fits;
  for (std::size_t s = 0; s < link.span_count(); ++s)
    fits.push_back(fit_psi(link, s, island, cfg));
  return fits;
}

const Island& island_of(const std::vector<Island>& islands, std::size_t i, std::size_t j,
                        std::size_t k) {
  for (const auto& island : islands)
    if (island.ch1 == i && island.ch2 == j && island.ch3 == k) return island;
  throw std::runtime_error("island not found");
}

}  // namespace

TEST_CASE("theta exponent: flat loss and phase-matching structure") {
  auto link = make_flat_link_solved(1, 5, 100.0);
  const auto& g = link.grid();
  const double f1 = g.channel(0).center_hz;
  const double f2 = g.channel(4).center_hz;
  const double f3 = g.channel(2).center_hz;
  const auto theta = theta_exponent(link, 0, f1, f2, f3);
  // flat loss: -a-a-a+a = -2a
  CHECK(theta.real() == doctest::Approx(-2.0 * kAlphaFlat).epsilon(1e-12));
  const double expect_im = 4.0 * kTestPi * kTestPi * (f1 - f3) * (f2 - f3) *
                           (kBeta2 + kTestPi * kBeta3 *
                                         (f1 + f2 - 2.0 * link.span(0).taylor_center_hz));
  CHECK(theta.imag() == doctest::Approx(expect_im).epsilon(1e-12));

  SUBCASE("f1 = f3 kills the imaginary part") {
    CHECK(theta_exponent(link, 0, f1, f2, f1).imag() == 0.0);
    CHECK(theta_exponent(link, 0, f1, f2, f2).imag() == 0.0);
  }
}

TEST_CASE("span integral: effective length and unit limits") {
  auto link = make_flat_link_solved(1, 3, 10.0);
  auto islands = enumerate_islands(link.grid(), 1);
  const auto& sci = island_of(islands, 1, 1, 1);
  auto fit = fit_psi(link, 0, sci);
  const double L = link.span(0).length_m;

  SUBCASE("flat-loss no-Raman: classic effective length at delta = 0") {
    const Complex theta(-2.0 * kAlphaFlat, 0.0);
    const Complex got = span_integral_poly(fit, theta, L);
    const double expect = (1.0 - std::exp(-2.0 * kAlphaFlat * L)) / (2.0 * kAlphaFlat);
    CHECK(std::abs(got - Complex(expect)) <= 1e-9 * expect);
  }
  SUBCASE("theta = 0 integrates the constant to L") {
    const Complex got = span_integral_poly(fit, Complex(0.0, 0.0), L);
    CHECK(std::abs(got - Complex(L)) <= 1e-9 * L);
  }
}

TEST_CASE("span integral oracle: closed-form checks") {
  // The oracle converges to the integral of the linearly interpolated
  // profiles; dz = 1 m keeps that interpolation bias below the 1e-8 check.
  auto link = make_flat_link_solved(1, 3, 1.0, 5e-5, 50e3);
  const auto& g = link.grid();
  const double f1 = g.channel(0).center_hz;
  const double f2 = g.channel(2).center_hz;
  const double f3 = g.channel(1).center_hz;
  const double L = link.span(0).length_m;
  const double a = 5e-5;

  SUBCASE("delta = 0 when f1 = f3: real effective length") {
    const Complex got = span_integral_oracle(link, 0, f1, f2, f1);
    const double expect = (1.0 - std::exp(-2.0 * a * L)) / (2.0 * a);
    CHECK(got.imag() == 0.0);
    CHECK(std::abs(got.real() - expect) <= 1e-8 * expect);
  }
  SUBCASE("oscillatory case matches the no-Raman fraction") {
    const auto theta = theta_exponent(link, 0, f1, f2, f3);
    const Complex denom = -theta;
    const Complex expect = (1.0 - std::exp(-L * denom)) / denom;
    const Complex got = span_integral_oracle(link, 0, f1, f2, f3);
    CHECK(std::abs(got - expect) <= 1e-8 * std::abs(expect));
  }
}

TEST_CASE("span integral: polynomial path agrees with the oracle on a Raman span") {
  auto link = make_forward_raman_link_solved(5, 0.25, 10.0);
  auto islands = enumerate_islands(link.grid(), 2);
  for (std::size_t idx = 0; idx < islands.size(); idx += 7) {
    const auto& island = islands[idx];
    auto fit = fit_psi(link, 0, island);
    const auto probe = island_probe_point(link.grid(), island);
    const auto theta = theta_exponent(link, 0, probe.f1_hz, probe.f2_hz, probe.f3_hz);
    const Complex poly = span_integral_poly(fit, theta, link.span(0).length_m);
    const Complex direct =
        span_integral_oracle(link, 0, probe.f1_hz, probe.f2_hz, probe.f3_hz);
    CHECK(std::abs(poly - direct) <= 1e-3 * std::abs(direct));
  }
}

TEST_CASE("link function: symmetric under swapping f1 and f2") {
  auto link = make_forward_raman_link_solved(5, 0.25, 20.0);
  auto islands = enumerate_islands(link.grid(), 2);
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.1, 0.9);
  int tested = 0;
  for (const auto& island : islands) {
    if (tested >= 8) break;
    // need the mirrored island's fits for the swapped call
    const Island* mirror = nullptr;
    for (const auto& other : islands)
      if (other.ch1 == island.ch2 && other.ch2 == island.ch1 && other.ch3 == island.ch3)
        mirror = &other;
    REQUIRE(mirror != nullptr);

    const auto& b1 = link.grid().channel(island.ch1);
    const auto& b2 = link.grid().channel(island.ch2);
    const auto& bc = link.grid().channel(island.cut);
    const double f1 = b1.lower_hz() + unit(rng) * b1.symbol_rate_baud;
    const double f2 = b2.lower_hz() + unit(rng) * b2.symbol_rate_baud;
    const double f = bc.lower_hz() + unit(rng) * bc.symbol_rate_baud;
    const double f3 = f1 + f2 - f;
    if (!link.grid().try_channel_index_of(f3) ||
        *link.grid().try_channel_index_of(f3) != island.ch3)
      continue;
    ++tested;

    auto fits = fits_for(link, island);
    auto mirror_fits = fits_for(link, *mirror);
    const Complex a = link_function(link, f1, f2, f3, fits);
    const Complex b = link_function(link, f2, f1, f3, mirror_fits);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
  CHECK(tested > 0);
}

TEST_CASE("link function: single flat span magnitude matches the closed form") {
  auto link = make_flat_link_solved(1, 5, 10.0);
  auto islands = enumerate_islands(link.grid(), 2);
  const auto& island = island_of(islands, 0, 4, 2);
  auto fits = fits_for(link, island);

  const double f1 = island.rep1_hz, f2 = island.rep2_hz, f3 = island.rep3_hz;
  const Complex lk = link_function(link, f1, f2, f3, fits);
  const double xi = 4.0 * kTestPi * kTestPi * (f1 - f3) * (f2 - f3) *
                    (kBeta2 + kTestPi * kBeta3 *
                                  (f1 + f2 - 2.0 * link.span(0).taylor_center_hz));
  const double L = link.span(0).length_m;
  const Complex denom(2.0 * kAlphaFlat, -xi);
  const double expect =
      kGamma * std::abs((1.0 - std::exp(-L * denom)) / denom) *
      std::sqrt(link.amplifier(0).gain_at(2) * link.rho_end(0, 2));
  CHECK(std::abs(lk) == doctest::Approx(expect).epsilon(1e-7));
}

TEST_CASE("link function: transparent spans add coherently at delta = 0") {
  // f1 = f3 forces f1+f2-f3 = f2, so the island is (i, cut, i).
  for (std::size_t n_spans : {std::size_t{1}, std::size_t{2}, std::size_t{4}}) {
    auto link = make_flat_link_solved(n_spans, 3, 50.0);
    auto islands = enumerate_islands(link.grid(), 1);
    const auto& island = island_of(islands, 2, 1, 2);
    auto fits = fits_for(link, island);
    const double f1 = island.rep1_hz;  // equals rep3: zero phase mismatch
    const double f2 = island.rep2_hz;
    const Complex lk = link_function(link, f1, f2, f1, fits);
    const double L = link.span(0).length_m;
    const double leff = (1.0 - std::exp(-2.0 * kAlphaFlat * L)) / (2.0 * kAlphaFlat);
    CHECK(std::abs(lk) ==
          doctest::Approx(static_cast<double>(n_spans) * kGamma * leff).epsilon(1e-6));
  }
}

TEST_CASE("link function: no-Raman path agrees with the polynomial path") {
  auto link = make_flat_link_solved(2, 5, 10.0);
  auto islands = enumerate_islands(link.grid(), 2);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> unit(0.05, 0.95);
  int tested = 0;
  for (const auto& island : islands) {
    const auto& b1 = link.grid().channel(island.ch1);
    const auto& b2 = link.grid().channel(island.ch2);
    const auto& bc = link.grid().channel(island.cut);
    const double f1 = b1.lower_hz() + unit(rng) * b1.symbol_rate_baud;
    const double f2 = b2.lower_hz() + unit(rng) * b2.symbol_rate_baud;
    const double f = bc.lower_hz() + unit(rng) * bc.symbol_rate_baud;
    const double f3 = f1 + f2 - f;
    auto c3 = link.grid().try_channel_index_of(f3);
    if (!c3 || *c3 != island.ch3) continue;
    ++tested;
    auto fits = fits_for(link, island);
    const Complex poly = link_function(link, f1, f2, f3, fits);
    const Complex analytic = link_function_no_raman(link, f1, f2, f3);
    CHECK(std::abs(poly - analytic) <= 1e-6 * std::abs(analytic));
  }
  CHECK(tested >= 10);
}

TEST_CASE("link function: degenerate frequencies give gamma times effective length") {
  auto link = make_flat_link_solved(1, 3, 10.0);
  const double f = link.grid().channel(1).center_hz;
  const Complex lk = link_function_no_raman(link, f, f, f);
  const double L = link.span(0).length_m;
  const double leff = (1.0 - std::exp(-2.0 * kAlphaFlat * L)) / (2.0 * kAlphaFlat);
  CHECK(std::abs(lk) == doctest::Approx(kGamma * leff).epsilon(1e-10));
}

TEST_CASE("link function: contract errors") {
  auto raman = make_forward_raman_link_solved(3, 0.2, 50.0);
  CHECK_THROWS_AS(link_function_no_raman(raman, 193.0e12, 193.1e12, 193.05e12),
                  ContractError);

  auto link = make_flat_link_solved(2, 3, 100.0);
  auto islands = enumerate_islands(link.grid(), 1);
  const auto& island = islands.front();
  auto fits = fits_for(link, island);
  SUBCASE("wrong fit count") {
    std::vector<PsiFit> one = {fits[0]};
    CHECK_THROWS_AS(
        link_function(link, island.rep1_hz, island.rep2_hz, island.rep3_hz, one),
        ContractError);
  }
  SUBCASE("mixed islands") {
    auto other = fits_for(link, islands.back());
    std::vector<PsiFit> mixed = {fits[0], other[1]};
    CHECK_THROWS_AS(
        link_function(link, island.rep1_hz, island.rep2_hz, island.rep3_hz, mixed),
        ContractError);
  }
}

TEST_CASE("oracle: resolution budget error") {
  // An artificially tiny point budget cannot satisfy the phase criterion.
  auto link = make_flat_link_solved(1, 5, 1000.0);
  const auto& g = link.grid();
  OracleOptions opts;
  opts.max_points = 1024;
  CHECK_THROWS_AS(span_integral_oracle(link, 0, g.channel(0).center_hz,
                                       g.channel(4).center_hz, g.channel(2).center_hz,
                                       opts),
                  OracleResolutionError);
}
