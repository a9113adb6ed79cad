#include <doctest.h>

#include <cmath>
#include <random>

#include "lfengine/errors.hpp"
#include "lfengine/link.hpp"
#include "support/test_links.hpp"

using namespace lfengine;
using namespace lfetest;

TEST_CASE("grid: lookup is total over the band and loud outside it") {
  auto grid = make_grid(3);
  CHECK(grid.channel_index_of(193.0e12) == 0);
  CHECK(grid.channel_index_of(193.05e12) == 1);
  CHECK(grid.channel_index_of(193.1e12 + 19e9) == 2);
  // band edges are inclusive
  CHECK(grid.channel_index_of(193.0e12 - 20e9) == 0);
  CHECK(grid.channel_index_of(193.0e12 + 20e9) == 0);
  CHECK_THROWS_AS(grid.channel_index_of(193.0e12 + 25e9), FrequencyLookupError);  // gap
  CHECK_THROWS_AS(grid.channel_index_of(180e12), FrequencyLookupError);
  CHECK_THROWS_AS(grid.channel_index_of(250e12), FrequencyLookupError);
  CHECK(!grid.try_channel_index_of(250e12).has_value());
}

TEST_CASE("grid: construction enforces ordering and non-overlap") {
  std::vector<WdmChannel> overlapping(2);
  overlapping[0] = {193.0e12, 50e9, 1e-3};
  overlapping[1] = {193.04e12, 50e9, 1e-3};
  CHECK_THROWS_AS(WdmGrid{overlapping}, ContractError);

  std::vector<WdmChannel> unsorted(2);
  unsorted[0] = {193.1e12, 40e9, 1e-3};
  unsorted[1] = {193.0e12, 40e9, 1e-3};
  CHECK_THROWS_AS(WdmGrid{unsorted}, ContractError);
}

TEST_CASE("rho_at: normalization, endpoint, and interpolation") {
  auto link = make_flat_link_solved(1, 3, 10.0, 5e-5, 50e3);
  CHECK(link.rho_at(0, 0.0, 193.05e12) == 1.0);
  CHECK(link.rho_at(0, 50e3, 193.05e12) ==
        doctest::Approx(std::exp(-5.0)).epsilon(1e-9));
  const double mid = 15.0;  // between the 10 m grid points
  const double blend = 0.5 * (link.rho_at(0, 10.0, 193.0e12) + link.rho_at(0, 20.0, 193.0e12));
  CHECK(link.rho_at(0, mid, 193.0e12) == doctest::Approx(blend).epsilon(1e-14));
  CHECK_THROWS_AS(link.rho_at(0, 0.0, 200e12), FrequencyLookupError);

  SUBCASE("in-band frequency resolves to the containing channel's profile") {
    CHECK(link.rho_at(0, 30e3, 193.05e12 + 15e9) == link.rho_at(0, 30e3, 193.05e12));
  }
}

TEST_CASE("end_of_span_factors: transparent link telescopes to one") {
  auto link = make_flat_link_solved(3, 3, 50.0);
  const double f1 = 193.0e12, f2 = 193.1e12, f3 = 193.05e12;
  for (std::size_t s = 0; s < 3; ++s)
    CHECK(link.end_of_span_factors(s, f1, f2, f3) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("end_of_span_factors: single span keeps only the downstream factor") {
  auto link = make_flat_link_solved(1, 3, 50.0);
  // Defeat transparency by using a non-unity amplifier: rebuild with gain 2.
  std::vector<FiberSpan> spans = {make_flat_span(3)};
  Amplifier amp;
  amp.gain.assign(3, 2.0);
  Link link2({spans}, {amp}, make_grid(3));
  SolverOptions opts;
  opts.dz_m = 50.0;
  fill_link_profiles(link2, opts);

  const double f1 = 193.0e12, f2 = 193.1e12, f3 = 193.05e12;
  const double f4 = f1 + f2 - f3;
  const double expect = std::sqrt(2.0 * link2.rho_end(0, link2.grid().channel_index_of(f4)));
  CHECK(link2.end_of_span_factors(0, f1, f2, f3) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("end_of_span_factors: two equal-loss spans match the hand expansion") {
  // Both spans have per-channel Gamma rho(L) = g; expanding the two product
  // chains gives g for n_s = 0 and g^2 for n_s = 1.
  std::vector<FiberSpan> spans(2, make_flat_span(3));
  Amplifier amp;
  amp.gain.assign(3, 1.0);  // deliberately not transparent
  std::vector<Amplifier> amps(2, amp);
  Link link(std::move(spans), std::move(amps), make_grid(3));
  SolverOptions opts;
  opts.dz_m = 50.0;
  fill_link_profiles(link, opts);

  const double g = link.rho_end(0, 0);  // flat loss: same for all channels
  const double f1 = 193.0e12, f2 = 193.1e12, f3 = 193.05e12;
  CHECK(link.end_of_span_factors(0, f1, f2, f3) == doctest::Approx(g).epsilon(1e-10));
  CHECK(link.end_of_span_factors(1, f1, f2, f3) == doctest::Approx(g * g).epsilon(1e-10));
}

TEST_CASE("link: construction contract checks") {
  auto grid = make_grid(2);
  std::vector<FiberSpan> spans = {make_flat_span(2)};
  Amplifier amp;
  amp.gain.assign(2, 1.0);

  SUBCASE("amplifier count must match spans") {
    CHECK_THROWS_AS(Link(spans, {}, grid), ContractError);
  }
  SUBCASE("alpha per channel required") {
    auto bad = spans;
    bad[0].alpha_per_m.resize(1);
    CHECK_THROWS_AS(Link(bad, {amp}, grid), ContractError);
  }
  SUBCASE("profiles must exist before use") {
    Link link(spans, {amp}, grid);
    CHECK(!link.has_profiles(0));
    CHECK_THROWS_AS(link.profiles(0), ContractError);
    CHECK_THROWS_AS(link.rho_at(0, 0.0, 193.0e12), ContractError);
  }
}

TEST_CASE("transparency property on randomized per-channel gains") {
  // Whatever the span losses, amplifiers set to 1/rho(L) per channel make
  // every end_of_span_factors product equal 1.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> alpha_dist(1.5e-5, 3.5e-5);

  std::vector<FiberSpan> spans;
  for (int s = 0; s < 3; ++s) {
    FiberSpan span = make_flat_span(4);
    for (auto& a : span.alpha_per_m) a = alpha_dist(rng);
    spans.push_back(span);
  }
  Amplifier unity;
  unity.gain.assign(4, 1.0);
  Link probe(spans, std::vector<Amplifier>(3, unity), make_grid(4));
  SolverOptions opts;
  opts.dz_m = 100.0;
  fill_link_profiles(probe, opts);

  std::vector<Amplifier> amps(3);
  for (std::size_t s = 0; s < 3; ++s) {
    amps[s].gain.resize(4);
    for (std::size_t k = 0; k < 4; ++k) amps[s].gain[k] = 1.0 / probe.rho_end(s, k);
  }
  Link link(spans, amps, make_grid(4));
  fill_link_profiles(link, opts);

  std::uniform_real_distribution<double> pick(0, 3.999);
  for (int trial = 0; trial < 20; ++trial) {
    const double f1 = link.grid().channel(static_cast<std::size_t>(pick(rng))).center_hz;
    const double f2 = link.grid().channel(static_cast<std::size_t>(pick(rng))).center_hz;
    const double f3 = link.grid().channel(static_cast<std::size_t>(pick(rng))).center_hz;
    if (!link.grid().try_channel_index_of(f1 + f2 - f3)) continue;
    for (std::size_t s = 0; s < 3; ++s)
      CHECK(link.end_of_span_factors(s, f1, f2, f3) == doctest::Approx(1.0).epsilon(1e-9));
  }
}
