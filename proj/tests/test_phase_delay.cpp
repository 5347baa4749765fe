#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "qmcomb/delay.hpp"
#include "qmcomb/phase.hpp"

using namespace qmcomb;
constexpr double pi = std::numbers::pi;

TEST_CASE("frequency grid: symmetric samples are exact mirrors") {
  const auto g = FrequencyGrid<double>::symmetric_around_zero(4.0, 4001);
  REQUIRE(g.zero_index() == 2000);
  const auto v = g.values();
  CHECK(v[2000] == 0.0);
  for (int i = 0; i < 2000; ++i) CHECK(v[i] == -v[4000 - i]);
  CHECK_THROWS_AS(FrequencyGrid<double>(1, 1, 5), InvalidParameter);
  CHECK_THROWS_AS(FrequencyGrid<double>(0, 1, 2), InvalidParameter);
  CHECK_FALSE(FrequencyGrid<double>(0.05, 1, 11).zero_index().has_value());
}

TEST_CASE("unwrap: constant arguments are unchanged") {
  const FrequencyGrid<double> g(-1, 1, 11);
  const std::vector<double> raw(11, 0.4);
  const auto p = unwrap_phase<double>(raw, g);
  for (double x : p) CHECK(x == 0.4);
}

TEST_CASE("unwrap: single resonance winds by 2 pi") {
  const FrequencyGrid<double> g(-200, 200, 80001);
  std::vector<double> raw;
  for (int i = 0; i < g.n_points; ++i) raw.push_back(std::arg(single_resonator_response(0.0, 1.0, g[i])));
  const auto p = unwrap_phase<double>(raw, g);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= p[i - 1]);
  // Residual winding outside the window is 2 (2 atan(k / (2 * 200))).
  const double tail = 4 * std::atan(0.5 / 200);
  CHECK(p.back() - p.front() == doctest::Approx(2 * pi - tail).epsilon(1e-9));
}

TEST_CASE("unwrap: coarse sampling is reported") {
  const FrequencyGrid<double> g(-2, 2, 5);
  std::vector<double> raw;
  for (int i = 0; i < g.n_points; ++i) raw.push_back(std::arg(single_resonator_response(0.0, 0.05, g[i])));
  raw[2] = raw[1] + 2.5;
  CHECK_THROWS_AS(unwrap_phase<double>(raw, g), GridTooCoarse);
}

TEST_CASE("unwrap: anchoring and antisymmetrization") {
  const auto g = FrequencyGrid<double>::symmetric_around_zero(2, 9);
  std::vector<double> raw{0.1, 0.2, 0.3, 0.4, 0.7, 1.0, 1.1, 1.2, 1.3};
  const auto p = unwrap_phase<double>(raw, g, {.anchor_at_zero = true, .antisymmetrize = true});
  CHECK(p[4] == 0.0);
  for (int i = 0; i < 9; ++i) CHECK(p[std::size_t(i)] == -p[std::size_t(8 - i)]);
  CHECK_THROWS_AS(unwrap_phase<double>(raw, FrequencyGrid<double>(0.1, 2, 9), {.anchor_at_zero = true}),
                  ContractViolation);
}

TEST_CASE("unwrap: optimal block phase is smooth on 2001 points") {
  const Circuit<double> c{Block<double>{0, 1, 3.47, 0.29}};
  const auto r = spectral_response(c, FrequencyGrid<double>::symmetric_around_zero(4, 2001));
  std::vector<double> d;
  for (std::size_t i = 1; i < r.phase.size(); ++i) d.push_back(std::abs(r.phase[i] - r.phase[i - 1]));
  constexpr std::size_t w = 50;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t lo = i > w ? i - w : 0, hi = std::min(d.size(), i + w + 1);
    std::vector<double> win(d.begin() + long(lo), d.begin() + long(hi));
    std::nth_element(win.begin(), win.begin() + long(win.size() / 2), win.end());
    CHECK(d[i] <= 10 * win[win.size() / 2]);
  }
}

TEST_CASE("delay profile: closed-form T(0) and normalisation") {
  const Circuit<double> c{Block<double>{0, 1, 3.47, 0.29}};
  const auto p = delay_profile(c, FrequencyGrid<double>::symmetric_around_zero(4, 4001));
  CHECK(p.delay_at_zero == doctest::Approx(13.88 / 16.7137).epsilon(1e-12));
  CHECK(p.delay_at_zero == doctest::Approx(0.8305).epsilon(1e-4));
  CHECK(p.relative[2000] == 1.0);
  for (int i = 0; i < 2000; ++i) CHECK(std::abs(p.delay[std::size_t(i)] - p.delay[std::size_t(4000 - i)]) < 1e-10);
}

TEST_CASE("delay profile: extrapolated T(0) matches the analytic limit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uk(0.5, 10), ug(0, 5);
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(4, 4001);
  for (int t = 0; t < 50; ++t) {
    const double k = uk(rng), g = ug(rng);
    auto r = spectral_response(Circuit<double>{Block<double>{0, 1, k, g}}, grid);
    r.exact_delay_at_zero.reset();
    const auto p = delay_profile(r);
    CHECK(std::abs(p.delay_at_zero - 4 * k / (8 * g * g + k * k + 4)) < 1e-6);
  }
}

TEST_CASE("delay profile: calibrated phase reproduces the closed form") {
  const double k = 3.47, g = 0.29;
  const auto r = spectral_response(Circuit<double>{Block<double>{0, 1, k, g}},
                                   FrequencyGrid<double>::symmetric_around_zero(4, 4001));
  for (int i = 0; i < r.grid.n_points; ++i) {
    const double nu = r.grid[i];
    if (std::abs(8 * g * g + k * k + 4 - 4 * nu * nu) <= 0.1) continue;
    CHECK(std::abs(std::tan(kPhaseToDelay<double> * r.phase[std::size_t(i)]) - closed_form_tan_phase(k, g, nu)) <
          1e-8 * std::max(1.0, std::abs(closed_form_tan_phase(k, g, nu))));
  }
}

TEST_CASE("delay profile: unanchored phase is a contract violation") {
  auto r = spectral_response(Circuit<double>{Block<double>{0, 1, 2, 0}}, FrequencyGrid<double>(-1, 1, 11));
  r.phase[5] = 0.1;
  CHECK_THROWS_AS(delay_profile(r), ContractViolation);
}

TEST_CASE("delay profile: cascade phases add and T_rel of a doubled block is unchanged") {
  const Block<double> b{0, 1, 3.47, 0.29};
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(4, 4001);
  const auto one = spectral_response(Circuit<double>{b}, grid);
  const auto two = spectral_response(Circuit<double>{b, b}, grid);
  for (int i = 0; i < grid.n_points; ++i)
    CHECK(std::abs(two.phase[std::size_t(i)] - 2 * one.phase[std::size_t(i)]) < 1e-9);
  const auto p1 = delay_profile(one), p2 = delay_profile(two);
  for (int i = 0; i < grid.n_points; ++i)
    CHECK(std::abs(p1.relative[std::size_t(i)] - p2.relative[std::size_t(i)]) < 1e-9);
}

TEST_CASE("delay profile: shifted elements add their phases") {
  const Block<double> a{-2.18, 1, 3.47, 0.29}, b{2.18, 1, 3.47, 0.29};
  const Comb<double> c{{-3, -1, 1, 3}, 4.26};
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(6, 4001);
  const auto total = spectral_response(Circuit<double>{a, b, c}, grid);
  const auto pa = spectral_response(Circuit<double>{a}, grid);
  const auto pb = spectral_response(Circuit<double>{b}, grid);
  const auto pc = spectral_response(Circuit<double>{c}, grid);
  for (int i = 0; i < grid.n_points; ++i) {
    const std::size_t j = std::size_t(i);
    CHECK(std::abs(total.phase[j] - (pa.phase[j] + pb.phase[j] + pc.phase[j])) < 1e-9);
  }
}

TEST_CASE("delay spread: reference partial and full blocks") {
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(4, 4001);
  const double full = delay_spread(delay_profile(Circuit<double>{Block<double>{0, 1, 3.47, 0.29}}, grid), -1.0, 1.0);
  const double partial = delay_spread(delay_profile(Circuit<double>{Block<double>{0, 1, 3.17, 0.0}}, grid), -1.0, 1.0);
  CHECK(full == doctest::Approx(0.004).epsilon(0.3));
  CHECK(partial == doctest::Approx(0.006).epsilon(0.3));
  CHECK(full < partial);
}

TEST_CASE("delay spread: edge cases") {
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(1, 11);
  DelayProfile<double> flat{grid, std::vector<double>(11, 2.0), 2.0, std::vector<double>(11, 1.0)};
  CHECK(delay_spread(flat, -1.0, 1.0) == 0.0);
  CHECK_THROWS_AS(delay_spread(flat, 0.01, 0.02), InvalidParameter);
  CHECK_THROWS_AS(delay_spread(flat, -2.0, 1.0), InvalidParameter);
}

TEST_CASE("delay profile: uncoupled circuit has zero delay and undefined T_rel") {
  const auto p = delay_profile(Circuit<double>{Block<double>{0, 1, 0, 0.3}}, FrequencyGrid<double>(-1, 1, 21));
  for (double t : p.delay) CHECK(t == 0.0);
  for (double r : p.relative) CHECK(std::isnan(r));
  CHECK_THROWS_AS(delay_spread(p, -1.0, 1.0), ContractViolation);
}

TEST_CASE("delay at a single frequency matches the profile") {
  const Circuit<double> c{Block<double>{-2.18, 1, 3.47, 0.29}, Block<double>{2.18, 1, 3.47, 0.29}};
  const auto grid = FrequencyGrid<double>::symmetric_around_zero(6, 4001);
  const auto p = delay_profile(c, grid);
  for (int i : {2100, 2500, 3000, 3999}) CHECK(std::abs(delay_at(c, grid[i]) - p.delay[std::size_t(i)]) < 1e-10);
  CHECK(std::abs(delay_at_zero(c) - p.delay_at_zero) < 1e-8);
}
