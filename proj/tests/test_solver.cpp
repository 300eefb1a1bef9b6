#include <cmath>
#include <random>

#include "doctest.h"
#include "storhz/model.hpp"
#include "storhz/oracle.hpp"
#include "storhz/solver.hpp"
#include "test_support.hpp"

using namespace storhz;
using namespace storhz::testing;

namespace {

// Reachable interval by stepping the extreme actions, clipped every period.
Interval reach_by_steps(const StorageSpec& s, std::size_t T) {
  double lo = s.s_init, hi = s.s_init;
  for (std::size_t k = 0; k < T; ++k) {
    lo = std::max(s.s_min, s.rho * lo - s.dt * s.p_dis_max / s.eta_dis);
    hi = std::min(s.s_max, s.rho * hi + s.dt * s.eta_ch * s.p_ch_max);
  }
  return {lo, hi};
}

}  // namespace

TEST_SUITE("solver") {
  TEST_CASE("one-period forward values") {
    const StorageSpec s = unit_storage();
    const auto v = forward_values(s, PriceSeries({1}, -10, 10), 1).at(1);
    CHECK(v.lo() == 0);
    CHECK(v.hi() == 2);
    CHECK(v(0) == doctest::Approx(1.0));
    CHECK(v(1) == doctest::Approx(0.0));
    CHECK(v(2) == doctest::Approx(-1.0));
    const auto w = forward_values(s, PriceSeries({-5}, -10, 10), 1).at(1);
    CHECK(w(2) == doctest::Approx(5.0));
  }

  TEST_CASE("backward values pinned at the end") {
    const StorageSpec s = unit_storage();
    const PriceSeries p({1, 3}, -10, 10);
    const auto w = backward_values(s, p, 2, 0.0);
    CHECK(w.at(2).size() == 1);
    CHECK(w.at(1)(1) == doctest::Approx(3.0));
    CHECK(w.at(0)(1) == doctest::Approx(3.0));
    CHECK_THROWS_AS(backward_values(s, p, 3, 0.0), InputError);
  }

  TEST_CASE("fixed terminal by hand") {
    const StorageSpec s = unit_storage();
    const auto r = solve_fixed_terminal(s, PriceSeries({1, 3}, -10, 10), 2, 0.0);
    CHECK(r.profit == doctest::Approx(3.0));
    REQUIRE(r.schedule.size() == 2);
    CHECK(r.schedule.soe[0] == doctest::Approx(1.0));
    CHECK(r.schedule.soe[1] == doctest::Approx(0.0));
    CHECK(r.schedule.p_dis[1] == doctest::Approx(1.0));
  }

  TEST_CASE("flat prices earn nothing when the state returns") {
    const StorageSpec s = fast_storage();
    const PriceSeries p(std::vector<double>(24, 0.5), -1, 4);
    const auto r = solve_fixed_terminal(s, p, 24, s.s_init);
    CHECK(std::abs(r.profit) <= 1e-9);
  }

  TEST_CASE("forced charge") {
    const StorageSpec s = unit_storage();
    const auto r = solve_fixed_terminal(s, PriceSeries({2}, -10, 10), 1, 2.0);
    CHECK(r.profit == doctest::Approx(-2.0));
    CHECK(r.schedule.p_ch[0] == doctest::Approx(1.0));
  }

  TEST_CASE("unreachable terminal is infeasible") {
    const StorageSpec s = unit_storage();
    CHECK_THROWS_AS(solve_fixed_terminal(s, PriceSeries({2}, -10, 10), 1, 0.0 - 0.5),
                    InfeasibleError);
    StorageSpec slow = fast_storage();
    CHECK_THROWS_AS(solve_fixed_terminal(slow, PriceSeries({1, 1}, -10, 10), 2, 10.0),
                    InfeasibleError);
    CHECK_THROWS_AS(backward_values(slow, PriceSeries({1, 1}, -10, 10), 2, 10.0),
                    InfeasibleError);
  }

  TEST_CASE("free terminal") {
    const StorageSpec s = unit_storage();
    const auto r = solve_free_terminal(s, PriceSeries({5}, -10, 10), 1, {0, 2});
    CHECK(r.profit == doctest::Approx(5.0));
    CHECK(r.argmax.min() == doctest::Approx(0.0));
    CHECK(r.argmax.max() == doctest::Approx(0.0));
    CHECK_THROWS_AS(solve_free_terminal(s, PriceSeries({5}, -10, 10), 1, {3, 4}), InfeasibleError);
  }

  TEST_CASE("ties pick the charge branch then the smallest predecessor") {
    // discharging in either period earns 1; the earlier one is kept
    const auto r = solve_fixed_terminal(unit_storage(), PriceSeries({1, 1}, -10, 10), 2, 0.0);
    CHECK(r.profit == doctest::Approx(1.0));
    CHECK(r.schedule.soe[0] == doctest::Approx(0.0));
    CHECK(r.schedule.soe[1] == doctest::Approx(0.0));
  }

  TEST_CASE("snap_to") {
    CHECK(snap_to(-1e-12, {0, 1}, 1e-9) == 0.0);
    CHECK(snap_to(1 + 1e-12, {0, 1}, 1e-9) == 1.0);
    CHECK(snap_to(-1e-3, {0, 1}, 1e-9) == -1e-3);
    CHECK(snap_to(0.5, {0, 1}, 1e-9) == 0.5);
  }

  TEST_CASE("recovered schedules are feasible and earn the DP value") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int it = 0; it < 200; ++it) {
      const StorageSpec s = random_spec(rng);
      const std::size_t T = 1 + rng() % 16;
      const PriceSeries p(random_prices(rng, T, -1, 1), -1, 1);
      const Interval reach = reach_by_steps(s, T);
      const double s_end = reach.lo + u(rng) * (reach.hi - reach.lo);
      const auto r = solve_fixed_terminal(s, p, T, s_end);
      const auto v = validate_schedule(s, p, r.schedule);
      CHECK(v.empty());
      CHECK(std::abs(profit_of(s, p, r.schedule) - r.profit) <= 1e-7);
      CHECK(std::abs(r.schedule.soe.back() - s_end) <= 1e-7 * std::max(1.0, s.capacity()));
    }
  }

  TEST_CASE("forward domain equals the reachable interval") {
    std::mt19937_64 rng(12);
    for (int it = 0; it < 100; ++it) {
      const StorageSpec s = random_spec(rng);
      const std::size_t T = 1 + rng() % 20;
      const PriceSeries p(random_prices(rng, T, -1, 1), -1, 1);
      const auto prof = forward_values(s, p, T);
      for (std::size_t k = 1; k <= T; ++k) {
        const Interval r = reach_by_steps(s, k);
        CHECK(prof.at(k).lo() == doctest::Approx(r.lo).epsilon(1e-9));
        CHECK(prof.at(k).hi() == doctest::Approx(r.hi).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("forward plus backward is constant along the optimum") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0, 1);
    for (int it = 0; it < 60; ++it) {
      const StorageSpec s = random_spec(rng);
      const std::size_t T = 2 + rng() % 12;
      const PriceSeries p(random_prices(rng, T, -1, 1), -1, 1);
      const Interval reach = reach_by_steps(s, T);
      const double s_end = reach.lo + u(rng) * (reach.hi - reach.lo);
      const auto fwd = forward_values(s, p, T);
      const auto bwd = backward_values(s, p, T, s_end);
      const double z = fwd.at(T)(s_end);
      for (std::size_t k = 0; k <= T; ++k) {
        CHECK(add(fwd.at(k), bwd.at(k)).max_value() == doctest::Approx(z).epsilon(1e-9));
      }
      CHECK(bwd.at(0)(s.s_init) == doctest::Approx(z).epsilon(1e-9));
    }
  }

  TEST_CASE("exact optimum agrees with a fine grid DP") {
    std::mt19937_64 rng(14);
    for (int it = 0; it < 40; ++it) {
      const StorageSpec s = random_spec(rng);
      const std::size_t T = 2 + rng() % 10;
      const PriceSeries p(random_prices(rng, T, -1, 1), -1, 1);
      const GridSpec grid = matched_grid(s, 201);
      const Interval reach = reach_by_steps(s, T);
      // a grid point inside the reachable interval
      const double h = grid_step(s, grid);
      const auto first = std::size_t(std::ceil((reach.lo - s.s_min) / h));
      const auto last = std::size_t(std::floor((reach.hi - s.s_min) / h));
      if (first > last) continue;
      const std::size_t idx = first + rng() % (last - first + 1);
      const double s_end = grid_state(s, grid, idx);
      if (s_end < reach.lo || s_end > reach.hi) continue;
      const auto exact = solve_fixed_terminal(s, p, T, s_end);
      const auto approx =
          grid_dp_solve(s, p, T, window_around(s, grid, s_end, 0), grid);
      CHECK(std::abs(approx.profit - exact.profit) <= approx.error_bound);
    }
  }
}
