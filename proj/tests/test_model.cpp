#include <cmath>
#include <random>

#include "doctest.h"
#include "storhz/model.hpp"
#include "test_support.hpp"

using namespace storhz;
using storhz::testing::unit_storage;

TEST_SUITE("model") {
  TEST_CASE("storage validation names the offending field") {
    StorageSpec s = unit_storage();
    CHECK_NOTHROW(s.validate());
    s.eta_ch = 1.2;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("eta_ch"), InputError);
    s = unit_storage();
    s.s_init = 3.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("s_init"), InputError);
    s = unit_storage();
    s.rho = 0.0;
    CHECK_THROWS_AS(s.validate(), InputError);
  }

  TEST_CASE("derived quantities") {
    StorageSpec s{0, 10, 1, 1, 0.9, 0.9, 1, 5, 1};
    CHECK(s.round_trip() == doctest::Approx(0.81));
    CHECK(s.duration_of_charge() == doctest::Approx(10 / 0.9));
    CHECK(s.duration_of_discharge() == doctest::Approx(9.0));
  }

  TEST_CASE("price series bounds") {
    CHECK_THROWS_AS(PriceSeries({1.0}, 0.5, 2.0), InputError);
    CHECK_THROWS_AS(PriceSeries({3.0}, -1.0, 2.0), InputError);
    const PriceSeries p({1, 2, 3}, -1, 5);
    CHECK(p.at(1) == 1);
    CHECK(p.at(3) == 3);
    CHECK_THROWS_AS(p.at(0), InputError);
    CHECK(p.window(2, 2).values()[0] == 2);
    CHECK_THROWS_AS(p.window(3, 2), InputError);
  }

  TEST_CASE("idle schedule is valid") {
    StorageSpec s{0, 100, 1, 1, 1, 1, 0.9, 50, 1};
    const PriceSeries p({1, 1, 1}, -1, 5);
    Schedule sched;
    sched.p_ch = {0, 0, 0};
    sched.p_dis = {0, 0, 0};
    for (int t = 1; t <= 3; ++t) sched.soe.push_back(std::pow(0.9, t) * 50);
    CHECK(validate_schedule(s, p, sched).empty());
  }

  TEST_CASE("simultaneous charge and discharge is flagged once") {
    StorageSpec s = unit_storage();
    const PriceSeries p({1, 1, 1}, -1, 5);
    Schedule sched;
    sched.p_ch = {0, 0, 0.5};
    sched.p_dis = {0, 0, 0.5};
    sched.soe = {1, 1, 1};
    const auto v = validate_schedule(s, p, sched);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == "complementarity");
    CHECK(v[0].period == 3);
    CHECK(v[0].magnitude == doctest::Approx(0.25));
  }

  TEST_CASE("unit storage discharge by hand") {
    const PriceSeries p({1, 3}, -1, 5);
    Schedule sched;
    sched.p_ch = {0, 0};
    sched.p_dis = {1, 0};
    sched.soe = {0, 0};
    CHECK(validate_schedule(unit_storage(), p, sched).empty());
    sched.soe = {0, 0.5};
    const auto v = validate_schedule(unit_storage(), p, sched);
    REQUIRE(v.size() == 1);
    CHECK(v[0].constraint == "soe_update");
    CHECK(v[0].period == 2);
  }

  TEST_CASE("length mismatch is an input error") {
    const PriceSeries p({1, 3}, -1, 5);
    Schedule sched;
    sched.p_ch = {0};
    sched.p_dis = {0, 0};
    sched.soe = {1, 1};
    CHECK_THROWS_AS(validate_schedule(unit_storage(), p, sched), InputError);
  }

  TEST_CASE("profit by hand") {
    const StorageSpec s = unit_storage();
    Schedule idle{{0, 0}, {0, 0}, {1, 1}};
    CHECK(profit_of(s, PriceSeries({1, 3}, -1, 5), idle) == 0.0);
    Schedule sell{{0, 0}, {0, 1}, {1, 0}};
    CHECK(profit_of(s, PriceSeries({1, 3}, -1, 5), sell) == doctest::Approx(3.0));
    Schedule buy{{1, 0}, {0, 0}, {2, 2}};
    CHECK(profit_of(s, PriceSeries({-5, 0}, -10, 5), buy) == doctest::Approx(5.0));
  }

  TEST_CASE("propagate_soe") {
    StorageSpec s = unit_storage();
    const std::vector<double> zero(10, 0.0);
    CHECK(propagate_soe(s, zero, zero, 0, 10, 1.5) == 1.5);
    s.rho = 0.99;
    CHECK(propagate_soe(s, zero, zero, 0, 10, 50) == doctest::Approx(50 * std::pow(0.99, 10)));
    CHECK_THROWS_AS(propagate_soe(s, zero, zero, 3, 2, 1), InputError);
    CHECK_THROWS_AS(propagate_soe(s, zero, zero, 0, 11, 1), InputError);

    s = StorageSpec{0, 10, 2, 3, 0.8, 0.7, 0.95, 4, 0.5};
    const std::vector<double> pc = {1.5, 0};
    const std::vector<double> pd = {0, 2};
    const double one = s.rho * 4 + s.dt * s.eta_ch * 1.5;
    CHECK(propagate_soe(s, pc, pd, 0, 1, 4) == doctest::Approx(one));
  }

  TEST_CASE("propagate_soe telescopes") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0, 1);
    for (int it = 0; it < 100; ++it) {
      StorageSpec s{0, 10, 2, 2, 0.5 + 0.5 * u(rng), 0.5 + 0.5 * u(rng), 0.9 + 0.1 * u(rng), 5, 1};
      std::vector<double> pc(12), pd(12);
      for (std::size_t k = 0; k < 12; ++k) {
        (u(rng) < 0.5 ? pc[k] : pd[k]) = 2 * u(rng);
      }
      const std::size_t t1 = rng() % 4, t2 = t1 + rng() % 4, t3 = t2 + rng() % 5;
      const double direct = propagate_soe(s, pc, pd, t1, t3, 3.0);
      const double composed = propagate_soe(s, pc, pd, t2, t3, propagate_soe(s, pc, pd, t1, t2, 3.0));
      CHECK(composed == doctest::Approx(direct).epsilon(1e-9));
      // closed form with powers of rho
      double closed = std::pow(s.rho, double(t3 - t1)) * 3.0;
      for (std::size_t k = t1 + 1; k <= t3; ++k) {
        closed += s.dt * std::pow(s.rho, double(t3 - k)) * (s.eta_ch * pc[k - 1] - pd[k - 1] / s.eta_dis);
      }
      CHECK(direct == doctest::Approx(closed).epsilon(1e-9));
    }
  }

  TEST_CASE("accepted schedules satisfy the constraints re-derived") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    const StorageSpec s{1, 9, 2, 3, 0.9, 0.8, 0.98, 5, 1};
    int accepted = 0;
    for (int it = 0; it < 300; ++it) {
      Schedule sched;
      double prev = s.s_init;
      std::vector<double> c;
      for (int t = 0; t < 6; ++t) {
        const double pc = u(rng) < 0.5 ? 2.2 * u(rng) : 0.0;
        const double pd = pc == 0.0 ? 3.2 * u(rng) : 0.0;
        prev = s.rho * prev + s.dt * (s.eta_ch * pc - pd / s.eta_dis);
        sched.p_ch.push_back(pc);
        sched.p_dis.push_back(pd);
        sched.soe.push_back(prev);
        c.push_back(0.1);
      }
      const PriceSeries p(c, -1, 1);
      if (!validate_schedule(s, p, sched).empty()) continue;
      ++accepted;
      for (std::size_t t = 0; t < 6; ++t) {
        CHECK(sched.p_ch[t] <= s.p_ch_max + 1e-9);
        CHECK(sched.p_dis[t] <= s.p_dis_max + 1e-9);
        CHECK(sched.soe[t] >= s.s_min - 1e-6);
        CHECK(sched.soe[t] <= s.s_max + 1e-6);
      }
    }
    CHECK(accepted > 10);
  }
}
