#include <doctest.h>

#include <cmath>

#include "scenarios.hpp"
#include "tollane/hetero_toll.hpp"
#include "tollane/policy_design.hpp"
#include "tollane/resilience.hpp"

using namespace tollane;

namespace {

HeteroEquilibrium with_alpha(const Scenario& s, VehicleClass c, double alpha) {
  DecisionMap<double> m{};
  m[index_of(c)] = alpha;
  return solve_hetero_equilibrium(s.with_misbehavior(m));
}

}  // namespace

TEST_SUITE("resilience") {

TEST_CASE("primary region for HV_LO") {
  const Scenario s = fixtures::example5();
  const ResilienceReport r = primary_resilient_region(s, VehicleClass::HvLo);
  CHECK(r.split_class == VehicleClass::HvHo);
  CHECK(r.q_minus == std::vector<VehicleClass>{VehicleClass::AvLo});
  CHECK(r.q_plus == std::vector<VehicleClass>{VehicleClass::HvLo});
  CHECK(r.misbehaving == std::vector<VehicleClass>{VehicleClass::HvLo});
  CHECK(std::abs(r.phi_1_star - 30.0) <= 1e-8);
  // 30 - 3 (AV_HO) - 9 (AV_LO)
  CHECK(r.primary_upper == doctest::Approx(18.0));
  REQUIRE(r.primary_alpha.has_value());
  CHECK(r.primary_alpha->lo == 0.0);
  CHECK(std::abs(r.primary_alpha->hi - 0.5) <= 1e-8);
  CHECK(classify_delay_variation(r, s) == DelayVariation::Increasing);
}

TEST_CASE("primary bound is tight") {
  const Scenario s = fixtures::example5();
  const HeteroEquilibrium base = with_alpha(s, VehicleClass::HvLo, 0.0);
  const HeteroEquilibrium inside = with_alpha(s, VehicleClass::HvLo, 0.5);
  const HeteroEquilibrium outside = with_alpha(s, VehicleClass::HvLo, 0.51);
  CHECK(inside.d1 == doctest::Approx(base.d1).epsilon(1e-12));
  CHECK(inside.d2 == doctest::Approx(base.d2).epsilon(1e-12));
  CHECK(outside.d1 > base.d1 + 1e-6);
  CHECK(inside.j > base.j);
}

TEST_CASE("other classes have their own primary bound") {
  const Scenario s = fixtures::example5();
  const ResilienceReport hv_ho = primary_resilient_region(s, VehicleClass::HvHo);
  CHECK(hv_ho.primary_alpha->hi == doctest::Approx(0.75));
  // AV_LO is cheaper than the split class and already on lane 1
  const ResilienceReport av_lo = primary_resilient_region(s, VehicleClass::AvLo);
  CHECK(av_lo.primary_alpha->lo == 0.0);
  CHECK(av_lo.primary_alpha->hi == 1.0);
  CHECK(classify_delay_variation(av_lo, s) == DelayVariation::Unchanged);
  for (double a : {0.3, 1.0}) {
    CHECK(with_alpha(s, VehicleClass::AvLo, a).j == doctest::Approx(with_alpha(s, VehicleClass::AvLo, 0).j));
  }
}

TEST_CASE("secondary region via AV_LO") {
  const Scenario s = fixtures::example5();
  ResilienceReport r = primary_resilient_region(s, VehicleClass::HvLo);
  const auto& sec = secondary_resilient_regions(r, s);
  REQUIRE(sec.size() == 1);
  CHECK(sec[0].g_minus == VehicleClass::AvLo);
  CHECK(std::abs(sec[0].phi_tilde - 33.5) <= 1e-8);
  CHECK(sec[0].upper == doctest::Approx(30.5));
  CHECK(sec[0].lower == doctest::Approx(21.5));
  REQUIRE(sec[0].alpha.has_value());
  CHECK(std::abs(sec[0].alpha->lo - 0.597) <= 1e-3);
  CHECK(std::abs(sec[0].alpha->hi - 0.847) <= 1e-3);
  CHECK(classify_delay_variation(r, s, 0) == DelayVariation::Increasing);
  const HeteroEquilibrium a = with_alpha(s, VehicleClass::HvLo, 0.65);
  const HeteroEquilibrium b = with_alpha(s, VehicleClass::HvLo, 0.8);
  CHECK(a.split_class == VehicleClass::AvLo);
  CHECK(a.d1 == doctest::Approx(b.d1).epsilon(1e-12));
  CHECK(a.phi_1 == doctest::Approx(33.5));
  CHECK(b.j > a.j);
}

TEST_CASE("secondary interval is clipped to [0, 1]") {
  const Scenario s = fixtures::example5();
  ResilienceReport r = primary_resilient_region(s, VehicleClass::HvHo);
  const auto& sec = secondary_resilient_regions(r, s);
  REQUIRE(sec.size() == 1);
  CHECK(sec[0].alpha->lo == doctest::Approx(21.5 / 24));
  CHECK(sec[0].alpha->hi == 1.0);
}

TEST_CASE("high-mobility misbehavior lowers total delay") {
  // HV_LO splits; AV_LO (toll 0.3) sits on lane 2
  const Scenario s = fixtures::example5({}, {0.1, 0.05, 0.3});
  const ResilienceReport r = primary_resilient_region(s, VehicleClass::AvLo);
  CHECK(r.split_class == VehicleClass::HvLo);
  CHECK(r.primary_alpha->hi == doctest::Approx(4.0 / 9));
  CHECK(classify_delay_variation(r, s) == DelayVariation::Decreasing);
  CHECK(with_alpha(s, VehicleClass::AvLo, 0.4).j < with_alpha(s, VehicleClass::AvLo, 0.2).j);
}

TEST_CASE("scenario-wide misbehavior set") {
  // The split class misbehaving only swaps honest for dishonest lane-1 users.
  const Scenario s = fixtures::example5({0.1, 0.1, 0.0});
  const ResilienceReport r = primary_resilient_region(s);
  CHECK(r.misbehaving == std::vector<VehicleClass>{VehicleClass::HvLo, VehicleClass::HvHo});
  CHECK_FALSE(r.primary_alpha.has_value());
  CHECK(r.primary_upper == doctest::Approx(18.0));
  CHECK(classify_delay_variation(r, s) == DelayVariation::Increasing);

  // HV_HO splits at phi = 26 with HV_LO and AV_LO both above it
  const Scenario t = fixtures::example5({0.1, 0.0, 0.1}, {0.3, 0.2, 0.35});
  const ResilienceReport q = primary_resilient_region(t);
  CHECK(q.split_class == VehicleClass::HvHo);
  CHECK(q.q_plus.size() == 2);
  CHECK(classify_delay_variation(q, t) == DelayVariation::Mixed);
}

TEST_CASE("no split class") {
  CHECK_THROWS_AS(primary_resilient_region(fixtures::example5({}, {1, 1, 1})), NoSplitClass);
}

TEST_CASE("misbehavior sweep labels") {
  const Scenario s = fixtures::example5();
  const auto grid = linear_grid(0.0, 1.0, 0.01);
  const MisbehaviorSweep sw = sweep_misbehavior(s, VehicleClass::HvLo, grid);
  REQUIRE(sw.report.has_value());
  REQUIRE(sw.rows.size() == 101);
  const auto label = [&](int k) { return sw.rows[static_cast<std::size_t>(k)].region; };
  CHECK(label(0) == "primary");
  CHECK(label(50) == "primary");
  CHECK(label(55) == "uncharacterized");
  CHECK(label(60) == "secondary");
  CHECK(label(84) == "secondary");
  CHECK(label(90) == "uncharacterized");
  CHECK(sw.rows[50].d1 == doctest::Approx(3.3));
  CHECK(sw.rows[50].d2 == doctest::Approx(3.42));
  CHECK_THROWS_AS(sweep_misbehavior(s, VehicleClass::HvLo, std::vector<double>{0.5, 1.2}),
                  std::invalid_argument);
}

TEST_CASE("alpha interval") {
  const AlphaInterval a{0.2, 0.4};
  CHECK(a.contains(0.2));
  CHECK_FALSE(a.contains(0.41));
  CHECK(AlphaInterval{0.5, 0.4}.empty());
  CHECK(variation_name(DelayVariation::Decreasing) == "decreasing");
}

}
