#include <doctest.h>

#include <cmath>
#include <string>

#include "scenarios.hpp"
#include "tollane/core.hpp"

using namespace tollane;

TEST_SUITE("core") {

TEST_CASE("effective quantities of configuration A") {
  const Scenario s = fixtures::example1a();
  const auto& eq = s.effective();
  // d_v = d / n, delta = weight * d_v
  CHECK(eq.vehicle_demand == ClassMap<double>{5, 1, 3, 1});
  CHECK(eq.effective_demand == ClassMap<double>{5, 1, 1.5, 0.5});
  CHECK(s.total_effective_demand() == doctest::Approx(8.0));
  // nu = commuters per unit of effective flow
  for (VehicleClass c : kAllClasses) {
    CHECK(at(eq.mobility, c) == doctest::Approx(s.demand()[c] / at(eq.effective_demand, c)));
  }
  CHECK(at(eq.mobility, VehicleClass::AvHo) == doctest::Approx(8.0));
}

TEST_CASE("mobility is defined for classes without demand") {
  const Scenario s(CommuterDemand({2, 0, 0, 1}), OccupancyProfile(1, 3), HeadwayRatio(0.25),
                   fixtures::bpr_pair(10), UniformToll{0.1});
  CHECK(at(s.effective().mobility, VehicleClass::HvHo) == doctest::Approx(3.0));
  CHECK(at(s.effective().mobility, VehicleClass::AvLo) == doctest::Approx(4.0));
}

TEST_CASE("BPR delay") {
  const BprDelay d({3.0, 1.0, 2.0, 10.0});
  CHECK(d(0.0) == doctest::Approx(3.0));
  CHECK(d(5.0) == doctest::Approx(3.25));
  CHECK(d(20.0) == doctest::Approx(7.0));
}

TEST_CASE("validation names the violated constraint") {
  const auto make = [](double n_lo, double n_ho, double mu) {
    return Scenario(CommuterDemand({1, 1, 1, 1}), OccupancyProfile(n_lo, n_ho), HeadwayRatio(mu),
                    fixtures::bpr_pair(10), UniformToll{0.5});
  };
  CHECK_THROWS_WITH_AS(make(1, 1, 0.5), "occupancy: n_ho >= 2 violated (n_ho = 1)", InvalidScenario);
  CHECK_THROWS_AS(make(0, 2, 0.5), InvalidScenario);
  CHECK_THROWS_AS(make(1, 2, 1.0), InvalidScenario);
  CHECK_THROWS_AS(make(1, 2, 0.0), InvalidScenario);
  CHECK_THROWS_AS(Scenario(CommuterDemand({0, 0, 0, 0}), OccupancyProfile(1, 2), HeadwayRatio(0.5),
                           fixtures::bpr_pair(10), UniformToll{0.5}),
                  InvalidScenario);
  CHECK_THROWS_AS(Scenario(CommuterDemand({1, -1, 0, 0}), OccupancyProfile(1, 2), HeadwayRatio(0.5),
                           fixtures::bpr_pair(10), UniformToll{0.5}),
                  InvalidScenario);
  CHECK_THROWS_AS(fixtures::example1a(-0.1), InvalidScenario);
  CHECK_THROWS_AS(fixtures::example1a().with_toll(TollVector{{0.1, 0.0, 0.2}}), InvalidScenario);
  CHECK_THROWS_AS(fixtures::example1a().with_misbehavior({0.0, 1.5, 0.0}), InvalidScenario);
  CHECK_THROWS_AS(DelayModel::bpr({3, 0, 1, 10}, {3, 1, 1, 10}), InvalidScenario);
  CHECK_THROWS_AS(DelayModel::bpr({3, 1, 1, 0}, {3, 1, 1, 10}), InvalidScenario);
}

TEST_CASE("uniform toll access") {
  const Scenario s = fixtures::example1a(0.3);
  CHECK(s.has_uniform_toll());
  CHECK(s.uniform_toll() == 0.3);
  CHECK(s.class_tolls() == DecisionMap<double>{0.3, 0.3, 0.3});
  const Scenario t = s.with_toll(TollVector{{0.1, 0.2, 0.3}});
  CHECK_FALSE(t.has_uniform_toll());
  CHECK_THROWS_AS((void)t.uniform_toll(), std::logic_error);
  CHECK(t.class_tolls() == DecisionMap<double>{0.1, 0.2, 0.3});
}

TEST_CASE("misbehaving vehicles join the fixed lane-1 load") {
  const Scenario s = fixtures::example1a().with_misbehavior({0.2, 0.0, 0.5});
  const DecisionMap<double> honest = s.honest_vehicle_demand();
  CHECK(honest[0] == doctest::Approx(4.0));
  CHECK(honest[1] == doctest::Approx(1.0));
  CHECK(honest[2] == doctest::Approx(1.5));
  CHECK(s.fixed_lane1_load() == doctest::Approx(0.5 + 0.2 * 5 + 0.5 * 1.5));
  CHECK(s.total_effective_demand() == doctest::Approx(8.0));
}

TEST_CASE("total commuter delay at the configuration A vertices") {
  const Scenario s = fixtures::example1a();
  const DecisionMap<double> honest = s.honest_vehicle_demand();
  const FlowDistribution best = FlowDistribution::from_lane1({0, 1, 0}, honest);
  const FlowDistribution worst = FlowDistribution::from_lane1({1, 0, 0}, honest);
  CHECK(best.lane2 == DecisionMap<double>{5, 0, 3});
  // lane 1: 1 + 0.5 effective, 8 commuters; lane 2: 6.5 effective, 8 commuters
  CHECK(total_commuter_delay(best, s) == doctest::Approx(8 * 3.15 + 8 * 3.65).epsilon(1e-12));
  CHECK(total_commuter_delay(worst, s) == doctest::Approx(5 * 3.15 + 11 * 3.65).epsilon(1e-12));
  const CommuterSplit split = commuters_by_lane(best, s);
  CHECK(split.lane1 == doctest::Approx(8.0));
  CHECK(split.lane2 == doctest::Approx(8.0));
  const EffectiveFlows phi = effective_flows(best, s.effective());
  CHECK(phi.lane1 == doctest::Approx(1.5));
  CHECK(phi.lane2 == doctest::Approx(6.5));
  const LaneCosts costs = lane_costs(phi, s.class_tolls(), s.delays());
  CHECK(costs.lane1[0] == doctest::Approx(3.65));
  CHECK(costs.lane2 == doctest::Approx(3.65));
}

TEST_CASE("mobility order breaks ties toward HV_HO") {
  // n_ho = 2, mu = 0.5: nu(HV_HO) = nu(AV_LO) = 2
  const Scenario s(CommuterDemand({1, 2, 1, 0}), OccupancyProfile(1, 2), HeadwayRatio(0.5),
                   fixtures::bpr_pair(10), UniformToll{0.1});
  const auto desc = mobility_order(s.effective(), true);
  const auto asc = mobility_order(s.effective(), false);
  CHECK(desc == DecisionMap<VehicleClass>{VehicleClass::HvHo, VehicleClass::AvLo, VehicleClass::HvLo});
  CHECK(asc == DecisionMap<VehicleClass>{VehicleClass::HvLo, VehicleClass::HvHo, VehicleClass::AvLo});
}

TEST_CASE("class names round-trip") {
  for (VehicleClass c : kAllClasses) {
    CHECK(parse_vehicle_class(class_name(c)) == c);
    CHECK(parse_vehicle_class(class_key(c)) == c);
  }
  CHECK_FALSE(parse_vehicle_class("bus").has_value());
}

}
