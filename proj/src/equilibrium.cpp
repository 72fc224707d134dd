#include "tollane/equilibrium.hpp"

#include <algorithm>
#include <cmath>

#include "tollane/numeric.hpp"

namespace tollane {

namespace {

struct LaneChoice {
  double base = 0.0;   // fixed lane-1 effective load, including pinned classes
  double total = 0.0;  // sum of all effective demands
  DecisionMap<double> honest{};          // honest vehicle demand
  DecisionMap<double> free_effective{};  // honest effective demand of unpinned classes
};

LaneChoice setup(const Scenario& scenario, const PinnedClasses& pinned) {
  const auto& eq = scenario.effective();
  LaneChoice lc;
  lc.base = scenario.fixed_lane1_load();
  lc.total = scenario.total_effective_demand();
  lc.honest = scenario.honest_vehicle_demand();
  for (VehicleClass c : kDecisionClasses) {
    const std::size_t i = index_of(c);
    const double effective = eq.weight(c) * lc.honest[i];
    if (pinned[i]) {
      lc.base += effective;
    } else {
      lc.free_effective[i] = effective;
    }
  }
  lc.base = std::min(lc.base, lc.total);
  return lc;
}

FlowDistribution fill_lane1(const Scenario& scenario, const LaneChoice& lc,
                            const PinnedClasses& pinned, double budget,
                            const DecisionMap<VehicleClass>& order) {
  const auto& eq = scenario.effective();
  DecisionMap<double> lane1{};
  double remaining = std::max(budget, 0.0);
  for (VehicleClass c : order) {
    const std::size_t i = index_of(c);
    if (pinned[i]) {
      lane1[i] = lc.honest[i];
      continue;
    }
    const double take = std::min(remaining, lc.free_effective[i]);
    lane1[i] = take >= lc.free_effective[i] ? lc.honest[i] : take / eq.weight(c);
    remaining -= take;
  }
  return FlowDistribution::from_lane1(lane1, lc.honest);
}

FlowDistribution uniform_corner(const LaneChoice& lc, const PinnedClasses& pinned, bool all_lane1) {
  DecisionMap<double> lane1{};
  for (std::size_t i = 0; i < 3; ++i) lane1[i] = (all_lane1 || pinned[i]) ? lc.honest[i] : 0.0;
  return FlowDistribution::from_lane1(lane1, lc.honest);
}

UniquenessThresholds thresholds_for(const Scenario& scenario, const LaneChoice& lc) {
  const auto& delays = scenario.delays();
  return {delays.lane2(lc.total - lc.base) - delays.lane1(lc.base),
          delays.lane2(0.0) - delays.lane1(lc.total)};
}

// Tolls within round-off of a threshold take the unique corner.
bool at_or_above(double tau, double threshold) {
  return tau >= threshold - 1e-12 * std::max(1.0, std::abs(threshold));
}
bool at_or_below(double tau, double threshold) {
  return tau <= threshold + 1e-12 * std::max(1.0, std::abs(threshold));
}

double interior_root(const Scenario& scenario, const LaneChoice& lc, double tau) {
  const auto& delays = scenario.delays();
  const auto gap = [&](double phi) {
    return delays.lane1(phi) + tau - delays.lane2(lc.total - phi);
  };
  return numeric::bisect_increasing(gap, lc.base, lc.total);
}

}  // namespace

std::string_view kind_name(EquilibriumKind kind) {
  switch (kind) {
    case EquilibriumKind::UniqueAllLane2: return "unique_all_lane2";
    case EquilibriumKind::UniqueAllLane1: return "unique_all_lane1";
    case EquilibriumKind::UniqueSingleClassSplit: return "unique_single_class_split";
    case EquilibriumKind::Simplex: return "simplex";
  }
  return "?";
}

UniquenessThresholds uniqueness_thresholds(const Scenario& scenario, const PinnedClasses& pinned) {
  return thresholds_for(scenario, setup(scenario, pinned));
}

int active_decision_classes(const Scenario& scenario, const PinnedClasses& pinned) {
  const LaneChoice lc = setup(scenario, pinned);
  return static_cast<int>(std::count_if(lc.free_effective.begin(), lc.free_effective.end(),
                                        [](double e) { return e > 0.0; }));
}

double solve_phi1_star(const Scenario& scenario, const PinnedClasses& pinned) {
  const double tau = scenario.uniform_toll();
  const LaneChoice lc = setup(scenario, pinned);
  const UniquenessThresholds th = thresholds_for(scenario, lc);
  if (at_or_above(tau, th.tau_high) || at_or_below(tau, th.tau_low)) {
    throw NoInteriorRoot("toll lies outside (tau_low, tau_high); the equilibrium is a corner");
  }
  return interior_root(scenario, lc, tau);
}

EquilibriumResult solve_equilibrium(const Scenario& scenario, const PinnedClasses& pinned) {
  if (!scenario.has_uniform_toll()) {
    throw std::invalid_argument("solve_equilibrium needs a uniform toll; use the differentiated solver");
  }
  const double tau = scenario.uniform_toll();
  const LaneChoice lc = setup(scenario, pinned);

  EquilibriumResult result;
  result.thresholds = thresholds_for(scenario, lc);

  if (at_or_above(tau, result.thresholds.tau_high)) {
    result.kind = EquilibriumKind::UniqueAllLane2;
    result.phi_1_star = lc.base;
    result.best = result.worst = uniform_corner(lc, pinned, false);
  } else if (at_or_below(tau, result.thresholds.tau_low)) {
    result.kind = EquilibriumKind::UniqueAllLane1;
    result.phi_1_star = lc.total;
    result.best = result.worst = uniform_corner(lc, pinned, true);
  } else {
    result.phi_1_star = interior_root(scenario, lc, tau);
    const double budget = result.phi_1_star - lc.base;
    const auto& eq = scenario.effective();
    result.best = fill_lane1(scenario, lc, pinned, budget, mobility_order(eq, true));
    result.worst = fill_lane1(scenario, lc, pinned, budget, mobility_order(eq, false));
    result.kind = active_decision_classes(scenario, pinned) <= 1
                      ? EquilibriumKind::UniqueSingleClassSplit
                      : EquilibriumKind::Simplex;
  }
  result.simplex_budget = result.phi_1_star - lc.base;
  result.j_best = total_commuter_delay(result.best, scenario);
  result.j_worst = total_commuter_delay(result.worst, scenario);
  return result;
}

VerificationReport verify_equilibrium(const FlowDistribution& flow, const Scenario& scenario,
                                      double tol, const PinnedClasses& pinned) {
  VerificationReport report;
  const DecisionMap<double> honest = scenario.honest_vehicle_demand();
  report.conserves = true;
  for (std::size_t i = 0; i < 3; ++i) {
    const double scale = std::max(1.0, honest[i]);
    if (flow.lane1[i] < -1e-12 * scale || flow.lane2[i] < -1e-12 * scale ||
        std::abs(flow.lane1[i] + flow.lane2[i] - honest[i]) > 1e-9 * scale) {
      report.conserves = false;
    }
  }

  report.phi = effective_flows(flow, scenario.effective(), scenario.misbehavior());
  report.costs = lane_costs(report.phi, scenario.class_tolls(), scenario.delays());

  report.ok = report.conserves;
  for (std::size_t i = 0; i < 3; ++i) {
    if (pinned[i]) continue;
    const double diff = report.costs.lane1[i] - report.costs.lane2;
    report.lane1_violation[i] = flow.lane1[i] * diff;
    report.lane2_violation[i] = -flow.lane2[i] * diff;
    if (report.lane1_violation[i] > tol || report.lane2_violation[i] > tol) report.ok = false;
  }
  return report;
}

}  // namespace tollane
