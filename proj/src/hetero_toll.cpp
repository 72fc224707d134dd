#include "tollane/hetero_toll.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tollane/equilibrium.hpp"
#include "tollane/numeric.hpp"

namespace tollane {

namespace {

// Slack on cost comparisons, in delay units.  Absorbs round-off when a toll
// level coincides with the cost gap at a load boundary.
constexpr double kGapEps = 1e-10;

}  // namespace

std::string_view assignment_name(LaneAssignment a) {
  switch (a) {
    case LaneAssignment::Lane1: return "lane1";
    case LaneAssignment::Lane2: return "lane2";
    case LaneAssignment::Split: return "split";
  }
  return "?";
}

HeteroEquilibrium solve_hetero_equilibrium(const Scenario& scenario) {
  const auto& eq = scenario.effective();
  const auto& delays = scenario.delays();
  const DecisionMap<double> tolls = scenario.class_tolls();
  const DecisionMap<double> honest = scenario.honest_vehicle_demand();
  const double base = scenario.fixed_lane1_load();
  const double total = scenario.total_effective_demand();

  DecisionMap<double> effective{};
  std::vector<double> levels;
  for (VehicleClass c : kDecisionClasses) {
    const std::size_t i = index_of(c);
    effective[i] = eq.weight(c) * honest[i];
    if (effective[i] > 0.0) levels.push_back(tolls[i]);
  }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  // Lane-1 load when every active class with toll below (or up to) `level`
  // rides lane 1.
  const auto load = [&](double level, bool inclusive) {
    double phi = base;
    for (std::size_t i = 0; i < 3; ++i) {
      if (effective[i] > 0.0 && (tolls[i] < level || (inclusive && tolls[i] == level))) {
        phi += effective[i];
      }
    }
    return std::min(phi, total);
  };
  const auto gap = [&](double phi) { return delays.lane2(total - phi) - delays.lane1(phi); };

  HeteroEquilibrium result;
  DecisionMap<double> lane1{};
  std::optional<double> split_level;
  for (double level : levels) {
    const double lo = load(level, false);
    const double hi = load(level, true);
    if (gap(lo) >= level - kGapEps && level >= gap(hi) - kGapEps) {
      split_level = level;
      result.phi_1 = numeric::bisect_increasing(
          [&](double phi) { return delays.lane1(phi) + level - delays.lane2(total - phi); }, lo, hi);
      for (std::size_t i = 0; i < 3; ++i) {
        if (effective[i] > 0.0 && tolls[i] < level) lane1[i] = honest[i];
      }
      double remaining = result.phi_1 - lo;
      int tied = 0;
      for (VehicleClass c : mobility_order(eq, true)) {
        const std::size_t i = index_of(c);
        if (tolls[i] != level || !(effective[i] > 0.0)) continue;
        ++tied;
        const double take = std::clamp(remaining, 0.0, effective[i]);
        lane1[i] = take >= effective[i] ? honest[i] : take / eq.weight(c);
        if (!result.split_class && take < effective[i]) result.split_class = c;
        remaining -= take;
      }
      if (!result.split_class) {
        // Budget exactly exhausted: report the last class of the tie.
        for (VehicleClass c : mobility_order(eq, false)) {
          if (tolls[index_of(c)] == level && effective[index_of(c)] > 0.0) {
            result.split_class = c;
            break;
          }
        }
      }
      result.is_unique = tied <= 1;
      break;
    }
  }

  if (!split_level) {
    // No level splits: the equilibrium sits between two consecutive levels.
    const std::size_t count = levels.size();
    std::size_t chosen = 0;
    double best_violation = INFINITY;
    for (std::size_t k = 0; k <= count; ++k) {
      const double phi = k == 0 ? base : load(levels[k - 1], true);
      const double g = gap(phi);
      const double below = k == 0 ? 0.0 : std::max(0.0, levels[k - 1] - g);
      const double above = k == count ? 0.0 : std::max(0.0, g - levels[k]);
      if (below + above < best_violation) {
        best_violation = below + above;
        chosen = k;
        if (best_violation <= kGapEps) break;
      }
    }
    result.phi_1 = chosen == 0 ? base : load(levels[chosen - 1], true);
    for (std::size_t i = 0; i < 3; ++i) {
      if (effective[i] > 0.0 && chosen > 0 && tolls[i] <= levels[chosen - 1]) lane1[i] = honest[i];
    }
    result.is_unique = true;
  }

  const double g = gap(result.phi_1);
  for (std::size_t i = 0; i < 3; ++i) {
    LaneAssignment& a = result.lane_assignment[i];
    if (!(effective[i] > 0.0)) {
      a = tolls[i] <= g ? LaneAssignment::Lane1 : LaneAssignment::Lane2;
    } else if (split_level && tolls[i] == *split_level) {
      a = LaneAssignment::Split;
    } else {
      a = lane1[i] > 0.0 ? LaneAssignment::Lane1 : LaneAssignment::Lane2;
    }
  }

  result.flow = FlowDistribution::from_lane1(lane1, honest);
  result.d1 = delays.lane1(result.phi_1);
  result.d2 = delays.lane2(total - result.phi_1);
  result.j = total_commuter_delay(result.flow, scenario);
  return result;
}

TollDifferentiation differentiate_tolls(const Scenario& scenario, double tau_star,
                                        double phi_1_star, const DifferentiationOptions& opts) {
  if (!std::isfinite(tau_star) || !(tau_star > 0.0)) {
    throw NotApplicable("tau_star must be positive to be differentiated");
  }
  for (double a : scenario.misbehavior()) {
    if (a > 0.0) throw std::invalid_argument("toll differentiation assumes no misbehavior");
  }
  TollDifferentiation out;
  out.tau_minus = opts.tau_minus.value_or(tau_star / 2.0);
  out.tau_plus = opts.tau_plus.value_or(2.0 * tau_star);
  if (!(out.tau_minus > 0.0 && out.tau_minus < tau_star && tau_star < out.tau_plus) ||
      !std::isfinite(out.tau_plus)) {
    throw std::invalid_argument("differentiation needs 0 < tau_minus < tau_star < tau_plus");
  }

  if (solve_equilibrium(scenario.with_toll(UniformToll{tau_star})).kind != EquilibriumKind::Simplex) {
    throw NotApplicable("tau_star yields a unique equilibrium; nothing to differentiate");
  }

  const auto& eq = scenario.effective();
  const auto delta = [&](VehicleClass c) { return at(eq.effective_demand, c); };
  // Boundary cases include equality; the slack absorbs root round-off.
  const auto within = [&](double bound) {
    return phi_1_star <= bound + 1e-9 * std::max(1.0, std::abs(bound));
  };
  const double ts = tau_star;
  const double tm = out.tau_minus;
  const double tp = out.tau_plus;
  const double av_ho = delta(VehicleClass::AvHo);
  const double hv_ho = delta(VehicleClass::HvHo);
  const double av_lo = delta(VehicleClass::AvLo);

  if (at(eq.mobility, VehicleClass::HvHo) <= at(eq.mobility, VehicleClass::AvLo)) {
    if (within(av_lo + av_ho)) {
      out.tolls.tau = {tp, tp, ts};
      out.case_label = "1a";
    } else if (within(hv_ho + av_lo + av_ho)) {
      out.tolls.tau = {tp, ts, tm};
      out.case_label = "1b";
    } else {
      out.tolls.tau = {ts, tm, tm};
      out.case_label = "1c";
    }
  } else {
    if (within(hv_ho + av_ho)) {
      out.tolls.tau = {tp, ts, tp};
      out.case_label = "2a";
    } else if (within(av_lo + hv_ho + av_ho)) {
      out.tolls.tau = {tp, tm, ts};
      out.case_label = "2b";
    } else {
      out.tolls.tau = {ts, tm, tm};
      out.case_label = "2c";
    }
  }
  return out;
}

TollDifferentiation differentiate_tolls(const Scenario& scenario, double tau_star,
                                        const DifferentiationOptions& opts) {
  if (!std::isfinite(tau_star) || !(tau_star > 0.0)) {
    throw NotApplicable("tau_star must be positive to be differentiated");
  }
  const EquilibriumResult eq = solve_equilibrium(scenario.with_toll(UniformToll{tau_star}));
  return differentiate_tolls(scenario, tau_star, eq.phi_1_star, opts);
}

}  // namespace tollane
