#include "tollane/policy_design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tollane/numeric.hpp"

namespace tollane {

namespace {

std::vector<double> sorted_grid(std::span<const double> grid) {
  std::vector<double> xs(grid.begin(), grid.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

// First index attaining the minimum, so ties go to the smaller design value.
std::size_t argmin_row(const SweepTable& table, DesignObjective objective) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    if (table.rows[i].objective(objective) < table.rows[best].objective(objective)) best = i;
  }
  return best;
}

}  // namespace

std::string_view policy_name(LanePolicy policy) {
  switch (policy) {
    case LanePolicy::TollFramework: return "toll";
    case LanePolicy::Hovl: return "hovl";
    case LanePolicy::Dla: return "dla";
  }
  return "?";
}

PinnedClasses pinned_classes(LanePolicy policy) {
  PinnedClasses pinned{};
  if (policy == LanePolicy::Hovl) pinned[index_of(VehicleClass::HvHo)] = true;
  if (policy == LanePolicy::Dla) pinned[index_of(VehicleClass::AvLo)] = true;
  return pinned;
}

std::vector<double> linear_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
    throw EmptyGrid("grid needs finite bounds with lo <= hi and a positive step");
  }
  std::vector<double> xs;
  const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  xs.reserve(static_cast<std::size_t>(count) + 2);
  for (long k = 0; k <= count; ++k) xs.push_back(lo + static_cast<double>(k) * step);
  if (hi - xs.back() > 1e-9 * step) xs.push_back(hi);
  return xs;
}

std::vector<double> default_toll_grid(const Scenario& scenario, double step, int margin_steps) {
  const double tau_high = uniqueness_thresholds(scenario).tau_high;
  return linear_grid(0.0, std::max(0.0, tau_high) + margin_steps * step, step);
}

SweepRow evaluate_toll(const Scenario& scenario, double tau, LanePolicy policy) {
  const Scenario tolled = scenario.with_toll(UniformToll{tau});
  const EquilibriumResult eq = solve_equilibrium(tolled, pinned_classes(policy));
  return {tau, eq.j_best, eq.j_worst, eq.phi_1_star, eq.is_unique()};
}

SweepTable sweep_tolls(const Scenario& scenario, std::span<const double> tau_grid, LanePolicy policy) {
  if (tau_grid.empty()) throw EmptyGrid("toll grid is empty");
  SweepTable table;
  for (double tau : sorted_grid(tau_grid)) table.rows.push_back(evaluate_toll(scenario, tau, policy));
  return table;
}

TollDesign optimize_uniform_toll(const Scenario& scenario, DesignObjective objective,
                                 std::span<const double> tau_grid) {
  if (tau_grid.empty()) throw EmptyGrid("toll grid is empty");
  TollDesign design;
  design.table = sweep_tolls(scenario, tau_grid);
  const auto& rows = design.table.rows;
  const std::size_t i = argmin_row(design.table, objective);
  design.tau_star = rows[i].x;
  design.objective_value = rows[i].objective(objective);

  const double lo = rows[i == 0 ? 0 : i - 1].x;
  const double hi = rows[std::min(i + 1, rows.size() - 1)].x;
  if (hi > lo) {
    const auto f = [&](double tau) { return evaluate_toll(scenario, tau).objective(objective); };
    const numeric::Minimum refined = numeric::golden_section_minimize(f, lo, hi, 1e-9 * (hi - lo));
    const double slack = 1e-12 * std::max(1.0, std::abs(design.objective_value));
    if (refined.value < design.objective_value - slack) {
      design.tau_star = refined.x;
      design.objective_value = refined.value;
    }
  }
  return design;
}

CarpoolModel CarpoolModel::reciprocal(double d_hv, double d_av, double n_min, double n_max) {
  return {[](double n) { return 1.0 / n; }, d_hv, d_av, n_min, n_max};
}

Scenario scenario_for_threshold(const CarpoolModel& carpool, const Scenario& tmpl, double n) {
  const double u = carpool.probability(n);
  const CommuterDemand demand({carpool.d_hv * (1.0 - u), carpool.d_hv * u,
                               carpool.d_av * (1.0 - u), carpool.d_av * u});
  return Scenario(demand, OccupancyProfile(1.0, n), tmpl.headway(), tmpl.delays(), tmpl.toll(),
                  tmpl.misbehavior());
}

ThresholdDesign optimize_occupancy_threshold(const CarpoolModel& carpool, const Scenario& tmpl,
                                             DesignObjective objective,
                                             std::span<const double> n_grid) {
  if (n_grid.empty()) throw EmptyGrid("occupancy grid is empty");
  if (!carpool.probability) throw InvalidCarpoolModel("carpool model has no probability function");
  const std::vector<double> ns = sorted_grid(n_grid);
  const double eps = 1e-12;
  double previous_u = 0.0;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    const double n = ns[k];
    if (n < carpool.n_min - eps || n > carpool.n_max + eps) {
      throw InvalidCarpoolModel("occupancy grid leaves [n_min, n_max]");
    }
    const double u = carpool.probability(n);
    if (!std::isfinite(u) || u < 0.0 || u > 1.0) {
      throw InvalidCarpoolModel("carpool probability leaves [0, 1] at n = " + std::to_string(n));
    }
    if (k > 0 && u > previous_u + eps) {
      throw InvalidCarpoolModel("carpool probability increases at n = " + std::to_string(n));
    }
    previous_u = u;
  }

  ThresholdDesign design;
  for (double n : ns) {
    const EquilibriumResult eq = solve_equilibrium(scenario_for_threshold(carpool, tmpl, n));
    design.table.rows.push_back({n, eq.j_best, eq.j_worst, eq.phi_1_star, eq.is_unique()});
  }
  const std::size_t i = argmin_row(design.table, objective);
  design.n_star = design.table.rows[i].x;
  design.objective_value = design.table.rows[i].objective(objective);
  return design;
}

std::map<LanePolicy, SweepTable> compare_policies(const Scenario& scenario,
                                                  std::span<const LanePolicy> policies,
                                                  std::span<const double> tau_grid) {
  std::map<LanePolicy, SweepTable> tables;
  for (LanePolicy policy : policies) tables[policy] = sweep_tolls(scenario, tau_grid, policy);
  return tables;
}

}  // namespace tollane
