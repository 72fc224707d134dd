#pragma once

// One-dimensional design searches built on the uniform-toll equilibrium:
// toll level, occupancy threshold, and lane policy comparison.

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tollane/equilibrium.hpp"

namespace tollane {

enum class DesignObjective { BestCaseJ, WorstCaseJ };

enum class LanePolicy { TollFramework, Hovl, Dla };

std::string_view policy_name(LanePolicy policy);
// HOVL pins HV_HO onto lane 1, DLA pins AV_LO; the toll framework pins nothing.
PinnedClasses pinned_classes(LanePolicy policy);

struct SweepRow {
  double x = 0.0;
  double j_best = 0.0;
  double j_worst = 0.0;
  double phi1 = 0.0;
  bool unique = true;

  double objective(DesignObjective objective) const {
    return objective == DesignObjective::BestCaseJ ? j_best : j_worst;
  }
};

// Rows sorted by the design variable.
struct SweepTable {
  std::vector<SweepRow> rows;
};

class EmptyGrid : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidCarpoolModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// lo, lo + step, ..., with hi included.  Points are computed as lo + k * step
// to avoid accumulating round-off.
std::vector<double> linear_grid(double lo, double hi, double step);

// [0, tau_high + margin_steps * step] for the scenario's toll-framework
// thresholds.
std::vector<double> default_toll_grid(const Scenario& scenario, double step = 0.01,
                                      int margin_steps = 10);

SweepRow evaluate_toll(const Scenario& scenario, double tau,
                       LanePolicy policy = LanePolicy::TollFramework);

// Throws EmptyGrid for an empty grid.
SweepTable sweep_tolls(const Scenario& scenario, std::span<const double> tau_grid,
                       LanePolicy policy = LanePolicy::TollFramework);

struct TollDesign {
  double tau_star = 0.0;
  double objective_value = 0.0;
  SweepTable table;
};

// Grid argmin of the objective (ties toward the smaller toll), refined by a
// golden-section search over the neighbouring grid cells.  The refined point
// replaces the grid point only when it is strictly better.
TollDesign optimize_uniform_toll(const Scenario& scenario, DesignObjective objective,
                                 std::span<const double> tau_grid);

// Carpool-demand model: at occupancy threshold n a commuter carpools with
// probability u(n), non-increasing with values in [0, 1].
struct CarpoolModel {
  std::function<double(double)> probability;
  double d_hv = 0.0;  // human-driven commuter demand
  double d_av = 0.0;  // autonomous commuter demand
  double n_min = 2.0;
  double n_max = 4.0;

  // u(n) = 1 / n
  static CarpoolModel reciprocal(double d_hv, double d_av, double n_min, double n_max);
};

// Scenario for threshold n: HO demands d * u(n), LO demands d * (1 - u(n)),
// n_ho = n and n_lo = 1.  Headway, delays, toll and misbehavior come from the
// template.
Scenario scenario_for_threshold(const CarpoolModel& carpool, const Scenario& tmpl, double n);

struct ThresholdDesign {
  double n_star = 0.0;
  double objective_value = 0.0;
  SweepTable table;
};

// Throws InvalidCarpoolModel if u leaves [0, 1] or increases on the grid, or
// if the grid leaves [n_min, n_max]; EmptyGrid for an empty grid.
ThresholdDesign optimize_occupancy_threshold(const CarpoolModel& carpool, const Scenario& tmpl,
                                             DesignObjective objective,
                                             std::span<const double> n_grid);

std::map<LanePolicy, SweepTable> compare_policies(const Scenario& scenario,
                                                  std::span<const LanePolicy> policies,
                                                  std::span<const double> tau_grid);

}  // namespace tollane
