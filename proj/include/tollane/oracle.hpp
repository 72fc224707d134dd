#pragma once

// Brute-force checks for the analytic solvers.  Everything here works from
// the raw scenario parameters and the lane-choice inequalities on a flow
// grid; nothing calls the solver code.

#include <stdexcept>
#include <vector>

#include "tollane/core.hpp"

namespace tollane::oracle {

struct GridSpec {
  double resolution = 0.05;  // vehicles per unit time, > 0
  // A used lane may cost at most this much more than the other lane.
  double tolerance = 1e-9;
};

class GridTooLarge : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxAxisPoints = 500;

// Every grid flow (lane-1 flow of each decision class in steps of the
// resolution, plus the class's full honest demand) satisfying the per-class
// equilibrium inequalities with the scenario's tolls and misbehavior.
// Lexicographic order in (HV_LO, HV_HO, AV_LO).
std::vector<FlowDistribution> brute_force_equilibria(const Scenario& scenario, const GridSpec& grid);

struct JExtremes {
  double j_min = 0.0;
  double j_max = 0.0;
  FlowDistribution argmin;
  FlowDistribution argmax;
  int points = 0;  // feasible grid points scanned
};

// Scans the flows whose decision-class lane-1 effective flow equals
// phi_1_star minus the fixed lane-1 load.  The last decision class with
// positive demand is solved from that constraint; the others walk the grid.
JExtremes brute_force_j_extremes(const Scenario& scenario, double phi_1_star, const GridSpec& grid);

// Raw formula evaluation, exposed for tests.
double oracle_total_delay(const Scenario& scenario, const FlowDistribution& flow);

}  // namespace tollane::oracle
