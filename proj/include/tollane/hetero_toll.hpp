#pragma once

// Lane choice under class-specific tolls (misbehavior aware), and the
// two-step differentiation that turns a uniform toll with a simplex of
// equilibria into a toll vector with a single best-case equilibrium.

#include <optional>
#include <stdexcept>
#include <string_view>

#include "tollane/core.hpp"

namespace tollane {

enum class LaneAssignment { Lane1, Lane2, Split };

std::string_view assignment_name(LaneAssignment a);

struct HeteroEquilibrium {
  double phi_1 = 0.0;
  // Class using both lanes.  With several classes tied at the split toll this
  // is the one left partially loaded by the representative flow.
  std::optional<VehicleClass> split_class;
  DecisionMap<LaneAssignment> lane_assignment{};
  // Honest vehicles only; misbehaving vehicles sit on lane 1 on top of this.
  FlowDistribution flow;
  bool is_unique = true;
  double d1 = 0.0;
  double d2 = 0.0;
  double j = 0.0;
};

// Works for uniform tolls too (every class then shares one toll level).
HeteroEquilibrium solve_hetero_equilibrium(const Scenario& scenario);

class NotApplicable : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct DifferentiationOptions {
  std::optional<double> tau_minus;  // default tau_star / 2
  std::optional<double> tau_plus;   // default 2 * tau_star
};

struct TollDifferentiation {
  TollVector tolls;
  std::string_view case_label;  // "1a" ... "2c"
  double tau_minus = 0.0;
  double tau_plus = 0.0;
};

// phi_1_star is the lane-1 effective flow of the uniform equilibrium at
// tau_star.  Throws NotApplicable when tau_star does not produce a simplex of
// equilibria, and std::invalid_argument for misbehavior or bad tau_minus /
// tau_plus (0 < tau_minus < tau_star < tau_plus is required).
TollDifferentiation differentiate_tolls(const Scenario& scenario, double tau_star,
                                        double phi_1_star,
                                        const DifferentiationOptions& opts = {});

// Same, solving the uniform equilibrium at tau_star first.
TollDifferentiation differentiate_tolls(const Scenario& scenario, double tau_star,
                                        const DifferentiationOptions& opts = {});

}  // namespace tollane
