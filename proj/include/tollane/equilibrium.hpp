#pragma once

// Selfish lane-choice equilibrium under a uniform toll: uniqueness test,
// interior root of the cost balance, and the best-/worst-case vertices of the
// equilibrium simplex.

#include <stdexcept>

#include "tollane/core.hpp"

namespace tollane {

inline constexpr double kDefaultVerifyTolerance = 1e-8;

// Classes forced onto lane 1 without a toll (lane policies such as HOVL/DLA).
// Pinned classes leave the decision set and join the fixed lane-1 load.
using PinnedClasses = DecisionMap<bool>;

class NoInteriorRoot : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct UniquenessThresholds {
  // Unique with every decision vehicle on lane 2 when tau >= tau_high.  Both
  // comparisons allow 1e-12 relative round-off.
  double tau_high = 0.0;
  // Unique with every decision vehicle on lane 1 when tau <= tau_low.
  double tau_low = 0.0;
};

UniquenessThresholds uniqueness_thresholds(const Scenario& scenario,
                                           const PinnedClasses& pinned = {});

// Number of (unpinned) decision classes with positive honest demand.
int active_decision_classes(const Scenario& scenario, const PinnedClasses& pinned = {});

// Lane-1 effective flow phi at which D1(phi) + tau = D2(total - phi).
// Requires tau_low < tau < tau_high; throws NoInteriorRoot otherwise.
double solve_phi1_star(const Scenario& scenario, const PinnedClasses& pinned = {});

enum class EquilibriumKind { UniqueAllLane2, UniqueAllLane1, UniqueSingleClassSplit, Simplex };

std::string_view kind_name(EquilibriumKind kind);

struct EquilibriumResult {
  EquilibriumKind kind = EquilibriumKind::UniqueAllLane2;
  UniquenessThresholds thresholds;
  double phi_1_star = 0.0;
  // phi_1_star minus the fixed lane-1 load: effective lane-1 flow shared by
  // the decision classes.
  double simplex_budget = 0.0;
  FlowDistribution best;
  FlowDistribution worst;
  double j_best = 0.0;
  double j_worst = 0.0;

  bool is_unique() const { return kind != EquilibriumKind::Simplex; }
};

// Always returns an equilibrium.  For the simplex case the best vertex loads
// lane 1 in descending mobility degree, the worst in ascending order.
// Throws std::invalid_argument for differentiated tolls.
EquilibriumResult solve_equilibrium(const Scenario& scenario, const PinnedClasses& pinned = {});

struct VerificationReport {
  bool ok = false;
  bool conserves = false;
  // f1[p] * (C1[p] - C2) and f2[p] * (C2 - C1[p]); positive parts violate.
  DecisionMap<double> lane1_violation{};
  DecisionMap<double> lane2_violation{};
  EffectiveFlows phi;
  LaneCosts costs;
};

// Checks the equilibrium inequalities for every decision class, with costs
// computed from the flow itself.  Uses the scenario's tolls (uniform or
// per-class) and misbehavior proportions; pinned classes are not checked.
VerificationReport verify_equilibrium(const FlowDistribution& flow, const Scenario& scenario,
                                      double tol = kDefaultVerifyTolerance,
                                      const PinnedClasses& pinned = {});

}  // namespace tollane
