#pragma once

// Resilience of lane delays to vehicles that ride lane 1 without paying:
// analytic regions of misbehaving proportions over which the honest split
// class absorbs the perturbation, the sign of the resulting change in total
// commuter delay, and empirical sweeps over a misbehaving proportion.

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tollane/core.hpp"

namespace tollane {

class NoSplitClass : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Closed interval of one class's misbehaving proportion; empty when lo > hi.
struct AlphaInterval {
  double lo = 0.0;
  double hi = 1.0;
  bool empty() const { return lo > hi; }
  bool contains(double alpha, double slack = 1e-12) const {
    return !empty() && alpha >= lo - slack && alpha <= hi + slack;
  }
};

struct SecondaryRegion {
  VehicleClass g_minus = VehicleClass::HvLo;
  double phi_tilde = 0.0;
  // lower <= sum of delta[p] * alpha[p] over p outside the classes cheaper
  // than g_minus <= upper.  `lower` is evaluated at alpha[g_minus] = 0; it
  // rises by delta[g_minus] * alpha[g_minus] otherwise.
  double lower = 0.0;
  double upper = 0.0;
  std::optional<AlphaInterval> alpha;  // single misbehaving class only
};

struct ResilienceReport {
  VehicleClass split_class = VehicleClass::HvLo;  // g, at zero misbehavior
  std::vector<VehicleClass> q_minus;              // toll below tau[g]
  std::vector<VehicleClass> q_plus;               // toll above tau[g]
  std::vector<VehicleClass> misbehaving;          // M
  double phi_1_star = 0.0;
  // Bound on the sum of delta[p] * alpha[p] over p outside q_minus.
  double primary_upper = 0.0;
  std::optional<AlphaInterval> primary_alpha;  // single misbehaving class only
  std::vector<SecondaryRegion> secondary;      // by descending toll of g_minus
};

// M is {misbehaving_class} when given, otherwise the classes with a positive
// proportion in the scenario.  Throws NoSplitClass when no class uses both
// lanes at zero misbehavior.
ResilienceReport primary_resilient_region(const Scenario& scenario,
                                          std::optional<VehicleClass> misbehaving_class = {});

// Fills report.secondary (empty when q_minus is empty) and returns it.
const std::vector<SecondaryRegion>& secondary_resilient_regions(ResilienceReport& report,
                                                                 const Scenario& scenario);

enum class DelayVariation { Unchanged, Increasing, Decreasing, Mixed };

std::string_view variation_name(DelayVariation v);

// Sign of J(alpha) - J(0) inside a region.  Uses the primary region's split
// class, or g_minus of report.secondary[*secondary_index].
DelayVariation classify_delay_variation(const ResilienceReport& report, const Scenario& scenario,
                                        std::optional<std::size_t> secondary_index = {});

struct MisbehaviorRow {
  double alpha = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double j = 0.0;
  bool in_region = false;
  std::string_view region;  // "primary", "secondary" or "uncharacterized"
};

struct MisbehaviorSweep {
  VehicleClass swept = VehicleClass::HvLo;
  std::optional<ResilienceReport> report;  // absent when there is no split class
  std::vector<MisbehaviorRow> rows;        // alpha strictly increasing
};

// Only the swept class misbehaves.  Throws std::invalid_argument for alpha
// outside [0, 1].
MisbehaviorSweep sweep_misbehavior(const Scenario& scenario, VehicleClass swept,
                                   std::span<const double> alpha_grid);

}  // namespace tollane
