#include "tollane/resilience.hpp"

#include <algorithm>
#include <cmath>

#include "tollane/hetero_toll.hpp"
#include "tollane/numeric.hpp"

namespace tollane {

namespace {

// Proportions in [0, 1] satisfying every added linear constraint.
class LinearAlpha {
 public:
  // coef * alpha >= rhs
  void at_least(double coef, double rhs) {
    constexpr double eps = 1e-12;
    if (coef > 0.0) {
      range_.lo = std::max(range_.lo, rhs / coef);
    } else if (coef < 0.0) {
      range_.hi = std::min(range_.hi, rhs / coef);
    } else if (rhs > eps * std::max(1.0, std::abs(rhs))) {
      range_ = {1.0, 0.0};
    }
  }
  // coef * alpha <= rhs
  void at_most(double coef, double rhs) { at_least(-coef, -rhs); }
  AlphaInterval result() const { return range_; }

 private:
  AlphaInterval range_{0.0, 1.0};
};

bool contains(const std::vector<VehicleClass>& set, VehicleClass c) {
  return std::find(set.begin(), set.end(), c) != set.end();
}

}  // namespace

ResilienceReport primary_resilient_region(const Scenario& scenario,
                                          std::optional<VehicleClass> misbehaving_class) {
  if (misbehaving_class && !is_decision(*misbehaving_class)) {
    throw std::invalid_argument("AV_HO rides lane 1 for free and cannot misbehave");
  }
  const HeteroEquilibrium honest = solve_hetero_equilibrium(scenario.with_misbehavior({}));
  if (!honest.split_class) {
    throw NoSplitClass("no class uses both lanes without misbehavior; the analytic regions do not apply");
  }
  const auto& eq = scenario.effective();
  const DecisionMap<double> tolls = scenario.class_tolls();

  ResilienceReport report;
  report.split_class = *honest.split_class;
  report.phi_1_star = honest.phi_1;
  const double tau_g = tolls[index_of(report.split_class)];
  for (VehicleClass c : kDecisionClasses) {
    if (c == report.split_class) continue;
    const double t = tolls[index_of(c)];
    if (t < tau_g) report.q_minus.push_back(c);
    if (t > tau_g) report.q_plus.push_back(c);
  }
  if (misbehaving_class) {
    report.misbehaving.push_back(*misbehaving_class);
  } else {
    for (VehicleClass c : kDecisionClasses) {
      if (scenario.misbehavior()[index_of(c)] > 0.0) report.misbehaving.push_back(c);
    }
  }

  report.primary_upper = report.phi_1_star - at(eq.effective_demand, VehicleClass::AvHo);
  for (VehicleClass q : report.q_minus) report.primary_upper -= at(eq.effective_demand, q);

  if (report.misbehaving.size() == 1) {
    const VehicleClass s = report.misbehaving.front();
    LinearAlpha alpha;
    alpha.at_most(contains(report.q_minus, s) ? 0.0 : at(eq.effective_demand, s), report.primary_upper);
    report.primary_alpha = alpha.result();
  }
  return report;
}

const std::vector<SecondaryRegion>& secondary_resilient_regions(ResilienceReport& report,
                                                                 const Scenario& scenario) {
  const auto& eq = scenario.effective();
  const auto& delays = scenario.delays();
  const DecisionMap<double> tolls = scenario.class_tolls();
  const double total = scenario.total_effective_demand();
  const double av_ho = at(eq.effective_demand, VehicleClass::AvHo);

  std::vector<VehicleClass> order = report.q_minus;
  std::stable_sort(order.begin(), order.end(), [&](VehicleClass a, VehicleClass b) {
    return tolls[index_of(a)] > tolls[index_of(b)];
  });

  report.secondary.clear();
  for (VehicleClass g_minus : order) {
    const double tau = tolls[index_of(g_minus)];
    SecondaryRegion region;
    region.g_minus = g_minus;
    region.phi_tilde = numeric::bisect_increasing(
        [&](double phi) { return delays.lane1(phi) + tau - delays.lane2(total - phi); }, 0.0, total);

    std::vector<VehicleClass> cheaper;
    for (VehicleClass q : report.q_minus) {
      if (tolls[index_of(q)] < tau) cheaper.push_back(q);
    }
    region.upper = region.phi_tilde - av_ho;
    for (VehicleClass q : cheaper) region.upper -= at(eq.effective_demand, q);
    const double delta_g = at(eq.effective_demand, g_minus);
    region.lower = region.upper - delta_g;

    if (report.misbehaving.size() == 1) {
      const VehicleClass s = report.misbehaving.front();
      const double k = contains(cheaper, s) ? 0.0 : at(eq.effective_demand, s);
      const double m = s == g_minus ? delta_g : 0.0;
      LinearAlpha alpha;
      alpha.at_least(k - m, region.lower);
      alpha.at_most(k, region.upper);
      region.alpha = alpha.result();
    }
    report.secondary.push_back(region);
  }
  return report.secondary;
}

std::string_view variation_name(DelayVariation v) {
  switch (v) {
    case DelayVariation::Unchanged: return "unchanged";
    case DelayVariation::Increasing: return "increasing";
    case DelayVariation::Decreasing: return "decreasing";
    case DelayVariation::Mixed: return "mixed";
  }
  return "?";
}

DelayVariation classify_delay_variation(const ResilienceReport& report, const Scenario& scenario,
                                        std::optional<std::size_t> secondary_index) {
  const VehicleClass g = secondary_index ? report.secondary.at(*secondary_index).g_minus
                                         : report.split_class;
  const DecisionMap<double> tolls = scenario.class_tolls();
  const auto& nu = scenario.effective().mobility;
  int below = 0;
  int above = 0;
  int equal = 0;
  for (VehicleClass s : report.misbehaving) {
    if (!(tolls[index_of(s)] > tolls[index_of(g)])) continue;
    if (at(nu, s) < at(nu, g)) {
      ++below;
    } else if (at(nu, s) > at(nu, g)) {
      ++above;
    } else {
      ++equal;
    }
  }
  if (below + above + equal == 0) return DelayVariation::Unchanged;
  if (equal == 0 && above == 0) return DelayVariation::Increasing;
  if (equal == 0 && below == 0) return DelayVariation::Decreasing;
  return DelayVariation::Mixed;
}

MisbehaviorSweep sweep_misbehavior(const Scenario& scenario, VehicleClass swept,
                                   std::span<const double> alpha_grid) {
  if (!is_decision(swept)) throw std::invalid_argument("AV_HO cannot be swept");
  std::vector<double> alphas(alpha_grid.begin(), alpha_grid.end());
  for (double a : alphas) {
    if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
      throw std::invalid_argument("misbehavior grid must lie in [0, 1]");
    }
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  MisbehaviorSweep sweep;
  sweep.swept = swept;
  const Scenario honest = scenario.with_misbehavior({});
  try {
    ResilienceReport report = primary_resilient_region(honest, swept);
    secondary_resilient_regions(report, honest);
    sweep.report = std::move(report);
  } catch (const NoSplitClass&) {
    // Every row is then uncharacterized.
  }

  for (double a : alphas) {
    DecisionMap<double> misbehavior{};
    misbehavior[index_of(swept)] = a;
    const HeteroEquilibrium h = solve_hetero_equilibrium(honest.with_misbehavior(misbehavior));
    MisbehaviorRow row{a, h.d1, h.d2, h.j, false, "uncharacterized"};
    if (sweep.report) {
      if (sweep.report->primary_alpha && sweep.report->primary_alpha->contains(a)) {
        row.region = "primary";
      } else {
        for (const SecondaryRegion& r : sweep.report->secondary) {
          if (r.alpha && r.alpha->contains(a)) {
            row.region = "secondary";
            break;
          }
        }
      }
    }
    row.in_region = row.region != "uncharacterized";
    sweep.rows.push_back(row);
  }
  return sweep;
}

}  // namespace tollane
