#include "tollane/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace tollane::oracle {

namespace {

// Raw parameters, recomputed from the scenario inputs.
struct Raw {
  ClassMap<double> commuters{};
  ClassMap<double> occupancy{};
  ClassMap<double> vehicle_weight{};
  DecisionMap<double> alpha{};
  DecisionMap<double> tolls{};
  double mu = 0.0;

  explicit Raw(const Scenario& s) {
    mu = s.headway().value();
    commuters = s.demand().values();
    occupancy = {s.occupancy().n_lo(), s.occupancy().n_ho(), s.occupancy().n_lo(),
                 s.occupancy().n_ho()};
    vehicle_weight = {1.0, 1.0, mu, mu};
    alpha = s.misbehavior();
    tolls = s.class_tolls();
  }
  double vehicles(std::size_t i) const { return commuters[i] / occupancy[i]; }
  double honest(std::size_t i) const { return vehicles(i) * (1.0 - alpha[i]); }
  double fixed_lane1() const {
    double phi = vehicle_weight[3] * vehicles(3);
    for (std::size_t i = 0; i < 3; ++i) phi += vehicle_weight[i] * vehicles(i) * alpha[i];
    return phi;
  }
};

struct Loads {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

Loads loads(const Raw& raw, const DecisionMap<double>& f1) {
  Loads l;
  l.phi1 = raw.fixed_lane1();
  for (std::size_t i = 0; i < 3; ++i) {
    l.phi1 += raw.vehicle_weight[i] * f1[i];
    l.phi2 += raw.vehicle_weight[i] * (raw.honest(i) - f1[i]);
  }
  return l;
}

double raw_delay(const Scenario& s, const Raw& raw, const DecisionMap<double>& f1) {
  const Loads l = loads(raw, f1);
  double lane1 = raw.commuters[3];
  double lane2 = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    lane1 += raw.occupancy[i] * (f1[i] + raw.vehicles(i) * raw.alpha[i]);
    lane2 += raw.occupancy[i] * (raw.honest(i) - f1[i]);
  }
  return lane1 * s.delays().lane1(l.phi1) + lane2 * s.delays().lane2(l.phi2);
}

std::vector<double> axis(double upper, double resolution, const char* what) {
  if (!(resolution > 0.0)) throw std::invalid_argument("grid resolution must be positive");
  std::vector<double> xs;
  if (!(upper > 0.0)) return {0.0};
  const double steps = std::floor(upper / resolution * (1.0 + 1e-12));
  if (steps + 1.0 > kMaxAxisPoints) {
    throw GridTooLarge(std::string("grid axis for ") + what + " exceeds " +
                       std::to_string(kMaxAxisPoints) + " points");
  }
  for (int k = 0; k <= static_cast<int>(steps); ++k) xs.push_back(std::min(upper, k * resolution));
  if (upper - xs.back() > 1e-12 * std::max(1.0, upper)) {
    if (xs.size() + 1 > static_cast<std::size_t>(kMaxAxisPoints)) {
      throw GridTooLarge(std::string("grid axis for ") + what + " exceeds " +
                         std::to_string(kMaxAxisPoints) + " points");
    }
    xs.push_back(upper);
  }
  return xs;
}

FlowDistribution to_flow(const Raw& raw, const DecisionMap<double>& f1) {
  FlowDistribution f;
  for (std::size_t i = 0; i < 3; ++i) {
    f.lane1[i] = f1[i];
    f.lane2[i] = raw.honest(i) - f1[i];
  }
  return f;
}

constexpr const char* kNames[3] = {"HV_LO", "HV_HO", "AV_LO"};

}  // namespace

double oracle_total_delay(const Scenario& scenario, const FlowDistribution& flow) {
  return raw_delay(scenario, Raw(scenario), flow.lane1);
}

std::vector<FlowDistribution> brute_force_equilibria(const Scenario& scenario, const GridSpec& grid) {
  const Raw raw(scenario);
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < 3; ++i) axes.push_back(axis(raw.honest(i), grid.resolution, kNames[i]));

  std::vector<FlowDistribution> out;
  DecisionMap<double> f1{};
  for (double a : axes[0]) {
    f1[0] = a;
    for (double b : axes[1]) {
      f1[1] = b;
      for (double c : axes[2]) {
        f1[2] = c;
        const Loads l = loads(raw, f1);
        const double c2 = scenario.delays().lane2(l.phi2);
        const double d1 = scenario.delays().lane1(l.phi1);
        bool ok = true;
        for (std::size_t i = 0; i < 3 && ok; ++i) {
          const double c1 = d1 + raw.tolls[i];
          if (f1[i] > 0.0 && c1 - c2 > grid.tolerance) ok = false;
          if (raw.honest(i) - f1[i] > 0.0 && c2 - c1 > grid.tolerance) ok = false;
        }
        if (ok) out.push_back(to_flow(raw, f1));
      }
    }
  }
  return out;
}

JExtremes brute_force_j_extremes(const Scenario& scenario, double phi_1_star, const GridSpec& grid) {
  const Raw raw(scenario);
  const double budget = phi_1_star - raw.fixed_lane1();

  int implied = -1;
  for (int i = 2; i >= 0; --i) {
    if (raw.honest(static_cast<std::size_t>(i)) > 0.0) {
      implied = i;
      break;
    }
  }

  JExtremes ex;
  ex.j_min = std::numeric_limits<double>::infinity();
  ex.j_max = -std::numeric_limits<double>::infinity();
  const auto consider = [&](const DecisionMap<double>& f1) {
    const double j = raw_delay(scenario, raw, f1);
    ++ex.points;
    if (j < ex.j_min) {
      ex.j_min = j;
      ex.argmin = to_flow(raw, f1);
    }
    if (j > ex.j_max) {
      ex.j_max = j;
      ex.argmax = to_flow(raw, f1);
    }
  };

  if (implied < 0) {
    consider({0.0, 0.0, 0.0});
    return ex;
  }

  // Free axes stop where a class alone would exceed the budget.
  std::vector<std::vector<double>> axes(3, std::vector<double>{0.0});
  for (int i = 0; i < implied; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double reach = std::max(0.0, budget) / raw.vehicle_weight[k];
    axes[k] = axis(std::min(raw.honest(k), reach), grid.resolution, kNames[k]);
  }
  const auto m = static_cast<std::size_t>(implied);
  const double slack = 1e-12 * std::max(1.0, raw.honest(m));

  DecisionMap<double> f1{};
  for (double a : axes[0]) {
    for (double b : axes[1]) {
      for (double c : axes[2]) {
        f1 = {a, b, c};
        double rest = budget;
        for (std::size_t i = 0; i < 3; ++i) {
          if (i != m) rest -= raw.vehicle_weight[i] * f1[i];
        }
        double fm = rest / raw.vehicle_weight[m];
        if (fm < -slack || fm > raw.honest(m) + slack) continue;
        f1[m] = std::clamp(fm, 0.0, raw.honest(m));
        consider(f1);
      }
    }
  }
  if (ex.points == 0) throw std::invalid_argument("phi_1_star leaves no feasible flow on the grid");
  return ex;
}

}  // namespace tollane::oracle
