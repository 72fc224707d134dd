#include "tollane/core.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>

namespace tollane {

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

[[noreturn]] void reject(const std::string& what) { throw InvalidScenario(what); }

}  // namespace

std::string_view class_name(VehicleClass c) {
  switch (c) {
    case VehicleClass::HvLo: return "HV_LO";
    case VehicleClass::HvHo: return "HV_HO";
    case VehicleClass::AvLo: return "AV_LO";
    case VehicleClass::AvHo: return "AV_HO";
  }
  return "?";
}

std::string_view class_key(VehicleClass c) {
  switch (c) {
    case VehicleClass::HvLo: return "hv_lo";
    case VehicleClass::HvHo: return "hv_ho";
    case VehicleClass::AvLo: return "av_lo";
    case VehicleClass::AvHo: return "av_ho";
  }
  return "?";
}

std::optional<VehicleClass> parse_vehicle_class(std::string_view text) {
  std::string lowered(text);
  std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (VehicleClass c : kAllClasses) {
    if (lowered == class_key(c)) return c;
  }
  return std::nullopt;
}

OccupancyProfile::OccupancyProfile(double n_lo, double n_ho) : n_lo_(n_lo), n_ho_(n_ho) {
  if (!std::isfinite(n_lo) || !(n_lo > 0.0)) reject("occupancy: n_lo > 0 violated (n_lo = " + format_value(n_lo) + ")");
  if (!std::isfinite(n_ho) || !(n_ho >= 2.0)) reject("occupancy: n_ho >= 2 violated (n_ho = " + format_value(n_ho) + ")");
  if (!(n_ho > n_lo)) reject("occupancy: n_ho > n_lo violated");
}

HeadwayRatio::HeadwayRatio(double mu) : mu_(mu) {
  if (!std::isfinite(mu) || !(mu > 0.0 && mu < 1.0)) {
    reject("mu: 0 < mu < 1 violated (mu = " + format_value(mu) + ")");
  }
}

CommuterDemand::CommuterDemand(const ClassMap<double>& commuters) : values_(commuters) {
  bool any_positive = false;
  for (VehicleClass c : kAllClasses) {
    const double d = at(values_, c);
    if (!std::isfinite(d) || d < 0.0) {
      reject("demands: " + std::string(class_key(c)) + " >= 0 violated");
    }
    any_positive = any_positive || d > 0.0;
  }
  if (!any_positive) reject("demands: at least one class must have positive demand");
}

double CommuterDemand::total() const {
  double sum = 0.0;
  for (double d : values_) sum += d;
  return sum;
}

BprDelay::BprDelay(const BprParams& params) : params_(params) {
  if (!std::isfinite(params.theta) || params.theta < 0.0) reject("delays: theta >= 0 violated");
  if (!std::isfinite(params.gamma) || !(params.gamma > 0.0)) {
    reject("delays: gamma > 0 violated (constant delay makes the equilibrium root non-unique)");
  }
  if (!std::isfinite(params.beta) || !(params.beta > 0.0)) reject("delays: beta > 0 violated");
  if (!std::isfinite(params.capacity) || !(params.capacity > 0.0)) {
    reject("delays: capacity > 0 violated");
  }
}

double BprDelay::operator()(double phi) const {
  const double ratio = std::max(phi, 0.0) / params_.capacity;
  const double load = params_.beta == 1.0 ? ratio : std::pow(ratio, params_.beta);
  return params_.theta + params_.gamma * load;
}

DelayModel::DelayModel(std::shared_ptr<const DelayFunction> lane1,
                       std::shared_ptr<const DelayFunction> lane2)
    : lane1_(std::move(lane1)), lane2_(std::move(lane2)) {
  if (!lane1_ || !lane2_) reject("delays: both lanes need a delay function");
}

DelayModel DelayModel::bpr(const BprParams& lane1, const BprParams& lane2) {
  return DelayModel(std::make_shared<BprDelay>(lane1), std::make_shared<BprDelay>(lane2));
}

void DelayModel::validate_increasing(double upper, int samples) const {
  if (!(upper > 0.0) || samples < 2) return;
  for (Lane lane : {Lane::One, Lane::Two}) {
    const DelayFunction& fn = function(lane);
    const std::string label = lane == Lane::One ? "lane 1" : "lane 2";
    double prev = fn(0.0);
    if (!std::isfinite(prev)) reject("delays: " + label + " delay is not finite at zero flow");
    // Floating point can flatten a strictly increasing curve near zero (e.g.
    // a high BPR power), so the sampled check is non-decreasing plus a strict
    // rise across the whole range.
    for (int k = 1; k <= samples; ++k) {
      const double x = upper * static_cast<double>(k) / samples;
      const double v = fn(x);
      if (!std::isfinite(v) || v < prev) {
        reject("delays: " + label + " delay must be increasing in the effective flow");
      }
      prev = v;
    }
    if (!(prev > fn(0.0))) reject("delays: " + label + " delay must be strictly increasing");
  }
}

double EffectiveQuantities::total_effective() const {
  double sum = 0.0;
  for (double d : effective_demand) sum += d;
  return sum;
}

EffectiveQuantities effective_quantities(const CommuterDemand& demand,
                                         const OccupancyProfile& occupancy,
                                         const HeadwayRatio& headway) {
  EffectiveQuantities eq;
  eq.mu = headway.value();
  for (VehicleClass c : kAllClasses) {
    const double n = occupancy.of(c);
    at(eq.vehicle_demand, c) = demand[c] / n;
    at(eq.effective_demand, c) = eq.weight(c) * demand[c] / n;
    at(eq.mobility, c) = n / eq.weight(c);
  }
  return eq;
}

FlowDistribution FlowDistribution::from_lane1(const DecisionMap<double>& lane1,
                                              const DecisionMap<double>& honest_demand) {
  FlowDistribution flow;
  for (std::size_t i = 0; i < 3; ++i) {
    flow.lane1[i] = std::clamp(lane1[i], 0.0, honest_demand[i]);
    flow.lane2[i] = honest_demand[i] - flow.lane1[i];
  }
  return flow;
}

Scenario::Scenario(CommuterDemand demand, OccupancyProfile occupancy, HeadwayRatio headway,
                   DelayModel delays, TollPolicy toll, DecisionMap<double> misbehavior)
    : demand_(std::move(demand)),
      occupancy_(occupancy),
      headway_(headway),
      delays_(std::move(delays)),
      toll_(std::move(toll)),
      misbehavior_(misbehavior),
      effective_(effective_quantities(demand_, occupancy_, headway_)) {
  if (const auto* uniform = std::get_if<UniformToll>(&toll_)) {
    if (!std::isfinite(uniform->tau) || uniform->tau < 0.0) reject("toll: uniform tau >= 0 violated");
  } else {
    const auto& vec = std::get<TollVector>(toll_);
    for (VehicleClass c : kDecisionClasses) {
      const double t = vec.tau[index_of(c)];
      if (!std::isfinite(t) || !(t > 0.0)) {
        reject("toll: differentiated toll for " + std::string(class_key(c)) + " must be > 0");
      }
    }
  }
  for (VehicleClass c : kDecisionClasses) {
    const double a = misbehavior_[index_of(c)];
    if (!std::isfinite(a) || a < 0.0 || a > 1.0) {
      reject("misbehavior: proportion for " + std::string(class_key(c)) + " must lie in [0, 1]");
    }
  }
  delays_.validate_increasing(effective_.total_effective());
}

double Scenario::uniform_toll() const {
  if (const auto* uniform = std::get_if<UniformToll>(&toll_)) return uniform->tau;
  throw std::logic_error("scenario carries differentiated tolls, not a uniform toll");
}

DecisionMap<double> Scenario::class_tolls() const {
  if (const auto* uniform = std::get_if<UniformToll>(&toll_)) {
    return {uniform->tau, uniform->tau, uniform->tau};
  }
  return std::get<TollVector>(toll_).tau;
}

DecisionMap<double> Scenario::honest_vehicle_demand() const {
  DecisionMap<double> honest{};
  for (VehicleClass c : kDecisionClasses) {
    honest[index_of(c)] = at(effective_.vehicle_demand, c) * (1.0 - misbehavior_[index_of(c)]);
  }
  return honest;
}

double Scenario::fixed_lane1_load() const {
  double load = at(effective_.effective_demand, VehicleClass::AvHo);
  for (VehicleClass c : kDecisionClasses) {
    load += at(effective_.effective_demand, c) * misbehavior_[index_of(c)];
  }
  return load;
}

Scenario Scenario::with_toll(TollPolicy toll) const {
  return Scenario(demand_, occupancy_, headway_, delays_, std::move(toll), misbehavior_);
}

Scenario Scenario::with_misbehavior(const DecisionMap<double>& misbehavior) const {
  return Scenario(demand_, occupancy_, headway_, delays_, toll_, misbehavior);
}

EffectiveFlows effective_flows(const FlowDistribution& flow, const EffectiveQuantities& eq,
                               const DecisionMap<double>& misbehavior) {
  EffectiveFlows phi;
  phi.lane1 = at(eq.effective_demand, VehicleClass::AvHo);
  for (VehicleClass c : kDecisionClasses) {
    const std::size_t i = index_of(c);
    phi.lane1 += eq.weight(c) * flow.lane1[i] + at(eq.effective_demand, c) * misbehavior[i];
    phi.lane2 += eq.weight(c) * flow.lane2[i];
  }
  return phi;
}

LaneCosts lane_costs(const EffectiveFlows& phi, const DecisionMap<double>& tolls,
                     const DelayModel& delays) {
  LaneCosts costs;
  const double d1 = delays.lane1(phi.lane1);
  for (std::size_t i = 0; i < 3; ++i) costs.lane1[i] = d1 + tolls[i];
  costs.lane2 = delays.lane2(phi.lane2);
  return costs;
}

CommuterSplit commuters_by_lane(const FlowDistribution& flow, const Scenario& scenario) {
  const auto& eq = scenario.effective();
  const auto& occupancy = scenario.occupancy();
  CommuterSplit split;
  split.lane1 = scenario.demand()[VehicleClass::AvHo];
  for (VehicleClass c : kDecisionClasses) {
    const std::size_t i = index_of(c);
    const double n = occupancy.of(c);
    split.lane1 += n * (flow.lane1[i] + at(eq.vehicle_demand, c) * scenario.misbehavior()[i]);
    split.lane2 += n * flow.lane2[i];
  }
  return split;
}

double total_commuter_delay(const FlowDistribution& flow, const Scenario& scenario) {
  const EffectiveFlows phi = effective_flows(flow, scenario.effective(), scenario.misbehavior());
  const CommuterSplit commuters = commuters_by_lane(flow, scenario);
  return commuters.lane1 * scenario.delays().lane1(phi.lane1) +
         commuters.lane2 * scenario.delays().lane2(phi.lane2);
}

DecisionMap<VehicleClass> mobility_order(const EffectiveQuantities& eq, bool descending) {
  DecisionMap<VehicleClass> order = kDecisionClasses;
  std::stable_sort(order.begin(), order.end(), [&](VehicleClass a, VehicleClass b) {
    return descending ? at(eq.mobility, a) > at(eq.mobility, b)
                      : at(eq.mobility, a) < at(eq.mobility, b);
  });
  return order;
}

}  // namespace tollane
