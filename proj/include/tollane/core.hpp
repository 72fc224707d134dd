#pragma once

// Domain model of a two-lane freeway segment with a tolled lane (lane 1) and a
// free lane (lane 2), shared by human-driven / autonomous vehicles with low or
// high occupancy.  Units: minutes for delays and tolls (value of time is 1),
// vehicles per minute for vehicle flows, commuters per minute for demands.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace tollane {

enum class VehicleClass : std::uint8_t { HvLo = 0, HvHo = 1, AvLo = 2, AvHo = 3 };

inline constexpr std::array<VehicleClass, 4> kAllClasses{
    VehicleClass::HvLo, VehicleClass::HvHo, VehicleClass::AvLo, VehicleClass::AvHo};

// Classes choosing between the tolled and the free lane.  AV_HO rides lane 1
// for free and is never part of this set.  The order here is the fixed
// tie-breaking order used everywhere.
inline constexpr std::array<VehicleClass, 3> kDecisionClasses{
    VehicleClass::HvLo, VehicleClass::HvHo, VehicleClass::AvLo};

constexpr std::size_t index_of(VehicleClass c) { return static_cast<std::size_t>(c); }
constexpr bool is_decision(VehicleClass c) { return c != VehicleClass::AvHo; }
constexpr bool is_autonomous(VehicleClass c) {
  return c == VehicleClass::AvLo || c == VehicleClass::AvHo;
}
constexpr bool is_high_occupancy(VehicleClass c) {
  return c == VehicleClass::HvHo || c == VehicleClass::AvHo;
}

// "HV_LO", "HV_HO", "AV_LO", "AV_HO"
std::string_view class_name(VehicleClass c);
// Snake-case key used in scenario files: "hv_lo", ...
std::string_view class_key(VehicleClass c);
// Accepts either spelling, case-insensitive.
std::optional<VehicleClass> parse_vehicle_class(std::string_view text);

template <typename T>
using ClassMap = std::array<T, 4>;
// Indexed by the position of a class in kDecisionClasses, which coincides with
// index_of() for the three decision classes.
template <typename T>
using DecisionMap = std::array<T, 3>;

template <typename T>
constexpr T& at(ClassMap<T>& m, VehicleClass c) { return m[index_of(c)]; }
template <typename T>
constexpr const T& at(const ClassMap<T>& m, VehicleClass c) { return m[index_of(c)]; }

class InvalidScenario : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OccupancyProfile {
 public:
  // Requires n_lo > 0, n_ho >= 2 and n_ho > n_lo.
  OccupancyProfile(double n_lo, double n_ho);

  double n_lo() const { return n_lo_; }
  double n_ho() const { return n_ho_; }
  double of(VehicleClass c) const { return is_high_occupancy(c) ? n_ho_ : n_lo_; }

 private:
  double n_lo_;
  double n_ho_;
};

// Ratio of autonomous to human-driven headway, strictly inside (0, 1).
class HeadwayRatio {
 public:
  explicit HeadwayRatio(double mu);
  double value() const { return mu_; }

 private:
  double mu_;
};

class CommuterDemand {
 public:
  // All entries >= 0 and at least one > 0.
  explicit CommuterDemand(const ClassMap<double>& commuters);

  double operator[](VehicleClass c) const { return at(values_, c); }
  const ClassMap<double>& values() const { return values_; }
  double total() const;

 private:
  ClassMap<double> values_;
};

// Lane delay as a function of effective flow.  Implementations must be
// continuous and strictly increasing.
class DelayFunction {
 public:
  virtual ~DelayFunction() = default;
  virtual double operator()(double phi) const = 0;
};

struct BprParams {
  double theta = 0.0;     // free-flow delay
  double gamma = 0.0;     // > 0
  double beta = 1.0;      // > 0
  double capacity = 1.0;  // > 0
};

// theta + gamma * (phi / capacity)^beta
class BprDelay final : public DelayFunction {
 public:
  explicit BprDelay(const BprParams& params);
  double operator()(double phi) const override;
  const BprParams& params() const { return params_; }

 private:
  BprParams params_;
};

enum class Lane : std::uint8_t { One = 1, Two = 2 };

class DelayModel {
 public:
  DelayModel(std::shared_ptr<const DelayFunction> lane1,
             std::shared_ptr<const DelayFunction> lane2);
  static DelayModel bpr(const BprParams& lane1, const BprParams& lane2);

  double lane1(double phi) const { return (*lane1_)(phi); }
  double lane2(double phi) const { return (*lane2_)(phi); }
  const DelayFunction& function(Lane lane) const {
    return lane == Lane::One ? *lane1_ : *lane2_;
  }

  // Samples both lanes on [0, upper] and throws InvalidScenario if either
  // decreases anywhere or fails to rise between the endpoints.
  void validate_increasing(double upper, int samples = 1000) const;

 private:
  std::shared_ptr<const DelayFunction> lane1_;
  std::shared_ptr<const DelayFunction> lane2_;
};

struct UniformToll {
  double tau = 0.0;  // >= 0
};

// Class-differentiated tolls, strictly positive.  Duplicates are allowed.
struct TollVector {
  DecisionMap<double> tau{};
};

using TollPolicy = std::variant<UniformToll, TollVector>;

struct EffectiveQuantities {
  ClassMap<double> vehicle_demand{};    // d_v
  ClassMap<double> effective_demand{};  // delta
  ClassMap<double> mobility{};          // nu, from the closed forms
  double mu = 1.0;

  // Effective flow contributed by one vehicle of class c.
  double weight(VehicleClass c) const { return is_autonomous(c) ? mu : 1.0; }
  double total_effective() const;
};

EffectiveQuantities effective_quantities(const CommuterDemand& demand,
                                         const OccupancyProfile& occupancy,
                                         const HeadwayRatio& headway);

// Vehicle flows of the decision classes on each lane.  Under misbehavior these
// are the honest vehicles only.
struct FlowDistribution {
  DecisionMap<double> lane1{};
  DecisionMap<double> lane2{};

  double on(Lane lane, VehicleClass c) const {
    return lane == Lane::One ? lane1[index_of(c)] : lane2[index_of(c)];
  }
  static FlowDistribution from_lane1(const DecisionMap<double>& lane1,
                                     const DecisionMap<double>& honest_demand);
};

class Scenario {
 public:
  Scenario(CommuterDemand demand, OccupancyProfile occupancy, HeadwayRatio headway,
           DelayModel delays, TollPolicy toll, DecisionMap<double> misbehavior = {});

  const CommuterDemand& demand() const { return demand_; }
  const OccupancyProfile& occupancy() const { return occupancy_; }
  const HeadwayRatio& headway() const { return headway_; }
  const DelayModel& delays() const { return delays_; }
  const TollPolicy& toll() const { return toll_; }
  const DecisionMap<double>& misbehavior() const { return misbehavior_; }
  const EffectiveQuantities& effective() const { return effective_; }

  bool has_uniform_toll() const { return std::holds_alternative<UniformToll>(toll_); }
  // Throws std::logic_error for differentiated tolls.
  double uniform_toll() const;
  DecisionMap<double> class_tolls() const;

  double total_effective_demand() const { return effective_.total_effective(); }
  // d_v[p] * (1 - alpha[p]) for the decision classes.
  DecisionMap<double> honest_vehicle_demand() const;
  // delta[AV_HO] + sum_p delta[p] * alpha[p]: effective load that sits on
  // lane 1 regardless of any lane choice.
  double fixed_lane1_load() const;

  Scenario with_toll(TollPolicy toll) const;
  Scenario with_misbehavior(const DecisionMap<double>& misbehavior) const;

 private:
  CommuterDemand demand_;
  OccupancyProfile occupancy_;
  HeadwayRatio headway_;
  DelayModel delays_;
  TollPolicy toll_;
  DecisionMap<double> misbehavior_;
  EffectiveQuantities effective_;
};

struct EffectiveFlows {
  double lane1 = 0.0;
  double lane2 = 0.0;
};

EffectiveFlows effective_flows(const FlowDistribution& flow, const EffectiveQuantities& eq,
                               const DecisionMap<double>& misbehavior = {});

struct LaneCosts {
  DecisionMap<double> lane1{};  // D1(phi_1) + tau[p]
  double lane2 = 0.0;           // D2(phi_2)
};

LaneCosts lane_costs(const EffectiveFlows& phi, const DecisionMap<double>& tolls,
                     const DelayModel& delays);

struct CommuterSplit {
  double lane1 = 0.0;
  double lane2 = 0.0;
};

// Commuters per lane, counting AV_HO and misbehaving vehicles on lane 1.
CommuterSplit commuters_by_lane(const FlowDistribution& flow, const Scenario& scenario);

double total_commuter_delay(const FlowDistribution& flow, const Scenario& scenario);

// Decision classes ordered by mobility degree.  Ties keep the kDecisionClasses
// order (HV_HO before AV_LO) in both directions.
DecisionMap<VehicleClass> mobility_order(const EffectiveQuantities& eq, bool descending);

}  // namespace tollane
