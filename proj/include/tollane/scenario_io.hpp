#pragma once

// Scenario files (JSON), JSON reports and CSV tables.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tollane/equilibrium.hpp"
#include "tollane/hetero_toll.hpp"
#include "tollane/policy_design.hpp"
#include "tollane/resilience.hpp"

namespace tollane::io {

// Malformed or invalid input.  `field` is a JSON path such as
// "occupancy.n_ho"; `line` is set for syntax errors.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, const std::string& message, std::optional<int> line = {});
  const std::string& field() const { return field_; }
  std::optional<int> line() const { return line_; }

 private:
  std::string field_;
  std::optional<int> line_;
};

// Output path cannot be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CarpoolSpec {
  double d_hv = 0.0;
  double d_av = 0.0;
  double n_min = 2.0;
  double n_max = 4.0;
  std::string model = "reciprocal";

  CarpoolModel model_fn() const;
};

struct ScenarioFile {
  Scenario scenario;
  std::optional<CarpoolSpec> carpool;
  std::string units;
  std::string description;
};

ScenarioFile parse_scenario(const std::string& text);
ScenarioFile load_scenario(const std::filesystem::path& path);

// "%.9g"
std::string format_number(double v);

nlohmann::json flow_to_json(const FlowDistribution& flow);
// Accepts {"lane1": {...}, "lane2": {...}} keyed by class.  Throws SchemaError.
FlowDistribution flow_from_json(const nlohmann::json& j, const std::string& field = "flow");

nlohmann::json to_json(const EquilibriumResult& r);
nlohmann::json to_json(const HeteroEquilibrium& h);
nlohmann::json to_json(const ResilienceReport& r, const Scenario& scenario);

// Table writers: fixed header, "%.9g" numbers, LF line endings.
std::string sweep_csv(const SweepTable& table);
std::string misbehavior_csv(const MisbehaviorSweep& sweep);

// Writes the whole string or throws OutputError.
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace tollane::io
