#include "tollane/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace tollane::io {

using nlohmann::json;

namespace {

std::string join(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

void expect_object(const json& j, const std::string& field,
                   std::initializer_list<const char*> required,
                   std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw SchemaError(field, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const auto same = [&](const char* k) { return key == k; };
    if (std::none_of(required.begin(), required.end(), same) &&
        std::none_of(optional.begin(), optional.end(), same)) {
      throw SchemaError(join(field, key), "unknown key");
    }
  }
  for (const char* key : required) {
    if (!j.contains(key)) throw SchemaError(join(field, key), "missing required key");
  }
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw SchemaError(field, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError(field, "number must be finite");
  return v;
}

std::string text(const json& j, const std::string& field) {
  if (!j.is_string()) throw SchemaError(field, "expected a string");
  return j.get<std::string>();
}

DecisionMap<double> decision_map(const json& j, const std::string& field, bool all_required) {
  if (all_required) {
    expect_object(j, field, {"hv_lo", "hv_ho", "av_lo"});
  } else {
    expect_object(j, field, {}, {"hv_lo", "hv_ho", "av_lo"});
  }
  DecisionMap<double> out{};
  for (VehicleClass c : kDecisionClasses) {
    const std::string key(class_key(c));
    if (j.contains(key)) out[index_of(c)] = number(j.at(key), join(field, key));
  }
  return out;
}

BprParams bpr(const json& j, const std::string& field) {
  expect_object(j, field, {"theta", "gamma", "beta", "capacity"});
  return {number(j.at("theta"), field + ".theta"), number(j.at("gamma"), field + ".gamma"),
          number(j.at("beta"), field + ".beta"), number(j.at("capacity"), field + ".capacity")};
}

// Core validation messages start with the offending section name.
std::string field_of(const std::string& message) {
  const auto colon = message.find(':');
  return colon == std::string::npos ? std::string() : message.substr(0, colon);
}

int line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(end), '\n'));
}

json class_object(const DecisionMap<double>& values) {
  json j = json::object();
  for (VehicleClass c : kDecisionClasses) j[std::string(class_key(c))] = values[index_of(c)];
  return j;
}

json class_names(const std::vector<VehicleClass>& classes) {
  json j = json::array();
  for (VehicleClass c : classes) j.push_back(std::string(class_name(c)));
  return j;
}

json interval(const std::optional<AlphaInterval>& a) {
  if (!a) return nullptr;
  if (a->empty()) return json::array();
  return json::array({a->lo, a->hi});
}

}  // namespace

SchemaError::SchemaError(std::string field, const std::string& message, std::optional<int> line)
    : std::runtime_error((line ? "line " + std::to_string(*line) + ": " : std::string()) +
                         (field.empty() ? message : field + ": " + message)),
      field_(std::move(field)),
      line_(line) {}

CarpoolModel CarpoolSpec::model_fn() const {
  return CarpoolModel::reciprocal(d_hv, d_av, n_min, n_max);
}

ScenarioFile parse_scenario(const std::string& input) {
  json root;
  try {
    root = json::parse(input);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("syntax error: ") + e.what(), line_of(input, e.byte));
  }
  expect_object(root, "", {"demands", "occupancy", "mu", "delays", "toll"},
                {"units", "description", "misbehavior", "carpool"});

  const json& d = root.at("demands");
  expect_object(d, "demands", {"hv_lo", "hv_ho", "av_lo", "av_ho"});
  ClassMap<double> demands{};
  for (VehicleClass c : kAllClasses) {
    const std::string key(class_key(c));
    demands[index_of(c)] = number(d.at(key), "demands." + key);
  }

  const json& occ = root.at("occupancy");
  expect_object(occ, "occupancy", {"n_lo", "n_ho"});
  const double n_lo = number(occ.at("n_lo"), "occupancy.n_lo");
  const double n_ho = number(occ.at("n_ho"), "occupancy.n_ho");
  const double mu = number(root.at("mu"), "mu");

  const json& delays = root.at("delays");
  if (!delays.is_array() || delays.size() != 2) {
    throw SchemaError("delays", "expected an array of two lane delay objects");
  }
  const BprParams lane1 = bpr(delays.at(0), "delays[0]");
  const BprParams lane2 = bpr(delays.at(1), "delays[1]");

  TollPolicy toll;
  const json& t = root.at("toll");
  if (t.is_number()) {
    toll = UniformToll{number(t, "toll")};
  } else if (t.is_object()) {
    toll = TollVector{decision_map(t, "toll", true)};
  } else {
    throw SchemaError("toll", "expected a number or a per-class object");
  }

  DecisionMap<double> misbehavior{};
  if (root.contains("misbehavior")) misbehavior = decision_map(root.at("misbehavior"), "misbehavior", false);

  std::optional<CarpoolSpec> carpool;
  if (root.contains("carpool")) {
    const json& c = root.at("carpool");
    expect_object(c, "carpool", {"d_hv", "d_av", "n_min", "n_max"}, {"model"});
    CarpoolSpec spec;
    spec.d_hv = number(c.at("d_hv"), "carpool.d_hv");
    spec.d_av = number(c.at("d_av"), "carpool.d_av");
    spec.n_min = number(c.at("n_min"), "carpool.n_min");
    spec.n_max = number(c.at("n_max"), "carpool.n_max");
    if (c.contains("model")) spec.model = text(c.at("model"), "carpool.model");
    if (spec.model != "reciprocal") throw SchemaError("carpool.model", "only \"reciprocal\" is supported");
    if (spec.d_hv < 0.0 || spec.d_av < 0.0) throw SchemaError("carpool", "demands must be >= 0");
    if (!(spec.n_min >= 2.0 && spec.n_max >= spec.n_min)) {
      throw SchemaError("carpool", "need 2 <= n_min <= n_max");
    }
    carpool = spec;
  }

  std::string units = root.contains("units") ? text(root.at("units"), "units") : std::string();
  std::string description =
      root.contains("description") ? text(root.at("description"), "description") : std::string();

  try {
    Scenario scenario(CommuterDemand(demands), OccupancyProfile(n_lo, n_ho), HeadwayRatio(mu),
                      DelayModel::bpr(lane1, lane2), toll, misbehavior);
    return ScenarioFile{std::move(scenario), carpool, std::move(units), std::move(description)};
  } catch (const InvalidScenario& e) {
    const std::string message = e.what();
    const std::string field = field_of(message);
    throw SchemaError(field, field.empty() ? message : message.substr(field.size() + 2));
  }
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("", "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v == 0.0 ? 0.0 : v);  // no "-0"
  return buf;
}

json flow_to_json(const FlowDistribution& flow) {
  return {{"lane1", class_object(flow.lane1)}, {"lane2", class_object(flow.lane2)}};
}

FlowDistribution flow_from_json(const json& j, const std::string& field) {
  expect_object(j, field, {"lane1", "lane2"});
  FlowDistribution flow;
  flow.lane1 = decision_map(j.at("lane1"), field + ".lane1", true);
  flow.lane2 = decision_map(j.at("lane2"), field + ".lane2", true);
  return flow;
}

json to_json(const EquilibriumResult& r) {
  return {{"kind", std::string(kind_name(r.kind))},
          {"unique", r.is_unique()},
          {"thresholds", {{"tau_high", r.thresholds.tau_high}, {"tau_low", r.thresholds.tau_low}}},
          {"phi_1_star", r.phi_1_star},
          {"simplex_budget", r.simplex_budget},
          {"best", flow_to_json(r.best)},
          {"worst", flow_to_json(r.worst)},
          {"j_best", r.j_best},
          {"j_worst", r.j_worst}};
}

json to_json(const HeteroEquilibrium& h) {
  json lanes = json::object();
  for (VehicleClass c : kDecisionClasses) {
    lanes[std::string(class_key(c))] = std::string(assignment_name(h.lane_assignment[index_of(c)]));
  }
  return {{"phi_1", h.phi_1},
          {"split_class", h.split_class ? json(std::string(class_name(*h.split_class))) : json(nullptr)},
          {"lane_assignment", lanes},
          {"flow", flow_to_json(h.flow)},
          {"unique", h.is_unique},
          {"d1", h.d1},
          {"d2", h.d2},
          {"j", h.j}};
}

json to_json(const ResilienceReport& r, const Scenario& scenario) {
  json secondary = json::array();
  for (std::size_t i = 0; i < r.secondary.size(); ++i) {
    const SecondaryRegion& s = r.secondary[i];
    secondary.push_back({{"g_minus", std::string(class_name(s.g_minus))},
                         {"phi_tilde", s.phi_tilde},
                         {"lower", s.lower},
                         {"upper", s.upper},
                         {"alpha", interval(s.alpha)},
                         {"variation", std::string(variation_name(classify_delay_variation(r, scenario, i)))}});
  }
  return {{"split_class", std::string(class_name(r.split_class))},
          {"q_minus", class_names(r.q_minus)},
          {"q_plus", class_names(r.q_plus)},
          {"misbehaving", class_names(r.misbehaving)},
          {"phi_1_star", r.phi_1_star},
          {"primary", {{"upper", r.primary_upper}, {"alpha", interval(r.primary_alpha)}}},
          {"variation", std::string(variation_name(classify_delay_variation(r, scenario)))},
          {"secondary", secondary}};
}

std::string sweep_csv(const SweepTable& table) {
  std::string out = "x,j_best,j_worst,phi1,unique\n";
  for (const SweepRow& row : table.rows) {
    out += format_number(row.x) + ',' + format_number(row.j_best) + ',' + format_number(row.j_worst) +
           ',' + format_number(row.phi1) + ',' + (row.unique ? "1" : "0") + '\n';
  }
  return out;
}

std::string misbehavior_csv(const MisbehaviorSweep& sweep) {
  std::string out = "alpha,d1,d2,j,region\n";
  for (const MisbehaviorRow& row : sweep.rows) {
    out += format_number(row.alpha) + ',' + format_number(row.d1) + ',' + format_number(row.d2) + ',' +
           format_number(row.j) + ',' + std::string(row.region) + '\n';
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw OutputError("failed writing " + path.string());
}

}  // namespace tollane::io
