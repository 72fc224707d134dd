// tollane: command-line front end for the two-lane toll toolkit.
//
// Exit codes: 0 success, 1 verification failure or inapplicable request,
// 2 usage / scenario errors, 3 unwritable output.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tollane/scenario_io.hpp"

using namespace tollane;
using nlohmann::json;

namespace {

struct Options {
  std::string scenario;
  bool json = false;
  std::string out;
  std::optional<double> grid_step;
  double tol = kDefaultVerifyTolerance;
  std::string objective = "best";
  std::optional<double> tau_max;
  std::optional<double> tau_star;
  std::optional<double> tau_minus;
  std::optional<double> tau_plus;
  std::string swept_class = "HV_LO";
  std::string check_flow;
};

std::string num(double v) { return io::format_number(v); }

std::string triple(const DecisionMap<double>& v) {
  return "(" + num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]) + ")";
}

DesignObjective parse_objective(const std::string& s) {
  return s == "worst" ? DesignObjective::WorstCaseJ : DesignObjective::BestCaseJ;
}

// Prints to stdout, or writes to --out when given.
void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    io::write_text(o.out, text);
  }
}

int cmd_check_flow(const Options& o, const Scenario& scenario) {
  std::ifstream in(o.check_flow, std::ios::binary);
  if (!in) throw io::SchemaError("", "cannot read " + o.check_flow);
  std::stringstream buf;
  buf << in.rdbuf();
  json doc;
  try {
    doc = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw io::SchemaError("", std::string("flow file: ") + e.what());
  }
  std::vector<std::pair<std::string, FlowDistribution>> flows;
  if (doc.is_object() && doc.contains("flow")) {
    flows.emplace_back("flow", io::flow_from_json(doc.at("flow"), "flow"));
  } else if (doc.is_object() && (doc.contains("best") || doc.contains("worst"))) {
    for (const char* key : {"best", "worst"}) {
      if (doc.contains(key)) flows.emplace_back(key, io::flow_from_json(doc.at(key), key));
    }
  } else {
    flows.emplace_back("flow", io::flow_from_json(doc, "flow"));
  }
  bool all_ok = true;
  for (const auto& [name, flow] : flows) {
    const VerificationReport r = verify_equilibrium(flow, scenario, o.tol);
    std::cout << name << ": " << (r.ok ? "equilibrium" : "not an equilibrium")
              << (r.conserves ? "" : " (flow conservation violated)") << "\n";
    all_ok = all_ok && r.ok;
  }
  return all_ok ? 0 : 1;
}

int cmd_solve(const Options& o) {
  const io::ScenarioFile file = io::load_scenario(o.scenario);
  const Scenario& s = file.scenario;
  if (!o.check_flow.empty()) return cmd_check_flow(o, s);

  json doc;
  std::ostringstream text;
  bool verified = true;
  if (s.has_uniform_toll()) {
    const EquilibriumResult r = solve_equilibrium(s);
    verified = verify_equilibrium(r.best, s, o.tol).ok && verify_equilibrium(r.worst, s, o.tol).ok;
    doc = io::to_json(r);
    text << "kind: " << kind_name(r.kind) << "\n";
    text << "unique for tau >= " << num(r.thresholds.tau_high) << "\n";
    if (r.thresholds.tau_low >= 0.0) text << "unique for tau <= " << num(r.thresholds.tau_low) << "\n";
    text << "tau = " << num(s.uniform_toll()) << "\n";
    text << "phi1* = " << num(r.phi_1_star) << "\n";
    text << "best f1 = " << triple(r.best.lane1) << "  J = " << num(r.j_best) << "\n";
    text << "worst f1 = " << triple(r.worst.lane1) << "  J = " << num(r.j_worst) << "\n";
    text << "delays: D1 = " << num(s.delays().lane1(r.phi_1_star))
         << ", D2 = " << num(s.delays().lane2(s.total_effective_demand() - r.phi_1_star)) << "\n";
  } else {
    const HeteroEquilibrium h = solve_hetero_equilibrium(s);
    verified = verify_equilibrium(h.flow, s, o.tol).ok;
    doc = io::to_json(h);
    text << "split class: " << (h.split_class ? class_name(*h.split_class) : "none") << "\n";
    text << "phi_1 = " << num(h.phi_1) << "\n";
    text << "lanes:";
    for (VehicleClass c : kDecisionClasses) {
      text << " " << class_name(c) << "=" << assignment_name(h.lane_assignment[index_of(c)]);
    }
    text << "\n";
    text << "f1 = " << triple(h.flow.lane1) << (h.is_unique ? "" : " (one of a tie simplex)") << "\n";
    text << "J = " << num(h.j) << "\n";
    text << "delays: D1 = " << num(h.d1) << ", D2 = " << num(h.d2) << "\n";
  }
  text << "verified: " << (verified ? "yes" : "no") << "\n";

  if (o.json) {
    emit(o, doc.dump(2) + "\n");
  } else {
    if (!o.out.empty()) io::write_text(o.out, doc.dump(2) + "\n");
    std::cout << text.str();
  }
  return verified ? 0 : 1;
}

int cmd_design_toll(const Options& o) {
  const io::ScenarioFile file = io::load_scenario(o.scenario);
  const double step = o.grid_step.value_or(0.01);
  const std::vector<double> grid =
      o.tau_max ? linear_grid(0.0, *o.tau_max, step) : default_toll_grid(file.scenario, step);
  const DesignObjective objective = parse_objective(o.objective);
  const TollDesign d = optimize_uniform_toll(file.scenario, objective, grid);
  if (!o.out.empty()) io::write_text(o.out, io::sweep_csv(d.table));
  if (o.json) {
    std::cout << json{{"tau_star", d.tau_star}, {"objective", o.objective}, {"j", d.objective_value}}.dump(2)
              << "\n";
  } else {
    std::cout << "tau* = " << num(d.tau_star) << " (" << o.objective << "-case J = " << num(d.objective_value)
              << ")\n";
  }
  return 0;
}

int cmd_design_threshold(const Options& o) {
  const io::ScenarioFile file = io::load_scenario(o.scenario);
  if (!file.carpool) throw io::SchemaError("carpool", "design-threshold needs a carpool section");
  const CarpoolModel model = file.carpool->model_fn();
  const std::vector<double> grid = linear_grid(model.n_min, model.n_max, o.grid_step.value_or(0.05));
  const ThresholdDesign d = optimize_occupancy_threshold(model, file.scenario, parse_objective(o.objective), grid);
  if (!o.out.empty()) io::write_text(o.out, io::sweep_csv(d.table));
  if (o.json) {
    std::cout << json{{"n_star", d.n_star}, {"objective", o.objective}, {"j", d.objective_value}}.dump(2) << "\n";
  } else {
    std::cout << "n* = " << num(d.n_star) << " (" << o.objective << "-case J = " << num(d.objective_value) << ")\n";
  }
  return 0;
}

int cmd_compare_policy(const Options& o) {
  const io::ScenarioFile file = io::load_scenario(o.scenario);
  const std::vector<double> grid = linear_grid(0.0, o.tau_max.value_or(1.0), o.grid_step.value_or(0.05));
  const std::vector<LanePolicy> policies{LanePolicy::TollFramework, LanePolicy::Hovl, LanePolicy::Dla};
  const auto tables = compare_policies(file.scenario, policies, grid);

  if (!o.out.empty()) {
    const std::filesystem::path base(o.out);
    const std::string ext = base.has_extension() ? base.extension().string() : ".csv";
    for (const auto& [policy, table] : tables) {
      const auto path = base.parent_path() / (base.stem().string() + "_" + std::string(policy_name(policy)) + ext);
      io::write_text(path, io::sweep_csv(table));
    }
  }

  json doc = json::object();
  for (const auto& [policy, table] : tables) {
    const SweepRow* best = &table.rows.front();
    const SweepRow* worst = &table.rows.front();
    for (const SweepRow& row : table.rows) {
      if (row.j_best < best->j_best) best = &row;
      if (row.j_worst < worst->j_worst) worst = &row;
    }
    const std::string name(policy_name(policy));
    doc[name] = {{"min_j_best", best->j_best}, {"tau_min_j_best", best->x},
                 {"min_j_worst", worst->j_worst}, {"tau_min_j_worst", worst->x}};
    if (!o.json) {
      std::cout << name << ": min best-case J = " << num(best->j_best) << " at tau = " << num(best->x)
                << "; min worst-case J = " << num(worst->j_worst) << " at tau = " << num(worst->x) << "\n";
    }
  }
  const auto& hovl = tables.at(LanePolicy::Hovl).rows;
  const auto& dla = tables.at(LanePolicy::Dla).rows;
  bool dominates = true;
  for (std::size_t i = 0; i < hovl.size(); ++i) dominates = dominates && hovl[i].j_worst <= dla[i].j_worst;
  doc["hovl_worst_le_dla_worst"] = dominates;
  if (o.json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "hovl worst-case J <= dla worst-case J at every tau: " << (dominates ? "yes" : "no") << "\n";
  }
  return 0;
}

int cmd_differentiate(const Options& o) {
  const io::ScenarioFile file = io::load_scenario(o.scenario);
  const Scenario& s = file.scenario;
  double tau_star = 0.0;
  if (o.tau_star) {
    tau_star = *o.tau_star;
  } else {
    const std::vector<double> grid = default_toll_grid(s, o.grid_step.value_or(0.01));
    tau_star = optimize_uniform_toll(s, DesignObjective::BestCaseJ, grid).tau_star;
  }
  if (!(tau_star > 0.0)) throw NotApplicable("tau_star must be positive to be differentiated");
  const EquilibriumResult uniform = solve_equilibrium(s.with_toll(UniformToll{tau_star}));
  const TollDifferentiation d =
      differentiate_tolls(s, tau_star, uniform.phi_1_star, DifferentiationOptions{o.tau_minus, o.tau_plus});
  const HeteroEquilibrium h = solve_hetero_equilibrium(s.with_toll(d.tolls));

  json tolls = json::object();
  for (VehicleClass c : kDecisionClasses) tolls[std::string(class_key(c))] = d.tolls.tau[index_of(c)];
  const json doc{{"tau_star", tau_star},   {"phi_1_star", uniform.phi_1_star}, {"case", std::string(d.case_label)},
                 {"tolls", tolls},         {"equilibrium", io::to_json(h)},    {"j_best_uniform", uniform.j_best}};
  if (!o.out.empty()) io::write_text(o.out, doc.dump(2) + "\n");
  if (o.json) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::cout << "tau* = " << num(tau_star) << ", phi1* = " << num(uniform.phi_1_star) << ", case " << d.case_label
              << "\n";
    std::cout << "tolls = " << triple(d.tolls.tau) << " for (HV_LO, HV_HO, AV_LO)\n";
    std::cout << "differentiated equilibrium: phi_1 = " << num(h.phi_1) << ", J = " << num(h.j)
              << " (best-case J under tau* = " << num(uniform.j_best) << ")\n";
  }
  return 0;
}

std::string interval_text(const AlphaInterval& a) {
  if (a.empty()) return "empty";
  return "[" + num(a.lo) + ", " + num(a.hi) + "]";
}

int cmd_resilience(const Options& o) {
  const io::ScenarioFile file = io::load_scenario(o.scenario);
  const Scenario& s = file.scenario;
  const auto swept = parse_vehicle_class(o.swept_class);
  if (!swept || !is_decision(*swept)) {
    throw io::SchemaError("--class", "expected one of HV_LO, HV_HO, AV_LO");
  }
  const std::vector<double> grid = linear_grid(0.0, 1.0, o.grid_step.value_or(0.01));
  const MisbehaviorSweep sweep = sweep_misbehavior(s, *swept, grid);
  if (!o.out.empty()) io::write_text(o.out, io::misbehavior_csv(sweep));

  const Scenario honest = s.with_misbehavior({});
  if (o.json) {
    std::cout << (sweep.report ? io::to_json(*sweep.report, honest) : json(nullptr)).dump(2) << "\n";
    return 0;
  }
  if (!sweep.report) {
    std::cout << "no split class without misbehavior; every row is uncharacterized\n";
    return 0;
  }
  const ResilienceReport& r = *sweep.report;
  const auto names = [](const std::vector<VehicleClass>& v) {
    std::string out;
    for (VehicleClass c : v) out += (out.empty() ? "" : ",") + std::string(class_name(c));
    return out.empty() ? std::string("-") : out;
  };
  const std::string label = "alpha[" + std::string(class_name(*swept)) + "]";
  std::cout << "split class: " << class_name(r.split_class) << "; Q-: " << names(r.q_minus)
            << "; Q+: " << names(r.q_plus) << "; phi1* = " << num(r.phi_1_star) << "\n";
  std::cout << "primary region: " << label << " in " << interval_text(*r.primary_alpha)
            << " (total delay " << variation_name(classify_delay_variation(r, honest)) << ")\n";
  for (std::size_t i = 0; i < r.secondary.size(); ++i) {
    const SecondaryRegion& reg = r.secondary[i];
    std::cout << "secondary region via " << class_name(reg.g_minus) << ": phi~ = " << num(reg.phi_tilde) << ", "
              << label << " in " << interval_text(*reg.alpha) << " (total delay "
              << variation_name(classify_delay_variation(r, honest, i)) << ")\n";
  }
  return 0;
}

void add_common(CLI::App* sub, Options& o, bool grid = true) {
  sub->add_option("scenario", o.scenario, "Scenario JSON file")->required();
  sub->add_flag("--json", o.json, "Machine-readable JSON output");
  sub->add_option("--out", o.out, "Output path");
  if (grid) sub->add_option("--grid-step", o.grid_step, "Sweep grid step")->check(CLI::PositiveNumber);
  sub->add_option("--tol", o.tol, "Equilibrium verification tolerance (delay units)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-choice equilibria, toll design and misbehavior resilience for a two-lane tolled freeway"};
  app.require_subcommand(1);
  Options o;

  auto* solve = app.add_subcommand("solve", "Solve the lane-choice equilibrium of a scenario");
  add_common(solve, o, false);
  solve->add_option("--check-flow", o.check_flow, "Verify the flows in a JSON file instead of solving");

  auto* design_toll = app.add_subcommand("design-toll", "Sweep uniform tolls and pick the best one");
  add_common(design_toll, o);
  design_toll->add_option("--objective", o.objective, "best or worst")->check(CLI::IsMember({"best", "worst"}));
  design_toll->add_option("--tau-max", o.tau_max, "Upper end of the toll grid");

  auto* design_threshold = app.add_subcommand("design-threshold", "Sweep the occupancy threshold");
  add_common(design_threshold, o);
  design_threshold->add_option("--objective", o.objective, "best or worst")->check(CLI::IsMember({"best", "worst"}));

  auto* compare = app.add_subcommand("compare-policy", "Compare toll, HOV-lane and AV-lane policies");
  add_common(compare, o);
  compare->add_option("--tau-max", o.tau_max, "Upper end of the toll grid (default 1)");

  auto* differentiate = app.add_subcommand("differentiate", "Class-specific tolls reaching the best case");
  add_common(differentiate, o);
  differentiate->add_option("--tau-star", o.tau_star, "Uniform toll to differentiate (default: best-case optimum)");
  differentiate->add_option("--tau-minus", o.tau_minus, "Low toll (default tau*/2)");
  differentiate->add_option("--tau-plus", o.tau_plus, "High toll (default 2 tau*)");

  auto* resilience = app.add_subcommand("resilience", "Resilient regions and a misbehavior sweep");
  add_common(resilience, o);
  resilience->add_option("--class", o.swept_class, "Misbehaving class (default HV_LO)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (design_toll->parsed()) return cmd_design_toll(o);
    if (design_threshold->parsed()) return cmd_design_threshold(o);
    if (compare->parsed()) return cmd_compare_policy(o);
    if (differentiate->parsed()) return cmd_differentiate(o);
    if (resilience->parsed()) return cmd_resilience(o);
  } catch (const io::SchemaError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const io::OutputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const NotApplicable& e) {
    std::cerr << "not applicable: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
