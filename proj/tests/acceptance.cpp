// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "properties.hpp"
#include "scenarios.hpp"
#include "tollane/hetero_toll.hpp"
#include "tollane/oracle.hpp"
#include "tollane/resilience.hpp"
#include "tollane/scenario_io.hpp"

using namespace tollane;

namespace {

constexpr double kThresholdTol = 1e-10;
constexpr double kFlowTol = 1e-8;
constexpr double kExactFlowTol = 1e-12;  // "exact" flows, up to root round-off
constexpr double kJTol = 1e-8;
constexpr double kOracleJTol = 0.2;
constexpr double kOracleStep = 0.01;
constexpr double kTauReadTol = 0.05;
constexpr double kRangeShare = 0.10;
constexpr double kPolicyStep = 0.05;
constexpr double kThresholdStep = 0.05;
constexpr double kIntervalTol = 1e-3;

int failures = 0;

Scenario load(const std::string& name) { return io::load_scenario(cli::data(name)).scenario; }

std::string fmt(double v) { return io::format_number(v); }

std::string triple(const DecisionMap<double>& v) {
  return "(" + fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]) + ")";
}

bool near(const DecisionMap<double>& a, const DecisionMap<double>& b, double tol) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!(std::abs(a[i] - b[i]) <= tol)) return false;
  }
  return true;
}

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void criterion_1() {
  const Scenario s = load("example1a.json");
  const double tau_high = uniqueness_thresholds(s).tau_high;
  const EquilibriumResult r = solve_equilibrium(s);
  const bool ok = std::abs(tau_high - 0.7) <= kThresholdTol && near(r.best.lane1, {0, 1, 0}, kExactFlowTol) &&
                  near(r.worst.lane1, {1, 0, 0}, kExactFlowTol);
  report(1, ok, "tau_high = " + fmt(tau_high) + ", best " + triple(r.best.lane1) + ", worst " +
                    triple(r.worst.lane1));
}

void criterion_2() {
  const Scenario s = load("example1b.json");
  const double tau_high = uniqueness_thresholds(s).tau_high;
  const EquilibriumResult r = solve_equilibrium(s);
  const bool ok = std::abs(tau_high - 0.74) <= kThresholdTol && near(r.best.lane1, {0, 0, 3}, kFlowTol) &&
                  near(r.worst.lane1, {1.2, 0, 0}, kFlowTol);
  report(2, ok, "tau_high = " + fmt(tau_high) + ", best " + triple(r.best.lane1) + ", worst " +
                    triple(r.worst.lane1));
}

void criterion_3() {
  const Scenario s = load("example1a.json");
  const EquilibriumResult r = solve_equilibrium(s);
  const auto ex = oracle::brute_force_j_extremes(s, r.phi_1_star, {kOracleStep});
  const bool ok = std::abs(r.j_best - 54.4) <= kJTol && std::abs(r.j_worst - 55.9) <= kJTol &&
                  std::abs(ex.j_min - r.j_best) <= kOracleJTol && std::abs(ex.j_max - r.j_worst) <= kOracleJTol;
  report(3, ok, "j_best = " + fmt(r.j_best) + ", j_worst = " + fmt(r.j_worst) + "; oracle [" + fmt(ex.j_min) +
                    ", " + fmt(ex.j_max) + "] over " + std::to_string(ex.points) + " grid points");
}

void criterion_4() {
  const Scenario s = load("example2.json");
  const auto grid = default_toll_grid(s, 0.01);
  const TollDesign worst = optimize_uniform_toll(s, DesignObjective::WorstCaseJ, grid);
  const TollDesign best = optimize_uniform_toll(s, DesignObjective::BestCaseJ, grid);
  const bool ok = worst.tau_star == 0.0 && std::abs(best.tau_star - 0.25) <= kTauReadTol;
  report(4, ok, "worst-case argmin tau = " + fmt(worst.tau_star) + ", best-case argmin tau = " +
                    fmt(best.tau_star) + " (J = " + fmt(best.objective_value) + ")");
}

void criterion_5() {
  const io::ScenarioFile file = io::load_scenario(cli::data("example3.json"));
  const CarpoolModel model = file.carpool->model_fn();
  const auto grid = linear_grid(model.n_min, model.n_max, kThresholdStep);
  const ThresholdDesign d = optimize_occupancy_threshold(model, file.scenario, DesignObjective::WorstCaseJ, grid);
  const auto& rows = d.table.rows;
  bool monotone = rows.size() == grid.size();
  for (std::size_t k = 1; k < rows.size(); ++k) monotone = monotone && rows[k].j_worst >= rows[k - 1].j_worst;
  const auto [lo, hi] = std::minmax_element(rows.begin(), rows.end(),
                                            [](const SweepRow& a, const SweepRow& b) { return a.j_best < b.j_best; });
  const double range = hi->j_best - lo->j_best;
  const bool ok = monotone && range < kRangeShare * rows.front().j_best;
  report(5, ok, std::string("worst-case J ") + (monotone ? "non-decreasing" : "NOT monotone") + " from " +
                    fmt(rows.front().j_worst) + " to " + fmt(rows.back().j_worst) + "; best-case J range " +
                    fmt(range) + " vs n=2 value " + fmt(rows.front().j_best));
}

void criterion_6() {
  const Scenario s = load("example4.json");
  const std::array policies{LanePolicy::Hovl, LanePolicy::Dla};
  const auto grid = linear_grid(0.0, 1.0, kPolicyStep);
  const auto tables = compare_policies(s, policies, grid);
  const auto& hovl = tables.at(LanePolicy::Hovl).rows;
  const auto& dla = tables.at(LanePolicy::Dla).rows;
  int bad = 0;
  double margin = INFINITY;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(hovl[k].j_worst <= dla[k].j_worst)) ++bad;
    margin = std::min(margin, dla[k].j_worst - hovl[k].j_worst);
  }
  report(6, bad == 0 && hovl.size() == grid.size(),
         std::to_string(grid.size()) + " tolls, " + std::to_string(bad) +
             " violations, smallest DLA - HOVL worst-case gap " + fmt(margin));
}

void criterion_7() {
  const Scenario s = load("example5.json");
  ResilienceReport r = primary_resilient_region(s, VehicleClass::HvLo);
  secondary_resilient_regions(r, s);
  const bool split = r.split_class == VehicleClass::HvHo;
  const bool phi = std::abs(r.phi_1_star - 30.0) <= kFlowTol;
  const bool primary = r.primary_alpha && std::abs(r.primary_alpha->hi - 0.5) <= kFlowTol;
  const SecondaryRegion* sec = r.secondary.empty() ? nullptr : &r.secondary.front();
  const bool secondary = sec && sec->alpha && std::abs(sec->phi_tilde - 33.5) <= kFlowTol &&
                         std::abs(sec->alpha->lo - 0.597) <= kIntervalTol &&
                         std::abs(sec->alpha->hi - 0.847) <= kIntervalTol;
  const bool increasing = classify_delay_variation(r, s) == DelayVariation::Increasing;
  std::ostringstream d;
  d << "split " << class_name(r.split_class) << ", phi1* = " << fmt(r.phi_1_star) << ", alpha_m = "
    << (r.primary_alpha ? fmt(r.primary_alpha->hi) : "-");
  if (sec && sec->alpha) {
    d << ", secondary phi~ = " << fmt(sec->phi_tilde) << " alpha in [" << fmt(sec->alpha->lo) << ", "
      << fmt(sec->alpha->hi) << "]";
  }
  d << ", " << variation_name(classify_delay_variation(r, s));
  report(7, split && phi && primary && secondary && increasing, d.str());
}

void criterion_8() {
  using properties::Outcome;
  const std::uint64_t seed = fixtures::kSeed;
  const Outcome outcomes[] = {properties::oracle_agreement(seed),  properties::vertex_extremality(seed),
                              properties::exchange_sign(seed),     properties::differentiation_round_trip(seed),
                              properties::buffering(seed),         properties::delay_variation(seed)};
  bool ok = true;
  std::string detail = "seed " + std::to_string(seed) + ", " + std::to_string(properties::kScenarioCount) +
                       " scenarios";
  for (const Outcome& o : outcomes) {
    ok = ok && o.ok();
    detail += "\n    " + std::string("(") + char('a' + (&o - outcomes)) + ") " + o.summary();
  }
  report(8, ok, detail);
}

void criterion_9() {
  std::string detail;
  bool ok = true;
  for (const char* name : {"example1a.json", "example1b.json", "example2.json", "example3.json", "example4.json",
                           "example5.json"}) {
    const cli::Run r = cli::run(std::string("solve ") + cli::data(name), "acc_solve");
    if (r.code != 0) {
      ok = false;
      detail += std::string(name) + " exit " + std::to_string(r.code) + "; ";
    }
  }
  const auto a = cli::work_dir() / "acc_res_a.csv";
  const auto b = cli::work_dir() / "acc_res_b.csv";
  std::filesystem::remove(a);
  std::filesystem::remove(b);
  const int ra = cli::run("resilience " + cli::data("example5.json") + " --out " + a.string(), "acc_res").code;
  const int rb = cli::run("resilience " + cli::data("example5.json") + " --out " + b.string(), "acc_res").code;
  const std::string ca = cli::read_file(a);
  const bool stable = ra == 0 && rb == 0 && !ca.empty() && ca == cli::read_file(b);
  const int malformed = cli::run("solve " + cli::fixture("malformed_n_ho.json"), "acc_bad").code;
  const int unwritable =
      cli::run("solve " + cli::data("example1a.json") + " --json --out /nonexistent-dir/out.json", "acc_out").code;
  ok = ok && stable && malformed == 2 && unwritable == 3;
  detail += "fixtures solved; resilience CSV " + std::string(stable ? "byte-stable" : "NOT stable") +
            "; malformed exit " + std::to_string(malformed) + ", unwritable exit " + std::to_string(unwritable);
  report(9, ok, detail);
}

}  // namespace

int main() {
  const std::array<void (*)(), 9> criteria{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                           criterion_6, criterion_7, criterion_8, criterion_9};
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    try {
      criteria[n]();
    } catch (const std::exception& e) {
      report(static_cast<int>(n + 1), false, std::string("exception: ") + e.what());
    }
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
