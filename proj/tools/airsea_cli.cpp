#include <airsea/pipeline.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace airsea;

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

int plan(const std::string& scenario, const std::string& strategy, std::uint64_t seed, const std::string& out,
         const PipelineOptions& opts) {
  const Scenario s = load_scenario(scenario);
  const MissionResult r = run_mission(s, parse_strategy(strategy), seed, opts);
  emit_outputs(r, s, out);
  std::printf("%s seed %llu: %d hover points, %zu slots (%.0f s), energy %.1f J "
              "(UAV propulsion %.1f, transmit %.2f, USV %.1f)\n",
              to_string(r.strategy).c_str(), static_cast<unsigned long long>(seed), r.hover_points(),
              r.trajectory.slots(), r.duration(), r.energy.total(), r.energy.uav_propulsion,
              r.energy.uav_transmit, r.energy.usv_propulsion);
  std::printf("audit %s, outputs in %s\n", r.audit.pass() ? "pass" : "FAIL", out.c_str());
  return r.audit.pass() ? 0 : 1;
}

int validate_dir(const std::string& dir) {
  const ValidationReport rep = validate_outputs(dir);
  std::printf("D_c at p_c: %.3f m\n", rep.comm_distance);
  for (const auto& e : rep.audit.entries)
    std::printf("%-24s max violation %.3e over %d checks  %s\n", e.family.c_str(), e.max_violation, e.checked,
                e.pass ? "ok" : "FAIL");
  std::printf("energy reported %.6f J, recomputed %.6f J\n", rep.energy_reported, rep.energy_recomputed);
  for (const auto& e : rep.errors) std::printf("error: %s\n", e.c_str());
  std::printf("%s\n", rep.pass() ? "valid" : "INVALID");
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UAV-USV joint inspection planner"};
  app.require_subcommand(1);

  PipelineOptions opts;
  std::string scenario, strategy = "proposed", out;
  std::uint64_t seed = 1;
  auto* plan_cmd = app.add_subcommand("plan", "Plan one mission and write its outputs");
  plan_cmd->add_option("--scenario", scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--strategy", strategy, "proposed | sequential | leader-follower")
      ->check(CLI::IsMember({"proposed", "sequential", "leader-follower"}));
  plan_cmd->add_option("--seed", seed, "Random seed");
  plan_cmd->add_option("--out", out, "Output directory")->required();
  plan_cmd->add_option("--tol", opts.tol, "Relative SCA / AO tolerance")->check(CLI::PositiveNumber);
  plan_cmd->add_option("--max-iters", opts.max_iterations, "SCA / AO iteration cap")->check(CLI::PositiveNumber);

  SweepOptions so;
  std::string axis, values, strategies = "proposed", sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run strategies over Gaussian layouts for each axis value");
  sweep_cmd->add_option("--scenario", scenario, "Template scenario JSON")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis, "K | sigma | gamma_s | gamma_c | Z | current")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated axis values")->required();
  sweep_cmd->add_option("--seeds", so.seeds, "Layouts per value")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--first-seed", so.first_seed, "Seed of the first layout");
  sweep_cmd->add_option("--strategies", strategies, "Comma-separated strategies");
  sweep_cmd->add_option("--K", so.K, "Targets per layout");
  sweep_cmd->add_option("--sigma", so.sigma, "Layout dispersion [m]");
  sweep_cmd->add_option("--field", so.field, "Field side [m]");
  sweep_cmd->add_option("--threads", so.threads, "Worker threads (0: all cores)");
  sweep_cmd->add_option("--tol", so.pipeline.tol, "Relative SCA / AO tolerance");
  sweep_cmd->add_option("--max-iters", so.pipeline.max_iterations, "SCA / AO iteration cap");
  sweep_cmd->add_option("--out", sweep_out, "Write the table as JSON here");

  std::string result;
  auto* validate_cmd = app.add_subcommand("validate", "Re-audit an output directory");
  validate_cmd->add_option("--result", result, "Directory written by plan")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*plan_cmd) return plan(scenario, strategy, seed, out, opts);
    if (*validate_cmd) return validate_dir(result);
    so.axis = parse_axis(axis);
    so.values = parse_list(values);
    so.strategies.clear();
    std::stringstream ss(strategies);
    for (std::string item; std::getline(ss, item, ',');) so.strategies.push_back(parse_strategy(item));
    const auto rows = sweep(load_scenario(scenario), so);
    std::printf("%-10s %-16s %5s %5s %14s %12s %12s %8s\n", to_string(so.axis).c_str(), "strategy", "runs", "fail",
                "energy_J", "sd_J", "duration_s", "hover");
    for (const auto& r : rows)
      std::printf("%-10g %-16s %5d %5d %14.1f %12.1f %12.1f %8.2f\n", r.value, to_string(r.strategy).c_str(), r.runs,
                  r.failures, r.energy_mean, r.energy_sd, r.duration_mean, r.hover_points_mean);
    if (!sweep_out.empty()) {
      std::ofstream f(sweep_out);
      f << to_json(rows, so).dump(2) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
