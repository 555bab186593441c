// dnncover: plan, simulate, render and validate layered coverage scenarios.
//
// Exit codes: 0 ok, 1 domain error, 2 usage error.

#include "dnncover/errors.hpp"
#include "dnncover/formation.hpp"
#include "dnncover/planner.hpp"
#include "dnncover/render.hpp"
#include "dnncover/scenario.hpp"
#include "dnncover/sim.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace dnncover;

namespace {

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

std::string layer_summary(const LayeredGraph& g) {
  std::ostringstream os;
  std::size_t n = 0;
  for (const auto& l : g.layers) n += l.size();
  os << "N = " << n << ", M = " << g.depth() << ", layer sizes:";
  for (const auto& l : g.layers) os << " " << l.size();
  return os.str();
}

int cmd_plan(const fs::path& scenario_path, const std::string& out_override) {
  const ScenarioFile file = load_scenario(scenario_path);
  PlanOptions options;
  options.layering = file.layering;
  const Plan p = plan(file.config, file.heat_map(), file.boundary_targets, file.schedule.t0, file.schedule.tf, options);
  const auto violations = validate_dnn(p.graph, file.config);
  if (!violations.empty()) throw Error("planned graph failed validation: " + violations.front().message);

  const fs::path out = out_override.empty() ? output_directory(file) / (file.name + ".plan.json") : fs::path(out_override);
  write_file(out, plan_to_json(p, file.hash).dump(2) + "\n");

  std::size_t fallback = 0;
  for (const auto& [id, used] : p.desired.used_fallback) fallback += used ? 1 : 0;
  std::cout << file.name << ": " << layer_summary(p.graph) << "\n"
            << "core leader: " << p.graph.core_id << ", boundary agents: " << p.graph.boundary_ids.size()
            << ", centroid fallbacks: " << fallback << "\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

int cmd_simulate(const fs::path& scenario_path, const fs::path& plan_path) {
  const ScenarioFile file = load_scenario(scenario_path);
  const nlohmann::json doc = read_json(plan_path);
  Scenario scenario = assemble_scenario(file, plan_from_json(doc), plan_scenario_hash(doc));

  const auto started = std::chrono::steady_clock::now();
  const Trajectory traj = run(scenario);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  const Metrics m = metrics(traj, scenario.plan);

  const fs::path dir = output_directory(file);
  std::ostringstream csv;
  write_trajectory_csv(traj, csv);
  write_file(dir / (file.name + ".trajectory.csv"), csv.str());
  write_file(dir / (file.name + ".metrics.json"), metrics_to_json(m).dump(2) + "\n");

  std::size_t unsettled = 0;
  for (const auto& [id, t] : m.settling_time) unsettled += t ? 0 : 1;
  std::printf("%s: simulated %zu agents over %zu samples (%.1f s wall)\n", file.name.c_str(), traj.ids.size(),
              traj.times.size(), seconds);
  std::printf("final deviation      %.6g m (agent %d)\n", m.final_deviation, m.final_deviation_agent);
  std::printf("max tracking error   %.6g m (agent %d, t = %.2f s)\n", m.max_tracking_error, m.max_tracking_agent,
              m.max_tracking_time);
  std::printf("min planar distance  %.6g m\n", m.min_planar_distance);
  std::printf("min separation       %.6g m (agents %d, %d)%s\n", m.min_separation, m.min_separation_pair[0],
              m.min_separation_pair[1], m.safety_violation ? "  BELOW SAFETY DISTANCE" : "");
  std::printf("unsettled agents     %zu\n", unsettled);
  std::printf("wrote %s\n", (dir / (file.name + ".trajectory.csv")).string().c_str());
  return 0;
}

int cmd_render(const fs::path& traj_path, const fs::path& scenario_path, const std::vector<double>& times,
               bool times_given, const std::string& plan_path) {
  const ScenarioFile file = load_scenario(scenario_path);
  const std::vector<double>& frame_times = times_given ? times : file.output.frame_times;
  if (frame_times.empty()) return 0;

  std::ifstream in(traj_path);
  if (!in) throw ScenarioError(traj_path.string() + ": cannot open");
  const Trajectory traj = read_trajectory_csv(in);
  for (double t : frame_times) (void)frame_index(traj, t);

  std::optional<Plan> p;
  if (!plan_path.empty()) p = plan_from_json(read_json(plan_path));
  const LayeredGraph graph = p ? p->graph : build_graph(file.config, file.layering);
  const HeatMap map = file.heat_map();

  const fs::path dir = output_directory(file);
  for (double t : frame_times) {
    FrameInput input{&traj, &graph, &map, p ? &p->desired.positions : nullptr};
    char name[64];
    std::snprintf(name, sizeof name, "_t%06.2f.svg", t);
    const fs::path out = dir / (file.name + name);
    write_file(out, render_frame(input, t));
    std::cout << "wrote " << out.string() << "\n";
  }
  return 0;
}

int cmd_validate(const fs::path& scenario_path) {
  const ScenarioFile file = load_scenario(scenario_path);
  const LayeredGraph graph = build_graph(file.config, file.layering);
  const auto violations = validate_dnn(graph, file.config);
  std::cout << file.name << ": " << layer_summary(graph) << "\n";
  for (const Violation& v : violations) std::cout << "violation [" << to_string(v.kind) << "] " << v.message << "\n";
  if (!violations.empty()) return 1;
  std::cout << "scenario is valid\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered decentralized coverage planner and quadcopter team simulator"};
  app.require_subcommand(1);

  std::string scenario, plan_file, traj, out, render_plan;
  std::vector<std::string> time_args;

  auto* plan_cmd = app.add_subcommand("plan", "Build the communication graph and desired formation");
  plan_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
  plan_cmd->add_option("-o,--output", out, "Plan JSON path (default: <output dir>/<name>.plan.json)");

  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the team tracking a plan");
  sim_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
  sim_cmd->add_option("plan", plan_file, "Plan JSON produced by `plan`")->required();

  auto* render_cmd = app.add_subcommand("render", "Write SVG snapshots of a trajectory");
  render_cmd->add_option("trajectory", traj, "Trajectory CSV")->required();
  render_cmd->add_option("scenario", scenario, "Scenario JSON")->required();
  auto* times_opt = render_cmd->add_option("--times", time_args, "Snapshot times in seconds")->expected(0, -1);
  render_cmd->add_option("--plan", render_plan, "Plan JSON; draws desired positions");

  auto* validate_cmd = app.add_subcommand("validate", "Check a scenario and its communication graph");
  validate_cmd->add_option("scenario", scenario, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*plan_cmd) return cmd_plan(scenario, out);
    if (*sim_cmd) return cmd_simulate(scenario, plan_file);
    if (*render_cmd) {
      std::vector<double> times;
      for (const std::string& a : time_args) {
        if (a.empty()) continue;
        std::size_t used = 0;
        double t = std::nan("");
        try {
          t = std::stod(a, &used);
        } catch (const std::exception&) {
        }
        if (used != a.size() || !std::isfinite(t)) {
          std::cerr << "--times: not a number: " << a << "\n";
          return 2;
        }
        times.push_back(t);
      }
      return cmd_render(traj, scenario, times, times_opt->count() > 0, render_plan);
    }
    if (*validate_cmd) return cmd_validate(scenario);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
