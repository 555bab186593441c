#pragma once

#include "dnncover/errors.hpp"
#include "dnncover/sim.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace dnncover {

/// Parse or validation failure in an input file. The message is prefixed
/// with "<file>:<line>:" when a location is known.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

struct ScheduleSection {
  double t0 = 0.0;
  double tf = 60.0;
  double t_end = 120.0;
  double dt = 0.01;
  double log_interval = 0.0;
  StartMode start = StartMode::kReference;
};

struct OutputSection {
  std::string dir = "out";
  std::vector<double> frame_times;
};

/// In-memory form of a scenario file.
struct ScenarioFile {
  std::string name;
  std::filesystem::path path;
  std::string hash;  // FNV-1a of the canonical JSON, hex
  ReferenceConfiguration config;
  std::vector<Application> applications;
  std::map<AgentId, Vec2> boundary_targets;
  VehicleParams vehicle;
  ScheduleSection schedule;
  std::optional<std::map<AgentId, double>> altitudes;
  double altitude_base = 10.0;
  OutputSection output;
  LayeringOptions layering;

  HeatMap heat_map() const { return HeatMap(applications); }
};

ScenarioFile parse_scenario(const std::string& text, const std::filesystem::path& origin = "<scenario>");
ScenarioFile load_scenario(const std::filesystem::path& path);

std::string fnv1a_hex(const std::string& bytes);

nlohmann::json plan_to_json(const Plan& plan, const std::string& scenario_hash);
/// Rebuilds the in-memory plan. Throws ScenarioError on malformed documents.
Plan plan_from_json(const nlohmann::json& doc);
std::string plan_scenario_hash(const nlohmann::json& doc);

nlohmann::json graph_to_json(const LayeredGraph& graph);
LayeredGraph graph_from_json(const nlohmann::json& doc);

/// Assembles the runnable scenario from a file and a previously computed plan.
/// Throws StalePlanError when the plan was produced from a different scenario.
Scenario assemble_scenario(const ScenarioFile& file, Plan plan, const std::string& plan_hash);

/// One row per (t, agent_id, x, y, z, xd, yd, zd, phi, theta, psi, f).
void write_trajectory_csv(const Trajectory& traj, std::ostream& os);
Trajectory read_trajectory_csv(std::istream& is);

nlohmann::json metrics_to_json(const Metrics& m);

/// Output directory: $DNNCOVER_OUTPUT_DIR if set, else the scenario's output.dir.
std::filesystem::path output_directory(const ScenarioFile& file);

}  // namespace dnncover
