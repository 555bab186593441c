#pragma once

#include "dnncover/heatmap.hpp"
#include "dnncover/planner.hpp"
#include "dnncover/quadcopter.hpp"

#include <map>
#include <optional>
#include <vector>

namespace dnncover {

struct VehicleParams {
  double mass = 1.0;  // kg
  PoleSpec poles;
  SingularityGuard guard;
};

enum class StartMode {
  kReference,    // start at a_i, blend weights over [t0, tf]
  kEquilibrium,  // start at p_i with final weights and leaders pinned
};

struct Scenario {
  ReferenceConfiguration config;
  HeatMap map;
  std::map<AgentId, Vec2> boundary_targets;
  Plan plan;
  VehicleParams vehicle;
  double dt = 0.01;           // s
  double t_end = 120.0;       // s
  double log_interval = 0.0;  // s; 0 logs every tick
  std::map<AgentId, double> altitudes;  // m
  StartMode start = StartMode::kReference;
};

/// Default stratification: 10 m plus the agent's layer index.
std::map<AgentId, double> layered_altitudes(const LayeredGraph& graph, double base = 10.0);

/// Plans and assembles a scenario. Altitudes default to layered_altitudes.
Scenario make_scenario(ReferenceConfiguration config, HeatMap map, std::map<AgentId, Vec2> boundary_targets,
                       double t0, double tf, double t_end, double dt, VehicleParams vehicle = {},
                       std::optional<std::map<AgentId, double>> altitudes = std::nullopt,
                       StartMode start = StartMode::kReference, const PlanOptions& plan_options = {});

/// Throws InvalidInputError when t_end < tf, dt is outside (0, 0.02], an
/// altitude is missing or non-positive, or the log interval is not a whole
/// number of steps dividing the run.
void validate_scenario(const Scenario& scenario);

/// Desired 3D input of agent `id`: leaders follow (1 - beta) a_i + beta p_i,
/// followers the weighted sum of their in-neighbors' live planar positions.
/// Throws CoordinationError when a needed neighbor position is missing.
Vec3 desired_input(AgentId id, double t, const std::map<AgentId, Vec3>& live_positions, const Plan& plan,
                   const ReferenceConfiguration& config, double altitude);

struct AgentSample {
  Vec3 position;
  Vec3 desired;
  double phi;
  double theta;
  double psi;
  double thrust;
};

struct Trajectory {
  std::vector<AgentId> ids;                       // ascending
  std::vector<double> times;                      // uniform grid
  std::vector<std::vector<AgentSample>> samples;  // [time index][agent index]

  std::size_t agent_index(AgentId id) const;
};

/// Synchronous-snapshot simulation of the whole team from t0 to t_end.
/// Throws DivergenceError (with time and agent) or SingularityError with context.
Trajectory run(const Scenario& scenario);

struct MetricsOptions {
  double settle_tolerance = 0.05;  // m
  double safety_distance = 1.0;    // m
};

struct Metrics {
  double max_tracking_error = 0.0;
  AgentId max_tracking_agent = -1;
  double max_tracking_time = 0.0;
  double final_deviation = 0.0;
  AgentId final_deviation_agent = -1;
  double min_planar_distance = 0.0;
  double min_separation = 0.0;  // 3D
  std::array<AgentId, 2> min_separation_pair{-1, -1};
  double min_separation_time = 0.0;
  bool safety_violation = false;
  std::map<AgentId, std::optional<double>> settling_time;
};

/// Final targets are (p_i, commanded altitude at the last sample).
Metrics metrics(const Trajectory& traj, const Plan& plan, const MetricsOptions& options = {});

}  // namespace dnncover
