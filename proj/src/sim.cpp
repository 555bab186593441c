#include "dnncover/sim.hpp"

#include "dnncover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dnncover {

std::map<AgentId, double> layered_altitudes(const LayeredGraph& graph, double base) {
  std::map<AgentId, double> out;
  for (std::size_t l = 0; l < graph.layers.size(); ++l) {
    for (AgentId id : graph.layers[l]) out[id] = base + static_cast<double>(l);
  }
  return out;
}

Scenario make_scenario(ReferenceConfiguration config, HeatMap map, std::map<AgentId, Vec2> boundary_targets,
                       double t0, double tf, double t_end, double dt, VehicleParams vehicle,
                       std::optional<std::map<AgentId, double>> altitudes, StartMode start,
                       const PlanOptions& plan_options) {
  Plan p = plan(config, map, boundary_targets, t0, tf, plan_options);
  auto alt = altitudes ? std::move(*altitudes) : layered_altitudes(p.graph);
  Scenario s{std::move(config), std::move(map), std::move(boundary_targets), std::move(p), vehicle, dt, t_end,
             0.0, std::move(alt), start};
  validate_scenario(s);
  return s;
}

namespace {

long long step_count(double span, double dt) { return std::llround(span / dt); }

}  // namespace

void validate_scenario(const Scenario& s) {
  const double t0 = s.plan.schedule.t0();
  const double tf = s.plan.schedule.tf();
  if (!(s.dt > 0.0 && s.dt <= 0.02)) throw InvalidInputError("dt must lie in (0, 0.02] s");
  if (!(s.t_end >= tf)) throw InvalidInputError("t_end must not precede tf");
  const long long steps = step_count(s.t_end - t0, s.dt);
  if (std::abs(static_cast<double>(steps) * s.dt - (s.t_end - t0)) > 1e-9 * std::max(1.0, s.t_end - t0)) {
    throw InvalidInputError("t_end - t0 must be a whole number of steps");
  }
  if (s.log_interval < 0.0) throw InvalidInputError("log interval must be non-negative");
  if (s.log_interval > 0.0) {
    const long long stride = step_count(s.log_interval, s.dt);
    if (stride < 1 || std::abs(static_cast<double>(stride) * s.dt - s.log_interval) > 1e-9 * s.log_interval ||
        steps % stride != 0) {
      throw InvalidInputError("log interval must be a whole number of steps that divides the run");
    }
  }
  for (AgentId id : s.config.ids()) {
    auto it = s.altitudes.find(id);
    if (it == s.altitudes.end()) throw InvalidInputError("agent " + std::to_string(id) + " has no altitude");
    if (!(it->second > 0.0)) throw InvalidInputError("agent " + std::to_string(id) + " altitude must be positive");
  }
  if (!(s.vehicle.mass > 0.0)) throw InvalidInputError("vehicle mass must be positive");
}

Vec3 desired_input(AgentId id, double t, const std::map<AgentId, Vec3>& live_positions, const Plan& plan,
                   const ReferenceConfiguration& config, double altitude) {
  const auto& schedule = plan.schedule;
  if (plan.graph.is_leader(id)) {
    const double b = beta(std::max(t, schedule.t0()), schedule.t0(), schedule.tf());
    const Vec2 xy = (1.0 - b) * config.position(id) + b * plan.desired.positions.at(id);
    return {xy.x(), xy.y(), altitude};
  }
  const WeightTriple w = weight_at(t, schedule, id);
  Vec2 xy = Vec2::Zero();
  for (std::size_t k = 0; k < 3; ++k) {
    auto it = live_positions.find(w.neighbors[k]);
    if (it == live_positions.end()) {
      throw CoordinationError("agent " + std::to_string(id) + " has no position for in-neighbor " +
                              std::to_string(w.neighbors[k]));
    }
    xy += w.values[k] * it->second.head<2>();
  }
  return {xy.x(), xy.y(), altitude};
}

std::size_t Trajectory::agent_index(AgentId id) const {
  auto it = std::lower_bound(ids.begin(), ids.end(), id);
  if (it == ids.end() || *it != id) throw LookupError("agent " + std::to_string(id) + " is not in the trajectory");
  return static_cast<std::size_t>(it - ids.begin());
}

namespace {

// Index-based form of the coordination law used inside the tick loop.
struct Coordinator {
  struct Entry {
    bool leader = false;
    Vec2 start = Vec2::Zero();
    Vec2 goal = Vec2::Zero();
    std::array<std::size_t, 3> nbr{};
    WeightValues initial{};
    WeightValues final{};
    double altitude = 0.0;
  };

  std::vector<Entry> entries;
  double t0 = 0.0;
  double tf = 1.0;
  bool equilibrium = false;

  Coordinator(const Scenario& s, const std::vector<AgentId>& ids) {
    t0 = s.plan.schedule.t0();
    tf = s.plan.schedule.tf();
    equilibrium = s.start == StartMode::kEquilibrium;
    auto index_of = [&](AgentId id) {
      return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    for (AgentId id : ids) {
      Entry e;
      e.altitude = s.altitudes.at(id);
      e.goal = s.plan.desired.positions.at(id);
      e.start = equilibrium ? e.goal : s.config.position(id);
      e.leader = s.plan.graph.is_leader(id);
      if (!e.leader) {
        const FollowerWeights& fw = s.plan.schedule.at(id);
        for (std::size_t k = 0; k < 3; ++k) e.nbr[k] = index_of(fw.neighbors[k]);
        e.initial = fw.initial;
        e.final = fw.final;
      }
      entries.push_back(e);
    }
  }

  void desired(double t, const std::vector<Vec3>& positions, std::vector<Vec3>& out) const {
    const double teff = equilibrium ? std::max(t, tf) : t;
    const double b = beta(teff, t0, tf);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const Entry& e = entries[i];
      Vec2 xy;
      if (e.leader) {
        xy = (1.0 - b) * e.start + b * e.goal;
      } else {
        xy.setZero();
        for (std::size_t k = 0; k < 3; ++k) {
          const double w = teff >= tf ? e.final[k] : (1.0 - b) * e.initial[k] + b * e.final[k];
          xy += w * positions[e.nbr[k]].head<2>();
        }
      }
      out[i] = Vec3(xy.x(), xy.y(), e.altitude);
    }
  }
};

std::string at_time(AgentId id, double t) {
  std::ostringstream os;
  os << "agent " << id << " at t = " << t << " s";
  return os.str();
}

}  // namespace

Trajectory run(const Scenario& scenario) {
  validate_scenario(scenario);
  const double t0 = scenario.plan.schedule.t0();
  const double dt = scenario.dt;
  const double mass = scenario.vehicle.mass;
  const long long steps = step_count(scenario.t_end - t0, dt);
  const long long stride = scenario.log_interval > 0.0 ? step_count(scenario.log_interval, dt) : 1;
  const ControllerGains gains = design_gains(scenario.vehicle.poles, mass);

  Trajectory traj;
  traj.ids = scenario.config.ids();
  const std::size_t n = traj.ids.size();
  const Coordinator coordinator(scenario, traj.ids);

  std::vector<QuadState> states(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = coordinator.entries[i];
    states[i] = QuadState::hover(Vec3(e.start.x(), e.start.y(), e.altitude), mass);
  }
  std::vector<Vec3> positions(n);
  std::vector<Vec3> desired(n);
  traj.times.reserve(static_cast<std::size_t>(steps / stride + 1));
  traj.samples.reserve(static_cast<std::size_t>(steps / stride + 1));

  for (long long k = 0;; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    for (std::size_t i = 0; i < n; ++i) positions[i] = states[i].position();
    coordinator.desired(t, positions, desired);

    if (k % stride == 0) {
      traj.times.push_back(t);
      std::vector<AgentSample> row(n);
      for (std::size_t i = 0; i < n; ++i) {
        const QuadState& s = states[i];
        row[i] = {positions[i], desired[i], s.phi(), s.theta(), s.psi(), s.thrust()};
      }
      traj.samples.push_back(std::move(row));
    }
    if (k == steps) break;

    for (std::size_t i = 0; i < n; ++i) {
      const AgentId id = traj.ids[i];
      try {
        const Input u = tracking_control(states[i], FlatState::setpoint(desired[i]), gains, scenario.vehicle.guard);
        states[i] = step(states[i], u, dt, mass);
      } catch (const SingularityError& e) {
        throw SingularityError(at_time(id, t) + ": " + e.what());
      } catch (const TransformationError& e) {
        throw SingularityError(at_time(id, t) + ": " + e.what());
      } catch (const DivergenceError&) {
        throw DivergenceError(at_time(id, t + dt) + ": state became non-finite");
      }
      if (states[i].position().norm() > 1e6) {
        throw DivergenceError(at_time(id, t + dt) + ": position left the 1e6 m envelope");
      }
    }
  }
  return traj;
}

Metrics metrics(const Trajectory& traj, const Plan& plan, const MetricsOptions& options) {
  Metrics m;
  const std::size_t n = traj.ids.size();
  if (traj.samples.empty() || n == 0) return m;

  std::vector<Vec3> goal(n);
  const auto& last = traj.samples.back();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 p = plan.desired.positions.at(traj.ids[i]);
    goal[i] = Vec3(p.x(), p.y(), last[i].desired.z());
  }

  m.min_planar_distance = std::numeric_limits<double>::infinity();
  m.min_separation = std::numeric_limits<double>::infinity();
  std::vector<std::optional<double>> settle(n);
  std::vector<bool> settled(n, false);

  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& row = traj.samples[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double err = (row[i].position - row[i].desired).norm();
      if (err > m.max_tracking_error) {
        m.max_tracking_error = err;
        m.max_tracking_agent = traj.ids[i];
        m.max_tracking_time = traj.times[k];
      }
      const bool within = (row[i].position - goal[i]).norm() <= options.settle_tolerance;
      if (within && !settled[i]) {
        settled[i] = true;
        settle[i] = traj.times[k];
      } else if (!within) {
        settled[i] = false;
        settle[i].reset();
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        const Vec3 d = row[i].position - row[j].position;
        const double planar = d.head<2>().norm();
        m.min_planar_distance = std::min(m.min_planar_distance, planar);
        const double sep = d.norm();
        if (sep < m.min_separation) {
          m.min_separation = sep;
          m.min_separation_pair = {traj.ids[i], traj.ids[j]};
          m.min_separation_time = traj.times[k];
        }
      }
    }
  }
  m.safety_violation = m.min_separation < options.safety_distance;

  for (std::size_t i = 0; i < n; ++i) {
    const double dev = (last[i].position - goal[i]).norm();
    if (dev > m.final_deviation) {
      m.final_deviation = dev;
      m.final_deviation_agent = traj.ids[i];
    }
    m.settling_time[traj.ids[i]] = settle[i];
  }
  return m;
}

}  // namespace dnncover
