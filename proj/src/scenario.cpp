#include "dnncover/scenario.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace dnncover {

using nlohmann::json;

namespace {

class Locator {
 public:
  Locator(const std::string& text, std::filesystem::path origin) : text_(text), origin_(std::move(origin)) {}

  int line_of_offset(std::size_t offset) const {
    int line = 1;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') ++line;
    }
    return line;
  }

  // Line of the first occurrence of the quoted key, or 0.
  int line_of_key(const std::string& key) const {
    const auto pos = text_.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(pos);
  }

  [[noreturn]] void fail(const std::string& section, const std::string& message) const {
    const int line = line_of_key(section);
    std::ostringstream os;
    os << origin_.string();
    if (line > 0) os << ":" << line;
    os << ": " << section << ": " << message;
    throw ScenarioError(os.str());
  }

 private:
  const std::string& text_;
  std::filesystem::path origin_;
};

Vec2 read_vec2(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected a [x, y] pair");
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

json write_vec2(const Vec2& v) { return json::array({v.x(), v.y()}); }

Mat2 read_cov(const json& j) {
  if (!j.is_array() || j.size() != 2 || j.at(0).size() != 2 || j.at(1).size() != 2) {
    throw std::invalid_argument("covariance must be [[sxx, sxy], [syx, syy]]");
  }
  Mat2 m;
  m << j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(), j[1][1].get<double>();
  return m;
}

template <std::size_t N>
std::array<double, N> read_poles(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw std::invalid_argument(std::string(what) + " must list exactly " + std::to_string(N) + " poles");
  }
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) out[k] = j[k].get<double>();
  return out;
}

AgentId parse_id_key(const std::string& key) {
  std::size_t used = 0;
  const int id = std::stoi(key, &used);
  if (used != key.size()) throw std::invalid_argument("agent id key '" + key + "' is not an integer");
  return id;
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

ScenarioFile parse_scenario(const std::string& text, const std::filesystem::path& origin) {
  const Locator loc(text, origin);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << origin.string() << ":" << loc.line_of_offset(e.byte > 0 ? e.byte - 1 : 0) << ": malformed JSON: " << e.what();
    throw ScenarioError(os.str());
  }
  if (!doc.is_object()) throw ScenarioError(origin.string() + ":1: scenario must be a JSON object");

  ScenarioFile out;
  out.path = origin;
  out.hash = fnv1a_hex(doc.dump());
  out.name = doc.value("name", origin.stem().string());

  auto section = [&](const char* key, auto&& body) {
    try {
      body();
    } catch (const ScenarioError&) {
      throw;
    } catch (const std::exception& e) {
      loc.fail(key, e.what());
    }
  };

  // agents
  section("agents", [&] {
    if (!doc.contains("agents")) throw std::invalid_argument("section is missing");
    std::vector<Agent> agents;
    for (const json& a : doc.at("agents")) agents.push_back({a.at("id").get<int>(), read_vec2(a.at("pos"))});
    std::optional<std::vector<AgentId>> boundary;
    if (doc.contains("boundary_ids")) boundary = doc.at("boundary_ids").get<std::vector<AgentId>>();
    out.config = ReferenceConfiguration(std::move(agents), std::move(boundary));
  });

  section("applications", [&] {
    if (!doc.contains("applications")) throw std::invalid_argument("section is missing");
    int next_id = 1;
    for (const json& a : doc.at("applications")) {
      const int id = a.value("id", next_id);
      next_id = id + 1;
      std::vector<Target> targets;
      for (const json& t : a.at("targets")) targets.push_back({read_vec2(t.at("pos")), read_cov(t.at("cov"))});
      std::vector<std::vector<Vec2>> zones;
      if (a.contains("zones")) {
        for (const json& z : a.at("zones")) {
          std::vector<Vec2> poly;
          for (const json& v : z) poly.push_back(read_vec2(v));
          zones.push_back(std::move(poly));
        }
      }
      out.applications.emplace_back(id, std::move(targets), a.at("alpha").get<double>(), std::move(zones));
    }
    // Priority normalization and the other heat-map invariants.
    (void)HeatMap(out.applications);
  });

  section("boundary_targets", [&] {
    if (!doc.contains("boundary_targets")) throw std::invalid_argument("section is missing");
    for (const json& b : doc.at("boundary_targets")) {
      const AgentId id = b.at("id").get<int>();
      if (!out.config.contains(id)) throw std::invalid_argument("id " + std::to_string(id) + " is not an agent");
      if (!out.boundary_targets.emplace(id, read_vec2(b.at("pos"))).second) {
        throw std::invalid_argument("duplicate target for agent " + std::to_string(id));
      }
    }
  });

  section("vehicle", [&] {
    if (!doc.contains("vehicle")) return;
    const json& v = doc.at("vehicle");
    out.vehicle.mass = v.value("mass", out.vehicle.mass);
    if (!(out.vehicle.mass > 0.0)) throw std::invalid_argument("mass must be positive");
    if (v.contains("poles_translational")) {
      out.vehicle.poles.translational = read_poles<4>(v.at("poles_translational"), "poles_translational");
    }
    if (v.contains("poles_yaw")) out.vehicle.poles.yaw = read_poles<2>(v.at("poles_yaw"), "poles_yaw");
    out.vehicle.guard.min_thrust = v.value("min_thrust", out.vehicle.guard.min_thrust);
    out.vehicle.guard.attitude_margin = v.value("attitude_margin", out.vehicle.guard.attitude_margin);
    (void)design_gains(out.vehicle.poles, out.vehicle.mass);
  });

  section("schedule", [&] {
    if (!doc.contains("schedule")) return;
    const json& s = doc.at("schedule");
    auto& sch = out.schedule;
    sch.t0 = s.value("t0", sch.t0);
    sch.tf = s.value("tf", sch.tf);
    sch.t_end = s.value("t_end", sch.t_end);
    sch.dt = s.value("dt", sch.dt);
    sch.log_interval = s.value("log_interval", sch.log_interval);
    const std::string start = s.value("start", std::string("reference"));
    if (start == "reference") {
      sch.start = StartMode::kReference;
    } else if (start == "equilibrium") {
      sch.start = StartMode::kEquilibrium;
    } else {
      throw std::invalid_argument("start must be \"reference\" or \"equilibrium\"");
    }
    if (!(sch.t0 < sch.tf && sch.tf <= sch.t_end)) throw std::invalid_argument("times must satisfy t0 < tf <= t_end");
    if (!(sch.dt > 0.0 && sch.dt <= 0.02)) throw std::invalid_argument("dt must lie in (0, 0.02] s");
  });

  section("altitudes", [&] {
    if (!doc.contains("altitudes")) return;
    const json& a = doc.at("altitudes");
    out.altitude_base = a.value("base", out.altitude_base);
    if (a.contains("values")) {
      std::map<AgentId, double> values;
      for (const auto& [key, value] : a.at("values").items()) {
        const AgentId id = parse_id_key(key);
        if (!out.config.contains(id)) throw std::invalid_argument("id " + key + " is not an agent");
        values[id] = value.get<double>();
      }
      for (AgentId id : out.config.ids()) {
        if (!values.count(id)) throw std::invalid_argument("agent " + std::to_string(id) + " has no altitude");
      }
      out.altitudes = std::move(values);
    }
  });

  section("layering", [&] {
    if (!doc.contains("layering")) return;
    const json& l = doc.at("layering");
    if (l.contains("neighborhood_radius") && !l.at("neighborhood_radius").is_null()) {
      out.layering.neighborhood_radius = l.at("neighborhood_radius").get<double>();
      if (!(out.layering.neighborhood_radius > 0.0)) throw std::invalid_argument("neighborhood_radius must be positive");
    }
    out.layering.distinct_simplices = l.value("distinct_simplices", false);
  });

  section("output", [&] {
    if (!doc.contains("output")) return;
    const json& o = doc.at("output");
    out.output.dir = o.value("dir", out.output.dir);
    if (o.contains("frame_times")) out.output.frame_times = o.at("frame_times").get<std::vector<double>>();
  });

  return out;
}

ScenarioFile load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

json graph_to_json(const LayeredGraph& graph) {
  json neighbors = json::object();
  for (const auto& [id, nbrs] : graph.in_neighbors) {
    if (!nbrs.empty()) neighbors[std::to_string(id)] = nbrs;
  }
  return json{{"core_id", graph.core_id},
              {"boundary_ids", graph.boundary_ids},
              {"layers", graph.layers},
              {"in_neighbors", neighbors}};
}

LayeredGraph graph_from_json(const json& doc) {
  try {
    LayeredGraph g;
    g.core_id = doc.at("core_id").get<int>();
    g.boundary_ids = doc.at("boundary_ids").get<std::vector<AgentId>>();
    g.layers = doc.at("layers").get<std::vector<std::vector<AgentId>>>();
    for (const auto& layer : g.layers) {
      for (AgentId id : layer) g.in_neighbors[id] = {};
    }
    for (const auto& [key, value] : doc.at("in_neighbors").items()) {
      g.in_neighbors[parse_id_key(key)] = value.get<std::vector<AgentId>>();
    }
    return g;
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("malformed graph document: ") + e.what());
  }
}

json plan_to_json(const Plan& plan, const std::string& scenario_hash) {
  json omega = json::object();
  json varpi = json::object();
  for (const auto& [id, fw] : plan.schedule.followers()) {
    omega[std::to_string(id)] = fw.initial;
    varpi[std::to_string(id)] = fw.final;
  }
  json desired = json::object();
  for (const auto& [id, p] : plan.desired.positions) desired[std::to_string(id)] = write_vec2(p);
  std::vector<AgentId> fallback;
  for (const auto& [id, used] : plan.desired.used_fallback) {
    if (used) fallback.push_back(id);
  }
  return json{{"format", "dnncover-plan/1"},
              {"scenario_hash", scenario_hash},
              {"graph", graph_to_json(plan.graph)},
              {"omega", omega},
              {"varpi", varpi},
              {"desired_positions", desired},
              {"centroid_fallback", fallback},
              {"beta", {{"t0", plan.schedule.t0()}, {"tf", plan.schedule.tf()}, {"profile", "quintic"}}}};
}

std::string plan_scenario_hash(const json& doc) {
  if (!doc.is_object() || !doc.contains("scenario_hash")) throw ScenarioError("plan document has no scenario_hash");
  return doc.at("scenario_hash").get<std::string>();
}

Plan plan_from_json(const json& doc) {
  try {
    if (doc.value("format", std::string()) != "dnncover-plan/1") throw ScenarioError("unsupported plan format");
    Plan plan;
    plan.graph = graph_from_json(doc.at("graph"));
    for (const auto& [key, value] : doc.at("desired_positions").items()) {
      plan.desired.positions[parse_id_key(key)] = read_vec2(value);
    }
    const auto fallback = doc.at("centroid_fallback").get<std::vector<AgentId>>();
    std::map<AgentId, FollowerWeights> followers;
    for (AgentId id : plan.graph.followers()) {
      const auto& nbrs = plan.graph.in_neighbors.at(id);
      if (nbrs.size() != 3) throw ScenarioError("follower " + std::to_string(id) + " needs three in-neighbors");
      Triangle t;
      for (std::size_t k = 0; k < 3; ++k) t[k] = plan.desired.positions.at(nbrs[k]);
      plan.desired.simplices[id] = t;
      plan.desired.used_fallback[id] = std::find(fallback.begin(), fallback.end(), id) != fallback.end();
      const std::string key = std::to_string(id);
      FollowerWeights fw;
      fw.neighbors = {nbrs[0], nbrs[1], nbrs[2]};
      const auto omega = doc.at("omega").at(key).get<std::vector<double>>();
      const auto varpi = doc.at("varpi").at(key).get<std::vector<double>>();
      if (omega.size() != 3 || varpi.size() != 3) throw ScenarioError("weights of " + key + " must have 3 entries");
      std::copy(omega.begin(), omega.end(), fw.initial.begin());
      std::copy(varpi.begin(), varpi.end(), fw.final.begin());
      followers[id] = fw;
    }
    const json& b = doc.at("beta");
    plan.schedule = WeightSchedule(std::move(followers), b.at("t0").get<double>(), b.at("tf").get<double>());
    return plan;
  } catch (const ScenarioError&) {
    throw;
  } catch (const std::exception& e) {
    throw ScenarioError(std::string("malformed plan document: ") + e.what());
  }
}

Scenario assemble_scenario(const ScenarioFile& file, Plan plan, const std::string& plan_hash) {
  if (plan_hash != file.hash) {
    throw StalePlanError("plan was computed for scenario " + plan_hash + " but " + file.path.string() +
                         " hashes to " + file.hash + "; re-run `plan`");
  }
  auto altitudes = file.altitudes ? *file.altitudes : layered_altitudes(plan.graph, file.altitude_base);
  Scenario s{file.config,      file.heat_map(),        file.boundary_targets,   std::move(plan),
             file.vehicle,     file.schedule.dt,       file.schedule.t_end,     file.schedule.log_interval,
             std::move(altitudes), file.schedule.start};
  validate_scenario(s);
  return s;
}

namespace {

void put(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, ",%.10g", v);
  line += buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  os << "t,agent_id,x,y,z,xd,yd,zd,phi,theta,psi,f\n";
  std::string line;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    for (std::size_t i = 0; i < traj.ids.size(); ++i) {
      const AgentSample& s = traj.samples[k][i];
      char head[48];
      std::snprintf(head, sizeof head, "%.10g,%d", traj.times[k], traj.ids[i]);
      line = head;
      for (double v : {s.position.x(), s.position.y(), s.position.z(), s.desired.x(), s.desired.y(), s.desired.z(),
                       s.phi, s.theta, s.psi, s.thrust}) {
        put(line, v);
      }
      line += '\n';
      os << line;
    }
  }
}

Trajectory read_trajectory_csv(std::istream& is) {
  Trajectory traj;
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,agent_id", 0) != 0) {
    throw ScenarioError("trajectory CSV is missing its header");
  }
  std::size_t line_no = 1;
  std::vector<AgentId> current_ids;
  std::vector<AgentSample> current;
  double current_t = 0.0;
  auto flush = [&] {
    if (current.empty()) return;
    if (traj.ids.empty()) {
      traj.ids = current_ids;
    } else if (current_ids != traj.ids) {
      throw ScenarioError("trajectory CSV: agent set changes at t = " + std::to_string(current_t));
    }
    traj.times.push_back(current_t);
    traj.samples.push_back(std::move(current));
    current.clear();
    current_ids.clear();
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<double, 12> v{};
    const char* p = line.c_str();
    for (std::size_t k = 0; k < v.size(); ++k) {
      char* end = nullptr;
      v[k] = std::strtod(p, &end);
      if (end == p) throw ScenarioError("trajectory CSV line " + std::to_string(line_no) + ": expected 12 numbers");
      p = end;
      if (*p == ',') ++p;
    }
    if (!current.empty() && v[0] != current_t) flush();
    current_t = v[0];
    current_ids.push_back(static_cast<AgentId>(v[1]));
    current.push_back({Vec3(v[2], v[3], v[4]), Vec3(v[5], v[6], v[7]), v[8], v[9], v[10], v[11]});
  }
  flush();
  return traj;
}

json metrics_to_json(const Metrics& m) {
  json settling = json::object();
  for (const auto& [id, t] : m.settling_time) settling[std::to_string(id)] = t ? json(*t) : json(nullptr);
  return json{{"max_tracking_error", m.max_tracking_error},
              {"max_tracking_agent", m.max_tracking_agent},
              {"max_tracking_time", m.max_tracking_time},
              {"final_deviation", m.final_deviation},
              {"final_deviation_agent", m.final_deviation_agent},
              {"min_planar_distance", m.min_planar_distance},
              {"min_separation", m.min_separation},
              {"min_separation_pair", m.min_separation_pair},
              {"min_separation_time", m.min_separation_time},
              {"safety_violation", m.safety_violation},
              {"settling_time", settling}};
}

std::filesystem::path output_directory(const ScenarioFile& file) {
  if (const char* env = std::getenv("DNNCOVER_OUTPUT_DIR"); env && *env) return env;
  return file.output.dir;
}

}  // namespace dnncover
