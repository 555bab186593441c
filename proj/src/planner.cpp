#include "dnncover/planner.hpp"

#include "dnncover/errors.hpp"

#include <algorithm>

namespace dnncover {

bool DesiredConfiguration::operator==(const DesiredConfiguration& o) const {
  auto same_points = [](const Vec2& a, const Vec2& b) { return a.x() == b.x() && a.y() == b.y(); };
  if (positions.size() != o.positions.size() || simplices.size() != o.simplices.size()) return false;
  for (const auto& [id, p] : positions) {
    auto it = o.positions.find(id);
    if (it == o.positions.end() || !same_points(p, it->second)) return false;
  }
  for (const auto& [id, t] : simplices) {
    auto it = o.simplices.find(id);
    if (it == o.simplices.end()) return false;
    for (std::size_t k = 0; k < 3; ++k) {
      if (!same_points(t[k], it->second[k])) return false;
    }
  }
  return used_fallback == o.used_fallback;
}

DesiredConfiguration forward_pass(const LayeredGraph& graph, const HeatMap& map,
                                  const std::map<AgentId, Vec2>& boundary_targets,
                                  const QuadratureOptions& quadrature) {
  if (boundary_targets.size() != graph.boundary_ids.size()) {
    throw InvalidInputError("boundary targets must cover exactly the " +
                            std::to_string(graph.boundary_ids.size()) + " boundary agents");
  }
  DesiredConfiguration out;
  std::vector<Vec2> polygon;
  for (AgentId id : graph.boundary_ids) {
    auto it = boundary_targets.find(id);
    if (it == boundary_targets.end()) {
      throw InvalidInputError("missing boundary target for agent " + std::to_string(id));
    }
    if (!it->second.allFinite()) throw InvalidInputError("boundary target for agent " + std::to_string(id) + " is not finite");
    polygon.push_back(it->second);
    out.positions[id] = it->second;
  }
  if (!is_strictly_convex(polygon)) {
    throw DegenerateRegionError("boundary targets, taken in hull order, do not form a non-degenerate convex polygon");
  }
  out.positions[graph.core_id] = polygon_vertex_mean(polygon);

  for (std::size_t l = 1; l < graph.layers.size(); ++l) {
    for (AgentId id : graph.layers[l]) {
      const auto& nbrs = graph.in_neighbors.at(id);
      if (nbrs.size() != 3) throw InvalidInputError("follower " + std::to_string(id) + " lacks a 3-agent simplex");
      Triangle c;
      for (std::size_t k = 0; k < 3; ++k) {
        auto it = out.positions.find(nbrs[k]);
        if (it == out.positions.end()) {
          throw InvalidInputError("in-neighbor " + std::to_string(nbrs[k]) + " of follower " + std::to_string(id) +
                                  " has no desired position yet");
        }
        c[k] = it->second;
      }
      out.simplices[id] = c;

      const Vec2 centroid = (c[0] + c[1] + c[2]) / 3.0;
      bool fallback = std::abs(signed_area(c)) < 1e-12;
      Vec2 p = centroid;
      if (!fallback) {
        const PolygonIntegral integral = integrate_polygon(map, c, quadrature);
        if (integral.mass < kZeroMass) {
          fallback = true;
        } else {
          p = integral.first_moment / integral.mass;
        }
      }
      out.positions[id] = p;
      out.used_fallback[id] = fallback;
    }
  }
  return out;
}

std::map<AgentId, WeightTriple> final_weights(const DesiredConfiguration& desired, const LayeredGraph& graph) {
  std::map<AgentId, WeightTriple> out;
  for (AgentId id : graph.followers()) {
    const auto& nbrs = graph.in_neighbors.at(id);
    Triangle t;
    for (std::size_t k = 0; k < 3; ++k) t[k] = desired.positions.at(nbrs[k]);
    SimplexWeights w;
    try {
      w = solve_simplex_weights(desired.positions.at(id), t);
    } catch (const SingularSimplexError&) {
      throw SingularSimplexError("desired communication simplex of follower " + std::to_string(id) + " collapsed");
    }
    out[id] = {{nbrs[0], nbrs[1], nbrs[2]}, w.values};
  }
  return out;
}

std::map<AgentId, WeightTriple> initial_weights(const ReferenceConfiguration& config, const LayeredGraph& graph) {
  std::map<AgentId, WeightTriple> out;
  for (AgentId id : graph.followers()) {
    const auto& nbrs = graph.in_neighbors.at(id);
    Triangle t;
    for (std::size_t k = 0; k < 3; ++k) t[k] = config.position(nbrs[k]);
    const SimplexWeights w = solve_simplex_weights(config.position(id), t);
    if (w.exterior) {
      throw InfeasibleFormationError("agent " + std::to_string(id) + " lies outside its communication simplex", {id});
    }
    out[id] = {{nbrs[0], nbrs[1], nbrs[2]}, w.values};
  }
  return out;
}

Plan plan(const ReferenceConfiguration& config, const HeatMap& map,
          const std::map<AgentId, Vec2>& boundary_targets, double t0, double tf, const PlanOptions& options) {
  Plan out;
  out.graph = build_graph(config, options.layering);
  out.desired = forward_pass(out.graph, map, boundary_targets, options.quadrature);
  const auto omega = initial_weights(config, out.graph);
  const auto varpi = final_weights(out.desired, out.graph);
  std::map<AgentId, FollowerWeights> followers;
  for (const auto& [id, w] : omega) followers[id] = {w.neighbors, w.values, varpi.at(id).values};
  out.schedule = WeightSchedule(std::move(followers), t0, tf);
  return out;
}

}  // namespace dnncover
