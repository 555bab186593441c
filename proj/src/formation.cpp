#include "dnncover/formation.hpp"

#include "dnncover/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dnncover {

namespace {

std::string join_ids(const std::vector<AgentId>& ids) {
  std::ostringstream os;
  for (std::size_t k = 0; k < ids.size(); ++k) os << (k ? ", " : "") << ids[k];
  return os.str();
}

}  // namespace

ReferenceConfiguration::ReferenceConfiguration(std::vector<Agent> agents,
                                               std::optional<std::vector<AgentId>> boundary_ids)
    : agents_(std::move(agents)), boundary_ids_(std::move(boundary_ids)) {
  std::sort(agents_.begin(), agents_.end(), [](const Agent& a, const Agent& b) { return a.id < b.id; });
  if (agents_.size() < 4) {
    throw InvalidInputError("reference configuration needs at least 4 agents, got " +
                            std::to_string(agents_.size()));
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (!agents_[i].position.allFinite()) {
      throw InvalidInputError("agent " + std::to_string(agents_[i].id) + " has a non-finite position");
    }
    if (i > 0 && agents_[i].id == agents_[i - 1].id) {
      throw InvalidInputError("duplicate agent id " + std::to_string(agents_[i].id));
    }
  }
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    for (std::size_t j = i + 1; j < agents_.size(); ++j) {
      if ((agents_[i].position - agents_[j].position).norm() <= 1e-9) {
        throw InvalidInputError("agents " + std::to_string(agents_[i].id) + " and " +
                                std::to_string(agents_[j].id) + " share a reference position");
      }
    }
  }
  if (boundary_ids_) {
    for (AgentId id : *boundary_ids_) {
      if (!contains(id)) throw InvalidInputError("boundary id " + std::to_string(id) + " is not an agent");
    }
  }
}

bool ReferenceConfiguration::contains(AgentId id) const {
  return std::binary_search(agents_.begin(), agents_.end(), Agent{id, Vec2::Zero()},
                            [](const Agent& a, const Agent& b) { return a.id < b.id; });
}

const Vec2& ReferenceConfiguration::position(AgentId id) const {
  auto it = std::lower_bound(agents_.begin(), agents_.end(), id,
                             [](const Agent& a, AgentId value) { return a.id < value; });
  if (it == agents_.end() || it->id != id) throw LookupError("unknown agent id " + std::to_string(id));
  return it->position;
}

std::map<AgentId, Vec2> ReferenceConfiguration::positions() const {
  std::map<AgentId, Vec2> out;
  for (const Agent& a : agents_) out.emplace(a.id, a.position);
  return out;
}

std::vector<AgentId> ReferenceConfiguration::ids() const {
  std::vector<AgentId> out;
  out.reserve(agents_.size());
  for (const Agent& a : agents_) out.push_back(a.id);
  return out;
}

int LayeredGraph::layer_of(AgentId id) const {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (std::binary_search(layers[l].begin(), layers[l].end(), id)) return static_cast<int>(l);
  }
  return -1;
}

std::vector<AgentId> LayeredGraph::followers() const {
  std::vector<AgentId> out;
  for (std::size_t l = 1; l < layers.size(); ++l) out.insert(out.end(), layers[l].begin(), layers[l].end());
  return out;
}

std::set<AgentId> LayeredGraph::cumulative(std::size_t l) const {
  if (l >= layers.size()) throw LookupError("layer " + std::to_string(l) + " out of range");
  const std::size_t m = depth();
  if (l == m) return {layers[l].begin(), layers[l].end()};
  std::set<AgentId> out;
  for (std::size_t k = 0; k <= l; ++k) out.insert(layers[k].begin(), layers[k].end());
  return out;
}

std::set<AgentId> LayeredGraph::connection_set(AgentId id, std::size_t l) const {
  if (l == 0 || l >= layers.size()) throw LookupError("connection sets are defined for layers 1..M");
  if (std::binary_search(layers[l].begin(), layers[l].end(), id)) {
    auto it = in_neighbors.find(id);
    if (it == in_neighbors.end()) return {};
    return {it->second.begin(), it->second.end()};
  }
  const auto w = cumulative(l);
  if (w.count(id)) return {id};
  throw LookupError("agent " + std::to_string(id) + " is not in W_" + std::to_string(l));
}

BoundarySplit classify_boundary(const ReferenceConfiguration& config) {
  const auto& agents = config.agents();
  std::vector<Vec2> points;
  points.reserve(agents.size());
  for (const Agent& a : agents) points.push_back(a.position);

  const auto hull = convex_hull_indices(points);
  std::vector<Vec2> hull_points;
  for (std::size_t idx : hull) hull_points.push_back(points[idx]);
  if (hull.size() < 3 || std::abs(polygon_signed_area(hull_points)) <= 1e-12) {
    throw DegenerateHullError("reference positions are collinear; the formation hull has no area");
  }

  BoundarySplit split;
  std::vector<bool> on_hull(agents.size(), false);
  for (std::size_t idx : hull) {
    split.boundary.push_back(agents[idx].id);
    on_hull[idx] = true;
  }
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (!on_hull[i]) split.interior.push_back(agents[i].id);
  }

  if (const auto& given = config.explicit_boundary()) {
    std::vector<AgentId> a = *given;
    std::vector<AgentId> b = split.boundary;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a != b) {
      throw InconsistentBoundaryError("explicit boundary ids [" + join_ids(a) +
                                      "] differ from the hull vertices [" + join_ids(b) + "]");
    }
  }
  return split;
}

AgentId select_core_leader(const std::vector<AgentId>& boundary, const std::vector<AgentId>& interior,
                           const std::map<AgentId, Vec2>& positions) {
  if (interior.empty()) throw NoInteriorAgentError("no interior agent is available to act as core leader");
  auto at = [&](AgentId id) -> const Vec2& {
    auto it = positions.find(id);
    if (it == positions.end()) throw LookupError("unknown agent id " + std::to_string(id));
    return it->second;
  };
  std::vector<AgentId> candidates = interior;
  std::sort(candidates.begin(), candidates.end());

  AgentId best = candidates.front();
  double best_sum = std::numeric_limits<double>::infinity();
  for (AgentId j : candidates) {
    double sum = 0.0;
    for (AgentId h : boundary) sum += (at(h) - at(j)).norm();
    if (sum < best_sum - 1e-12 * std::max(1.0, best_sum)) {
      best_sum = sum;
      best = j;
    }
  }
  return best;
}

namespace {

struct SimplexChoice {
  NeighborTriple ids{};
  double area = std::numeric_limits<double>::infinity();
  bool found = false;

  void offer(const NeighborTriple& t, double a) {
    if (a < area * (1.0 - 1e-12)) {
      ids = t;
      area = a;
      found = true;
    }
  }
};

// Enumerates every triangle over `ids` (ascending) and keeps the smallest one
// that encloses p with all barycentric coordinates >= kInteriorMargin. The
// enumeration is lexicographic, so equal areas keep the smaller id triple.
SimplexChoice find_enclosing_simplex(const Vec2& p, const std::vector<AgentId>& all_ids,
                                     const std::vector<Vec2>& all_pts, double radius,
                                     const std::set<NeighborTriple>* taken) {
  std::vector<AgentId> ids;
  std::vector<Vec2> pts;
  for (std::size_t a = 0; a < all_ids.size(); ++a) {
    if ((all_pts[a] - p).norm() <= radius) {
      ids.push_back(all_ids[a]);
      pts.push_back(all_pts[a]);
    }
  }
  const std::size_t n = ids.size();
  // o[a*n+b] = orient(P_a, P_b, p): twice the signed area of (P_a, P_b, p).
  std::vector<double> o(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const double v = orient2d(pts[a], pts[b], p);
      o[a * n + b] = v;
      o[b * n + a] = -v;
    }
  }

  SimplexChoice best;
  SimplexChoice best_free;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double oij = o[i * n + j];
      if (oij == 0.0) continue;
      for (std::size_t k = j + 1; k < n; ++k) {
        const double ojk = o[j * n + k];
        const double oki = o[k * n + i];
        if ((oij > 0) != (ojk > 0) || (oij > 0) != (oki > 0) || ojk == 0.0 || oki == 0.0) continue;
        const double twice = orient2d(pts[i], pts[j], pts[k]);
        const double area = 0.5 * std::abs(twice);
        if (!(area < best.area * (1.0 - 1e-12)) && !(taken && area < best_free.area * (1.0 - 1e-12))) continue;
        const double li = ojk / twice;
        const double lj = oki / twice;
        const double lk = oij / twice;
        if (li < kInteriorMargin || lj < kInteriorMargin || lk < kInteriorMargin) continue;
        const NeighborTriple triple{ids[i], ids[j], ids[k]};
        best.offer(triple, area);
        if (taken && !taken->count(triple)) best_free.offer(triple, area);
      }
    }
  }
  return best_free.found ? best_free : best;
}

}  // namespace

LayeredGraph build_layers(const ReferenceConfiguration& config, const std::vector<AgentId>& boundary,
                          AgentId core, const LayeringOptions& options) {
  if (!(options.neighborhood_radius > 0.0)) throw InvalidInputError("neighborhood radius must be positive");
  LayeredGraph graph;
  graph.boundary_ids = boundary;
  graph.core_id = core;

  std::vector<AgentId> placed = boundary;
  placed.push_back(core);
  std::sort(placed.begin(), placed.end());
  if (std::adjacent_find(placed.begin(), placed.end()) != placed.end()) {
    throw InvalidInputError("core leader " + std::to_string(core) + " is also a boundary agent");
  }
  for (AgentId id : placed) {
    if (!config.contains(id)) throw InvalidInputError("leader " + std::to_string(id) + " is not an agent");
  }
  graph.layers.push_back(placed);
  for (AgentId id : placed) graph.in_neighbors[id] = {};

  std::vector<AgentId> remaining;
  for (AgentId id : config.ids()) {
    if (!std::binary_search(placed.begin(), placed.end(), id)) remaining.push_back(id);
  }

  Vec2 lo = config.agents().front().position;
  Vec2 hi = lo;
  for (const Agent& a : config.agents()) {
    lo = lo.cwiseMin(a.position);
    hi = hi.cwiseMax(a.position);
  }
  const double diameter = (hi - lo).norm() * (1.0 + 1e-9);
  std::set<NeighborTriple> taken;
  const std::set<NeighborTriple>* taken_ptr = options.distinct_simplices ? &taken : nullptr;

  while (!remaining.empty()) {
    std::vector<Vec2> pts;
    pts.reserve(placed.size());
    for (AgentId id : placed) pts.push_back(config.position(id));

    std::vector<AgentId> layer;
    std::vector<AgentId> still;
    // Beyond the formation diameter every triangle is admissible.
    for (double radius = options.neighborhood_radius;; radius *= 2.0) {
      if (radius >= diameter) radius = std::numeric_limits<double>::infinity();
      still.clear();
      for (AgentId id : remaining) {
        const SimplexChoice choice = find_enclosing_simplex(config.position(id), placed, pts, radius, taken_ptr);
        if (choice.found) {
          layer.push_back(id);
          taken.insert(choice.ids);
          graph.in_neighbors[id] = {choice.ids.begin(), choice.ids.end()};
        } else {
          still.push_back(id);
        }
      }
      if (!layer.empty() || std::isinf(radius)) break;
    }
    if (layer.empty()) {
      throw InfeasibleFormationError(
          "no communication simplex strictly encloses agent(s) " + join_ids(still), still);
    }
    graph.layers.push_back(layer);
    placed.insert(placed.end(), layer.begin(), layer.end());
    std::sort(placed.begin(), placed.end());
    remaining = std::move(still);
  }
  return graph;
}

LayeredGraph build_graph(const ReferenceConfiguration& config, const LayeringOptions& options) {
  const BoundarySplit split = classify_boundary(config);
  const AgentId core = select_core_leader(split.boundary, split.interior, config.positions());
  return build_layers(config, split.boundary, core, options);
}

std::string to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kPartition: return "partition";
    case ViolationKind::kLeaderNeighbors: return "leader-neighbors";
    case ViolationKind::kNeighborCount: return "neighbor-count";
    case ViolationKind::kLayerOrder: return "layer-order";
    case ViolationKind::kNotEnclosed: return "not-enclosed";
    case ViolationKind::kCore: return "core";
    case ViolationKind::kBoundary: return "boundary";
  }
  return "unknown";
}

std::vector<Violation> validate_dnn(const LayeredGraph& graph, const ReferenceConfiguration& config) {
  std::vector<Violation> out;
  auto report = [&](ViolationKind kind, std::vector<AgentId> ids, std::string msg) {
    out.push_back({kind, std::move(ids), std::move(msg)});
  };

  // Disjoint cover of V.
  std::map<AgentId, int> seen;
  for (std::size_t l = 0; l < graph.layers.size(); ++l) {
    if (graph.layers[l].empty()) report(ViolationKind::kPartition, {}, "layer " + std::to_string(l) + " is empty");
    for (AgentId id : graph.layers[l]) {
      if (!config.contains(id)) {
        report(ViolationKind::kPartition, {id}, "agent " + std::to_string(id) + " is not in the configuration");
      }
      if (seen.count(id)) {
        report(ViolationKind::kPartition, {id},
               "agent " + std::to_string(id) + " appears in layers " + std::to_string(seen[id]) + " and " +
                   std::to_string(l));
      } else {
        seen[id] = static_cast<int>(l);
      }
    }
  }
  for (AgentId id : config.ids()) {
    if (!seen.count(id)) report(ViolationKind::kPartition, {id}, "agent " + std::to_string(id) + " is in no layer");
  }

  auto neighbors_of = [&](AgentId id) -> std::vector<AgentId> {
    auto it = graph.in_neighbors.find(id);
    return it == graph.in_neighbors.end() ? std::vector<AgentId>{} : it->second;
  };

  if (!graph.layers.empty()) {
    for (AgentId id : graph.layers[0]) {
      if (!neighbors_of(id).empty()) {
        report(ViolationKind::kLeaderNeighbors, {id}, "leader " + std::to_string(id) + " has in-neighbors");
      }
    }
  }

  for (std::size_t l = 1; l < graph.layers.size(); ++l) {
    const auto previous = graph.cumulative(l - 1);
    for (AgentId id : graph.layers[l]) {
      auto nbrs = neighbors_of(id);
      std::vector<AgentId> distinct = nbrs;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      if (nbrs.size() != 3 || distinct.size() != 3) {
        report(ViolationKind::kNeighborCount, {id},
               "follower " + std::to_string(id) + " has " + std::to_string(distinct.size()) +
                   " distinct in-neighbors, expected 3");
      }
      for (AgentId j : nbrs) {
        if (!previous.count(j)) {
          report(ViolationKind::kLayerOrder, {id, j},
                 "follower " + std::to_string(id) + " in layer " + std::to_string(l) + " listens to " +
                     std::to_string(j) + ", which is not in W_" + std::to_string(l - 1));
        }
      }
      if (nbrs.size() == 3 && distinct.size() == 3 && config.contains(id) &&
          std::all_of(nbrs.begin(), nbrs.end(), [&](AgentId j) { return config.contains(j); })) {
        const Vec2& p = config.position(id);
        const Vec2& a = config.position(nbrs[0]);
        const Vec2& b = config.position(nbrs[1]);
        const Vec2& c = config.position(nbrs[2]);
        const double twice = orient2d(a, b, c);
        bool inside = twice != 0.0;
        if (inside) {
          const double la = orient2d(b, c, p) / twice;
          const double lb = orient2d(c, a, p) / twice;
          const double lc = orient2d(a, b, p) / twice;
          inside = la >= kInteriorMargin && lb >= kInteriorMargin && lc >= kInteriorMargin;
        }
        if (!inside) {
          report(ViolationKind::kNotEnclosed, {id},
                 "follower " + std::to_string(id) + " is not strictly inside its communication simplex");
        }
      }
    }
  }

  // Leaders are exactly the hull vertices plus one interior core.
  std::vector<AgentId> hull_ids;
  std::vector<AgentId> interior_ids;
  try {
    const BoundarySplit split = classify_boundary(ReferenceConfiguration(config.agents()));
    hull_ids = split.boundary;
    interior_ids = split.interior;
  } catch (const Error& e) {
    report(ViolationKind::kBoundary, {}, e.what());
  }
  std::vector<AgentId> claimed = graph.boundary_ids;
  std::sort(claimed.begin(), claimed.end());
  std::sort(hull_ids.begin(), hull_ids.end());
  if (!hull_ids.empty() && claimed != hull_ids) {
    report(ViolationKind::kBoundary, claimed,
           "boundary ids [" + join_ids(claimed) + "] differ from hull vertices [" + join_ids(hull_ids) + "]");
  }
  if (!std::binary_search(interior_ids.begin(), interior_ids.end(), graph.core_id)) {
    report(ViolationKind::kCore, {graph.core_id},
           "core leader " + std::to_string(graph.core_id) + " is not an interior agent");
  }
  if (!graph.layers.empty()) {
    std::vector<AgentId> expected = claimed;
    expected.push_back(graph.core_id);
    std::sort(expected.begin(), expected.end());
    if (expected != graph.layers[0]) {
      report(ViolationKind::kCore, graph.layers[0], "layer 0 is not the boundary agents plus the core leader");
    }
  }
  return out;
}

}  // namespace dnncover
