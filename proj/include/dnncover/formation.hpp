#pragma once

#include "dnncover/geometry.hpp"

#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dnncover {

/// Minimum barycentric coordinate a follower must have w.r.t. its simplex.
inline constexpr double kInteriorMargin = 1e-6;

struct Agent {
  AgentId id;
  Vec2 position;  // reference position a_i, meters
};

/// Reference formation of the team. Agents are kept sorted by id.
class ReferenceConfiguration {
 public:
  ReferenceConfiguration() = default;
  /// Throws InvalidInputError on duplicate ids, coincident positions or N < 4.
  explicit ReferenceConfiguration(std::vector<Agent> agents,
                                  std::optional<std::vector<AgentId>> boundary_ids = std::nullopt);

  const std::vector<Agent>& agents() const { return agents_; }
  const std::optional<std::vector<AgentId>>& explicit_boundary() const { return boundary_ids_; }
  std::size_t size() const { return agents_.size(); }
  bool contains(AgentId id) const;
  const Vec2& position(AgentId id) const;
  std::map<AgentId, Vec2> positions() const;
  std::vector<AgentId> ids() const;

 private:
  std::vector<Agent> agents_;
  std::optional<std::vector<AgentId>> boundary_ids_;
};

struct BoundarySplit {
  std::vector<AgentId> boundary;  // V_B, counter-clockwise hull order
  std::vector<AgentId> interior;  // V_I, ascending ids
};

using NeighborTriple = std::array<AgentId, 3>;

/// The layered communication graph. `layers[0]` holds the leaders (boundary
/// agents plus the core); every other agent has exactly three in-neighbors
/// drawn from earlier layers.
struct LayeredGraph {
  std::vector<std::vector<AgentId>> layers;            // V_0..V_M, each ascending
  std::map<AgentId, std::vector<AgentId>> in_neighbors;  // every agent; empty for leaders
  AgentId core_id = -1;
  std::vector<AgentId> boundary_ids;  // counter-clockwise hull order

  std::size_t depth() const { return layers.empty() ? 0 : layers.size() - 1; }  // M
  int layer_of(AgentId id) const;  // -1 if absent
  bool is_leader(AgentId id) const { return layer_of(id) == 0; }
  std::vector<AgentId> followers() const;  // ascending by (layer, id)

  /// W_l: W_0 = V_0, W_l = V_l u W_{l-1} for 0 < l < M, W_M = V_M.
  std::set<AgentId> cumulative(std::size_t l) const;
  /// I_{i,l}: in-neighbors of i if i is in V_l, {i} if i is in W_l \ V_l.
  std::set<AgentId> connection_set(AgentId id, std::size_t l) const;

  bool operator==(const LayeredGraph&) const = default;
};

BoundarySplit classify_boundary(const ReferenceConfiguration& config);

/// Interior agent minimizing the summed distance to all boundary agents;
/// ties within 1e-12 relative go to the smaller id.
AgentId select_core_leader(const std::vector<AgentId>& boundary, const std::vector<AgentId>& interior,
                           const std::map<AgentId, Vec2>& positions);

struct LayeringOptions {
  /// Only triangles whose three vertices lie within this distance of the
  /// follower are admissible. When no remaining follower has an admissible
  /// triangle, the radius doubles for that layer. Infinite by default, which
  /// admits every triangle over the placed agents.
  double neighborhood_radius = std::numeric_limits<double>::infinity();
  /// Prefer the smallest triangle no other follower has taken yet; fall back
  /// to a shared one only when every admissible triangle is taken.
  bool distinct_simplices = false;
};

/// Greedy layer assignment: layer l takes every remaining follower with an
/// admissible enclosing triangle over W_{l-1}. Each gets the minimum-area such
/// triangle, ties broken by sorted vertex ids. Throws InfeasibleFormationError.
LayeredGraph build_layers(const ReferenceConfiguration& config, const std::vector<AgentId>& boundary,
                          AgentId core, const LayeringOptions& options = {});

/// classify_boundary + select_core_leader + build_layers.
LayeredGraph build_graph(const ReferenceConfiguration& config, const LayeringOptions& options = {});

enum class ViolationKind {
  kPartition,        // layers not a disjoint cover of V
  kLeaderNeighbors,  // leader with in-neighbors
  kNeighborCount,    // follower without exactly three in-neighbors
  kLayerOrder,       // in-neighbor not in W_{l-1}
  kNotEnclosed,      // follower not strictly inside its simplex
  kCore,             // core missing, not interior, or not a leader
  kBoundary,         // boundary ids differ from hull vertices
};

struct Violation {
  ViolationKind kind;
  std::vector<AgentId> ids;
  std::string message;
};

std::string to_string(ViolationKind kind);

/// Post-hoc check of every structural invariant. Empty result iff valid.
std::vector<Violation> validate_dnn(const LayeredGraph& graph, const ReferenceConfiguration& config);

}  // namespace dnncover
