#pragma once

#include "dnncover/formation.hpp"
#include "dnncover/heatmap.hpp"
#include "dnncover/weights.hpp"

#include <map>

namespace dnncover {

/// Integrals over a follower simplex below this mass fall back to the
/// geometric centroid.
inline constexpr double kZeroMass = 1e-12;

struct DesiredConfiguration {
  std::map<AgentId, Vec2> positions;       // p_i for every agent
  std::map<AgentId, Triangle> simplices;   // C_i for every follower, in in-neighbor order
  std::map<AgentId, bool> used_fallback;   // follower -> centroid fallback taken

  bool operator==(const DesiredConfiguration& o) const;
};

/// Single layer-ordered sweep: boundary agents take their targets, the core
/// takes their mean, and each follower takes the heat-weighted centroid of the
/// triangle spanned by its in-neighbors' desired positions.
DesiredConfiguration forward_pass(const LayeredGraph& graph, const HeatMap& map,
                                  const std::map<AgentId, Vec2>& boundary_targets,
                                  const QuadratureOptions& quadrature = {});

/// Barycentric weights of each follower's desired position w.r.t. its desired
/// simplex. Throws SingularSimplexError naming the follower on collapse.
std::map<AgentId, WeightTriple> final_weights(const DesiredConfiguration& desired, const LayeredGraph& graph);

/// Barycentric weights of each follower in the reference formation.
std::map<AgentId, WeightTriple> initial_weights(const ReferenceConfiguration& config, const LayeredGraph& graph);

struct Plan {
  LayeredGraph graph;
  DesiredConfiguration desired;
  WeightSchedule schedule;
};

struct PlanOptions {
  LayeringOptions layering;
  QuadratureOptions quadrature;
};

Plan plan(const ReferenceConfiguration& config, const HeatMap& map,
          const std::map<AgentId, Vec2>& boundary_targets, double t0, double tf, const PlanOptions& options = {});

}  // namespace dnncover
