#pragma once

#include "dnncover/formation.hpp"
#include "dnncover/heatmap.hpp"
#include "dnncover/sim.hpp"

#include <map>
#include <optional>
#include <string>

namespace dnncover {

struct FrameInput {
  const Trajectory* trajectory = nullptr;
  const LayeredGraph* graph = nullptr;
  const HeatMap* heat_map = nullptr;
  const std::map<AgentId, Vec2>* desired = nullptr;  // optional
};

/// Index of the logged sample nearest to t. Throws RangeError outside the log.
std::size_t frame_index(const Trajectory& traj, double t);

/// Static SVG snapshot at time t: heat-map contours, target zones, dashed
/// paths travelled so far, communication links and agents.
std::string render_frame(const FrameInput& input, double t);

/// Straight-line segments of the iso-contour H = level on a regular grid.
struct Segment {
  Vec2 a;
  Vec2 b;
};
std::vector<Segment> contour_segments(const HeatMap& map, const Vec2& lo, const Vec2& hi, int cells, double level);

}  // namespace dnncover
