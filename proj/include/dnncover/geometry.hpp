#pragma once

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace dnncover {

using AgentId = int;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

using Triangle = std::array<Vec2, 3>;

/// z-component of (b - a) x (c - a); positive when a, b, c turn counter-clockwise.
inline double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

inline double signed_area(const Triangle& t) { return 0.5 * orient2d(t[0], t[1], t[2]); }

/// Shoelace area; positive for counter-clockwise vertex order.
double polygon_signed_area(std::span<const Vec2> polygon);

Vec2 polygon_vertex_mean(std::span<const Vec2> polygon);

/// Indices into `points` of the strict convex hull vertices, counter-clockwise,
/// starting from the lexicographically smallest point. Points lying on a hull
/// edge are not vertices. Returns fewer than 3 indices when all points are
/// collinear.
std::vector<std::size_t> convex_hull_indices(std::span<const Vec2> points);

/// True when `polygon` is strictly convex with consistent orientation and
/// non-negligible area.
bool is_strictly_convex(std::span<const Vec2> polygon, double min_area = 1e-12);

/// Distance from `p` to the closed triangle `t`.
double point_triangle_distance(const Vec2& p, const Triangle& t);

}  // namespace dnncover
