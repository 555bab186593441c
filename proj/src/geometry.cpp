#include "dnncover/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace dnncover {

double polygon_signed_area(std::span<const Vec2> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return 0.5 * twice;
}

Vec2 polygon_vertex_mean(std::span<const Vec2> polygon) {
  Vec2 sum = Vec2::Zero();
  for (const Vec2& p : polygon) sum += p;
  return sum / static_cast<double>(polygon.size());
}

namespace {

// Treats near-collinear triples as collinear so that points on hull edges are
// dropped even with round-off in their coordinates.
bool turns_left(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double cross = orient2d(a, b, c);
  const double scale = (b - a).norm() * (c - a).norm();
  return cross > 1e-12 * scale;
}

}  // namespace

std::vector<std::size_t> convex_hull_indices(std::span<const Vec2> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    if (points[i].x() != points[j].x()) return points[i].x() < points[j].x();
    return points[i].y() < points[j].y();
  });
  if (order.size() < 3) return order;

  std::vector<std::size_t> hull(2 * order.size());
  std::size_t k = 0;
  for (std::size_t idx : order) {
    while (k >= 2 && !turns_left(points[hull[k - 2]], points[hull[k - 1]], points[idx])) --k;
    hull[k++] = idx;
  }
  const std::size_t lower = k + 1;
  for (auto it = order.rbegin() + 1; it != order.rend(); ++it) {
    while (k >= lower && !turns_left(points[hull[k - 2]], points[hull[k - 1]], points[*it])) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

bool is_strictly_convex(std::span<const Vec2> polygon, double min_area) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  const double area = polygon_signed_area(polygon);
  if (std::abs(area) <= min_area) return false;
  const double sign = area > 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    const Vec2& c = polygon[(i + 2) % n];
    const double scale = (b - a).norm() * (c - b).norm();
    if (sign * orient2d(a, b, c) <= 1e-12 * scale) return false;
  }
  return true;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

double point_triangle_distance(const Vec2& p, const Triangle& t) {
  const double d0 = orient2d(t[0], t[1], p);
  const double d1 = orient2d(t[1], t[2], p);
  const double d2 = orient2d(t[2], t[0], p);
  const bool has_neg = d0 < 0 || d1 < 0 || d2 < 0;
  const bool has_pos = d0 > 0 || d1 > 0 || d2 > 0;
  if (!(has_neg && has_pos)) return 0.0;
  return std::min({point_segment_distance(p, t[0], t[1]), point_segment_distance(p, t[1], t[2]),
                   point_segment_distance(p, t[2], t[0])});
}

}  // namespace dnncover
