#pragma once

// Independent oracles and random fixtures shared by the test binaries.

#include "dnncover/formation.hpp"
#include "dnncover/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

namespace testing {

using dnncover::Agent;
using dnncover::AgentId;
using dnncover::Triangle;
using dnncover::Vec2;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Barycentric coordinates by Cramer's rule on the 3x3 system
/// [x1 x2 x3; y1 y2 y3; 1 1 1] w = [px; py; 1].
inline std::array<double, 3> cramer_weights(const Vec2& p, const Triangle& t) {
  auto det3 = [](const Eigen::Matrix3d& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
  };
  Eigen::Matrix3d a;
  a << t[0].x(), t[1].x(), t[2].x(), t[0].y(), t[1].y(), t[2].y(), 1.0, 1.0, 1.0;
  const Eigen::Vector3d rhs(p.x(), p.y(), 1.0);
  const double d = det3(a);
  std::array<double, 3> w{};
  for (int k = 0; k < 3; ++k) {
    Eigen::Matrix3d ak = a;
    ak.col(k) = rhs;
    w[k] = det3(ak) / d;
  }
  return w;
}

/// Triangle with area at least `min_area` and no angle sharper than ~5 degrees.
inline Triangle random_triangle(std::mt19937_64& rng, double scale = 10.0, double min_area = 0.5) {
  for (;;) {
    Triangle t;
    for (auto& v : t) v = Vec2(uniform(rng, -scale, scale), uniform(rng, -scale, scale));
    const double area = 0.5 * std::abs(cross(t[1] - t[0], t[2] - t[0]));
    if (area < min_area) continue;
    bool sharp = false;
    for (int k = 0; k < 3; ++k) {
      const Vec2 u = t[(k + 1) % 3] - t[k];
      const Vec2 v = t[(k + 2) % 3] - t[k];
      const double s = std::abs(cross(u, v)) / (u.norm() * v.norm());
      sharp = sharp || s < 0.09;
    }
    if (!sharp) return t;
  }
}

/// Uniform sample of barycentric coordinates kept at least `margin` from each edge.
inline Vec2 random_interior_point(std::mt19937_64& rng, const Triangle& t, double margin = 0.01) {
  for (;;) {
    double a = uniform(rng, 0.0, 1.0);
    double b = uniform(rng, 0.0, 1.0);
    if (a + b > 1.0) {
      a = 1.0 - a;
      b = 1.0 - b;
    }
    const double c = 1.0 - a - b;
    if (a < margin || b < margin || c < margin) continue;
    return c * t[0] + a * t[1] + b * t[2];
  }
}

/// Hull vertices by the O(N^3) edge test: (i, j) is a hull edge when every
/// other point is strictly left of it or strictly inside the segment.
inline std::set<std::size_t> brute_force_hull(const std::vector<Vec2>& pts) {
  std::set<std::size_t> vertices;
  const std::size_t n = pts.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      bool edge = true;
      for (std::size_t k = 0; k < n && edge; ++k) {
        if (k == i || k == j) continue;
        const double o = cross(pts[j] - pts[i], pts[k] - pts[i]);
        if (o > 0.0) continue;
        if (o == 0.0) {
          const double s = (pts[k] - pts[i]).dot(pts[j] - pts[i]) / (pts[j] - pts[i]).squaredNorm();
          if (s > 0.0 && s < 1.0) continue;
        }
        edge = false;
      }
      if (edge) {
        vertices.insert(i);
        vertices.insert(j);
      }
    }
  }
  return vertices;
}

/// Boundary leaders on a circle at sorted random angles (strictly convex) and
/// interior followers as random convex combinations of the leaders. Ids of the
/// boundary agents are 1..k, interior agents follow.
inline std::vector<Agent> random_feasible_formation(std::mt19937_64& rng, int boundary, int interior,
                                                    double radius = 20.0) {
  std::vector<double> angles;
  for (;;) {
    angles.clear();
    for (int k = 0; k < boundary; ++k) angles.push_back(uniform(rng, 0.0, 2.0 * std::numbers::pi));
    std::sort(angles.begin(), angles.end());
    bool spaced = true;
    for (int k = 0; k < boundary; ++k) {
      const double next = k + 1 < boundary ? angles[k + 1] : angles[0] + 2.0 * std::numbers::pi;
      spaced = spaced && next - angles[k] > 0.05 && next - angles[k] < std::numbers::pi * 0.9;
    }
    if (spaced) break;
  }
  std::vector<Agent> agents;
  for (int k = 0; k < boundary; ++k)
    agents.push_back({k + 1, radius * Vec2(std::cos(angles[k]), std::sin(angles[k]))});
  std::exponential_distribution<double> expo(1.0);
  AgentId next_id = boundary + 1;
  while (static_cast<int>(agents.size()) < boundary + interior) {
    Vec2 p = Vec2::Zero();
    double total = 0.0;
    for (int k = 0; k < boundary; ++k) {
      const double w = expo(rng) + 0.02;
      p += w * agents[k].position;
      total += w;
    }
    p /= total;
    bool clear = true;
    for (const Agent& a : agents) clear = clear && (a.position - p).norm() > 0.05;
    if (clear) agents.push_back({next_id++, p});
  }
  return agents;
}

/// Plain bivariate normal density, written out from the closed form.
inline double normal_pdf(const Vec2& r, const Vec2& mean, const Eigen::Matrix2d& cov) {
  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(1, 0);
  const Vec2 d = r - mean;
  const double q = (cov(1, 1) * d.x() * d.x() - 2.0 * cov(0, 1) * d.x() * d.y() + cov(0, 0) * d.y() * d.y()) / det;
  return std::exp(-0.5 * q) / (2.0 * std::numbers::pi * std::sqrt(det));
}

}  // namespace testing
