#pragma once

#include "dnncover/formation.hpp"
#include "dnncover/geometry.hpp"

#include <array>
#include <map>

namespace dnncover {

using WeightValues = std::array<double, 3>;

/// Barycentric solution of p = sum w_k v_k, sum w_k = 1.
struct SimplexWeights {
  WeightValues values{};
  bool exterior = false;  // some component is negative: p lies outside the triangle
};

/// Throws SingularSimplexError when |signed area| <= 1e-12.
SimplexWeights solve_simplex_weights(const Vec2& p, const Triangle& triangle);

struct WeightTriple {
  NeighborTriple neighbors{};
  WeightValues values{};
};

/// Minimum-jerk quintic 10s^3 - 15s^4 + 6s^5 of s = (t - t0)/(tf - t0),
/// clamped to 1 for t >= tf. Throws DomainError for t < t0 or tf <= t0.
double beta(double t, double t0, double tf);

struct FollowerWeights {
  NeighborTriple neighbors{};
  WeightValues initial{};  // omega, from the reference formation
  WeightValues final{};    // varpi, from the desired formation

  bool operator==(const FollowerWeights&) const = default;
};

class WeightSchedule {
 public:
  WeightSchedule() = default;
  /// Throws InvalidInputError when tf <= t0.
  WeightSchedule(std::map<AgentId, FollowerWeights> followers, double t0, double tf);

  double t0() const { return t0_; }
  double tf() const { return tf_; }
  const std::map<AgentId, FollowerWeights>& followers() const { return followers_; }
  const FollowerWeights& at(AgentId follower) const;

  bool operator==(const WeightSchedule&) const = default;

 private:
  std::map<AgentId, FollowerWeights> followers_;
  double t0_ = 0.0;
  double tf_ = 1.0;
};

/// (1 - beta) omega + beta varpi; exactly varpi once t >= tf.
WeightTriple weight_at(double t, const WeightSchedule& schedule, AgentId follower);

}  // namespace dnncover
