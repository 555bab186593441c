#include "dnncover/weights.hpp"

#include "dnncover/errors.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace dnncover {

SimplexWeights solve_simplex_weights(const Vec2& p, const Triangle& triangle) {
  if (std::abs(signed_area(triangle)) <= 1e-12) {
    throw SingularSimplexError("communication simplex is degenerate (zero area)");
  }
  Eigen::Matrix3d a;
  a << triangle[0].x(), triangle[1].x(), triangle[2].x(),  //
      triangle[0].y(), triangle[1].y(), triangle[2].y(),   //
      1.0, 1.0, 1.0;
  const Eigen::Vector3d rhs(p.x(), p.y(), 1.0);
  const Eigen::Vector3d w = a.partialPivLu().solve(rhs);

  SimplexWeights out;
  out.values = {w[0], w[1], w[2]};
  out.exterior = w.minCoeff() < 0.0;
  return out;
}

double beta(double t, double t0, double tf) {
  if (!(tf > t0)) throw DomainError("beta schedule needs tf > t0");
  if (t < t0) throw DomainError("beta is undefined before t0");
  if (t >= tf) return 1.0;
  const double s = (t - t0) / (tf - t0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

WeightSchedule::WeightSchedule(std::map<AgentId, FollowerWeights> followers, double t0, double tf)
    : followers_(std::move(followers)), t0_(t0), tf_(tf) {
  if (!(tf_ > t0_)) throw InvalidInputError("weight schedule needs tf > t0");
}

const FollowerWeights& WeightSchedule::at(AgentId follower) const {
  auto it = followers_.find(follower);
  if (it == followers_.end()) throw LookupError("agent " + std::to_string(follower) + " has no weight schedule");
  return it->second;
}

WeightTriple weight_at(double t, const WeightSchedule& schedule, AgentId follower) {
  const FollowerWeights& fw = schedule.at(follower);
  WeightTriple out{fw.neighbors, fw.final};
  if (t >= schedule.tf()) return out;
  const double b = beta(t, schedule.t0(), schedule.tf());
  for (std::size_t k = 0; k < 3; ++k) out.values[k] = (1.0 - b) * fw.initial[k] + b * fw.final[k];
  return out;
}

}  // namespace dnncover
