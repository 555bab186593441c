#pragma once

#include "dnncover/geometry.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace dnncover {

using Mat2 = Eigen::Matrix2d;

/// Normalized bivariate Gaussian density.
class Gaussian2d {
 public:
  /// Throws CovarianceError unless `cov` is symmetric positive definite.
  Gaussian2d(const Vec2& mean, const Mat2& cov);

  double operator()(const Vec2& r) const;

  const Vec2& mean() const { return mean_; }
  const Mat2& covariance() const { return cov_; }
  double sigma_min() const { return sigma_min_; }
  double sigma_max() const { return sigma_max_; }

 private:
  Vec2 mean_;
  Mat2 cov_;
  Mat2 precision_;
  double norm_;
  double sigma_min_;
  double sigma_max_;
};

struct Target {
  Vec2 position;
  Mat2 covariance;
};

/// One service application: an equal-weight mixture over its targets with a
/// priority alpha in [0, 1]. Zone polygons are carried for rendering only.
class Application {
 public:
  Application(int id, std::vector<Target> targets, double alpha,
              std::vector<std::vector<Vec2>> zones = {});

  int id() const { return id_; }
  double alpha() const { return alpha_; }
  const std::vector<Target>& targets() const { return targets_; }
  const std::vector<Gaussian2d>& kernels() const { return kernels_; }
  const std::vector<std::vector<Vec2>>& zones() const { return zones_; }

  /// Mixture density (1/|D|) sum_i N(r; d_i, Sigma_i).
  double operator()(const Vec2& r) const;

 private:
  int id_;
  std::vector<Target> targets_;
  std::vector<Gaussian2d> kernels_;
  double alpha_;
  std::vector<std::vector<Vec2>> zones_;
};

/// Priority-weighted sum of application densities. Priorities must sum to 1.
class HeatMap {
 public:
  explicit HeatMap(std::vector<Application> applications);

  const std::vector<Application>& applications() const { return applications_; }
  double operator()(const Vec2& r) const;

 private:
  std::vector<Application> applications_;
};

double eval_component(const Vec2& r, const Application& app);
double eval_sdhm(const Vec2& r, const HeatMap& map);

struct QuadratureOptions {
  double rel_tol = 1e-6;
  int max_depth = 20;
};

struct PolygonIntegral {
  double mass = 0.0;                     // integral of H
  Vec2 first_moment = Vec2::Zero();      // integral of r H
  double area = 0.0;                     // integral of 1
};

/// Integrates H, r H and 1 over a convex polygon by fan triangulation and an
/// adaptive 7-point degree-5 triangle rule. Clockwise input is reversed.
/// Throws DegenerateRegionError when the area is below 1e-12.
PolygonIntegral integrate_polygon(const HeatMap& map, std::span<const Vec2> polygon,
                                  const QuadratureOptions& options = {});

/// 7-point degree-5 rule on a single triangle, for an arbitrary integrand.
template <typename F>
double triangle_rule(const Triangle& t, F&& f);

namespace detail {
struct RulePoint {
  double l0, l1, l2, weight;
};
const std::array<RulePoint, 7>& degree5_rule();
}  // namespace detail

template <typename F>
double triangle_rule(const Triangle& t, F&& f) {
  double sum = 0.0;
  for (const auto& q : detail::degree5_rule()) {
    const Vec2 r = q.l0 * t[0] + q.l1 * t[1] + q.l2 * t[2];
    sum += q.weight * f(r);
  }
  return sum * std::abs(signed_area(t));
}

}  // namespace dnncover
