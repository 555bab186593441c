#include "dnncover/heatmap.hpp"

#include "dnncover/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dnncover {

Gaussian2d::Gaussian2d(const Vec2& mean, const Mat2& cov) : mean_(mean), cov_(cov) {
  if (!mean.allFinite() || !cov.allFinite()) throw CovarianceError("non-finite Gaussian parameters");
  const double scale = std::max(std::abs(cov(0, 1)), std::abs(cov(1, 0)));
  if (std::abs(cov(0, 1) - cov(1, 0)) > 1e-12 * std::max(1.0, scale)) {
    throw CovarianceError("covariance matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
  const Vec2 ev = eig.eigenvalues();
  if (!(ev.minCoeff() > 0.0)) throw CovarianceError("covariance matrix is not positive definite");
  sigma_min_ = std::sqrt(ev.minCoeff());
  sigma_max_ = std::sqrt(ev.maxCoeff());
  const double det = cov.determinant();
  precision_ = cov.inverse();
  norm_ = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
}

double Gaussian2d::operator()(const Vec2& r) const {
  const Vec2 d = r - mean_;
  return norm_ * std::exp(-0.5 * d.dot(precision_ * d));
}

Application::Application(int id, std::vector<Target> targets, double alpha,
                         std::vector<std::vector<Vec2>> zones)
    : id_(id), targets_(std::move(targets)), alpha_(alpha), zones_(std::move(zones)) {
  if (targets_.empty()) throw InvalidInputError("application " + std::to_string(id_) + " has no targets");
  if (!(alpha_ >= 0.0 && alpha_ <= 1.0)) {
    throw InvalidInputError("application " + std::to_string(id_) + " priority must lie in [0, 1]");
  }
  kernels_.reserve(targets_.size());
  for (const Target& t : targets_) kernels_.emplace_back(t.position, t.covariance);
}

double Application::operator()(const Vec2& r) const {
  double sum = 0.0;
  for (const Gaussian2d& k : kernels_) sum += k(r);
  return sum / static_cast<double>(kernels_.size());
}

HeatMap::HeatMap(std::vector<Application> applications) : applications_(std::move(applications)) {
  if (applications_.empty()) throw InvalidInputError("heat map needs at least one application");
  double total = 0.0;
  for (const Application& a : applications_) total += a.alpha();
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvalidInputError("application priorities must sum to 1 (got " + std::to_string(total) + ")");
  }
}

double HeatMap::operator()(const Vec2& r) const {
  double sum = 0.0;
  for (const Application& a : applications_) {
    if (a.alpha() != 0.0) sum += a.alpha() * a(r);
  }
  return sum;
}

double eval_component(const Vec2& r, const Application& app) { return app(r); }

double eval_sdhm(const Vec2& r, const HeatMap& map) { return map(r); }

namespace detail {

const std::array<RulePoint, 7>& degree5_rule() {
  static const std::array<RulePoint, 7> rule = [] {
    const double s15 = std::sqrt(15.0);
    const double a1 = (6.0 - s15) / 21.0;
    const double b1 = 1.0 - 2.0 * a1;
    const double w1 = (155.0 - s15) / 1200.0;
    const double a2 = (6.0 + s15) / 21.0;
    const double b2 = 1.0 - 2.0 * a2;
    const double w2 = (155.0 + s15) / 1200.0;
    return std::array<RulePoint, 7>{{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0},
        {b1, a1, a1, w1},
        {a1, b1, a1, w1},
        {a1, a1, b1, w1},
        {b2, a2, a2, w2},
        {a2, b2, a2, w2},
        {a2, a2, b2, w2},
    }};
  }();
  return rule;
}

}  // namespace detail

namespace {

struct Moments {
  double m = 0.0;
  double mx = 0.0;
  double my = 0.0;

  Moments& operator+=(const Moments& o) {
    m += o.m;
    mx += o.mx;
    my += o.my;
    return *this;
  }
};

struct KernelReach {
  Vec2 mean;
  double reach;      // distance beyond which the kernel is negligible
  double sigma_min;
};

class AdaptiveIntegrator {
 public:
  AdaptiveIntegrator(const HeatMap& map, const QuadratureOptions& options) : map_(map), options_(options) {
    for (const Application& app : map.applications()) {
      if (app.alpha() == 0.0) continue;
      for (const Gaussian2d& k : app.kernels()) {
        kernels_.push_back({k.mean(), 8.0 * k.sigma_max(), k.sigma_min()});
      }
    }
  }

  Moments estimate(const Triangle& t) const {
    const double area = std::abs(signed_area(t));
    Moments out;
    for (const auto& q : detail::degree5_rule()) {
      const Vec2 r = q.l0 * t[0] + q.l1 * t[1] + q.l2 * t[2];
      const double h = q.weight * map_(r);
      out.m += h;
      out.mx += h * r.x();
      out.my += h * r.y();
    }
    out.m *= area;
    out.mx *= area;
    out.my *= area;
    return out;
  }

  // A triangle is unresolved while some kernel that reaches it is narrow
  // compared to the triangle; such triangles are always split.
  bool unresolved(const Triangle& t) const {
    const Vec2 c = (t[0] + t[1] + t[2]) / 3.0;
    const double radius = std::max({(t[0] - c).norm(), (t[1] - c).norm(), (t[2] - c).norm()});
    const double diameter = std::max({(t[0] - t[1]).norm(), (t[1] - t[2]).norm(), (t[2] - t[0]).norm()});
    for (const KernelReach& k : kernels_) {
      if (diameter > 2.0 * k.sigma_min && (k.mean - c).norm() - radius < k.reach) return true;
    }
    return false;
  }

  static std::array<Triangle, 4> split(const Triangle& t) {
    const Vec2 m01 = 0.5 * (t[0] + t[1]);
    const Vec2 m12 = 0.5 * (t[1] + t[2]);
    const Vec2 m20 = 0.5 * (t[2] + t[0]);
    return {{{t[0], m01, m20}, {m01, t[1], m12}, {m20, m12, t[2]}, {m01, m12, m20}}};
  }

  Moments resolved(const Triangle& t, int depth) const {
    if (depth >= options_.max_depth || !unresolved(t)) return estimate(t);
    Moments sum;
    for (const Triangle& c : split(t)) sum += resolved(c, depth + 1);
    return sum;
  }

  // tol_* are absolute allowances per unit area.
  Moments adapt(const Triangle& t, const Moments& parent, int depth, double tol_mass, double tol_moment) const {
    const auto children = split(t);
    std::array<Moments, 4> est;
    Moments sum;
    for (std::size_t k = 0; k < 4; ++k) {
      est[k] = estimate(children[k]);
      sum += est[k];
    }
    if (depth + 1 >= options_.max_depth) return sum;
    const double area = std::abs(signed_area(t));
    const bool converged = std::abs(sum.m - parent.m) <= tol_mass * area &&
                           std::hypot(sum.mx - parent.mx, sum.my - parent.my) <= tol_moment * area;
    if (converged && !unresolved(t)) return sum;
    Moments refined;
    for (std::size_t k = 0; k < 4; ++k) refined += adapt(children[k], est[k], depth + 1, tol_mass, tol_moment);
    return refined;
  }

 private:
  const HeatMap& map_;
  QuadratureOptions options_;
  std::vector<KernelReach> kernels_;
};

}  // namespace

PolygonIntegral integrate_polygon(const HeatMap& map, std::span<const Vec2> polygon,
                                  const QuadratureOptions& options) {
  std::vector<Vec2> poly(polygon.begin(), polygon.end());
  double area = polygon_signed_area(poly);
  if (!(std::abs(area) >= 1e-12)) throw DegenerateRegionError("integration polygon has (near) zero area");
  if (area < 0) {
    std::reverse(poly.begin(), poly.end());
    area = -area;
  }
  if (poly.size() > 3 && !is_strictly_convex(poly, 0.0)) {
    throw InvalidInputError("integration polygon must be convex");
  }

  std::vector<Triangle> fan;
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    Triangle t{poly[0], poly[k], poly[k + 1]};
    if (std::abs(signed_area(t)) > 0.0) fan.push_back(t);
  }

  const AdaptiveIntegrator integrator(map, options);
  Moments coarse;
  for (const Triangle& t : fan) coarse += integrator.resolved(t, 0);

  double diameter = 0.0;
  for (const Vec2& a : poly) {
    for (const Vec2& b : poly) diameter = std::max(diameter, (a - b).norm());
  }
  const double moment_scale = std::hypot(coarse.mx, coarse.my) + std::abs(coarse.m) * diameter;
  const double tol_mass = options.rel_tol * std::max(std::abs(coarse.m), 1e-18) / area;
  const double tol_moment = options.rel_tol * std::max(moment_scale, 1e-18) / area;

  Moments total;
  for (const Triangle& t : fan) total += integrator.adapt(t, integrator.estimate(t), 0, tol_mass, tol_moment);

  PolygonIntegral out;
  out.mass = total.m;
  out.first_moment = Vec2(total.mx, total.my);
  out.area = area;
  return out;
}

}  // namespace dnncover
