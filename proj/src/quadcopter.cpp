#include "dnncover/quadcopter.hpp"

#include "dnncover/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace dnncover {

namespace {

// Unit thrust direction b(phi, theta, psi) with its Jacobian and Hessians
// w.r.t. (phi, theta, psi). hess[c](p, q) = d^2 b_c / d eta_p d eta_q.
struct ThrustDirection {
  Vec3 b;
  Mat3 jac;
  std::array<Mat3, 3> hess;
};

ThrustDirection thrust_direction(double phi, double theta, double psi, bool with_hessian) {
  const double sf = std::sin(phi), cf = std::cos(phi);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(psi), cp = std::cos(psi);

  ThrustDirection d;
  d.b << sf * sp + cf * cp * st,  //
      cf * sp * st - sf * cp,     //
      cf * ct;

  d.jac << cf * sp - sf * cp * st, cf * cp * ct, sf * cp - cf * sp * st,  //
      -sf * sp * st - cf * cp, cf * sp * ct, cf * cp * st + sf * sp,      //
      -sf * ct, -cf * st, 0.0;

  if (with_hessian) {
    const double b1 = d.b[0], b2 = d.b[1];
    d.hess[0] << -b1, -sf * cp * ct, cf * cp + sf * sp * st,  //
        -sf * cp * ct, -cf * cp * st, -cf * sp * ct,          //
        cf * cp + sf * sp * st, -cf * sp * ct, -b1;
    d.hess[1] << -b2, -sf * sp * ct, cf * sp - sf * cp * st,  //
        -sf * sp * ct, -cf * sp * st, cf * cp * ct,           //
        cf * sp - sf * cp * st, cf * cp * ct, -b2;
    d.hess[2] << -cf * ct, sf * st, 0.0,  //
        sf * st, -cf * ct, 0.0,           //
        0.0, 0.0, 0.0;
  }
  return d;
}

void require_finite(const QuadState& s, const char* what) {
  if (!s.x.allFinite()) throw NumericError(std::string(what) + ": state has non-finite entries");
}

}  // namespace

QuadState QuadState::hover(const Vec3& position, double mass) {
  QuadState s;
  s.x.segment<3>(kX) = position;
  s.x[kThrust] = mass * kGravity;
  return s;
}

FlatVector FlatState::vector() const {
  FlatVector z;
  z << r, v, a, j, psi, psi_rate;
  return z;
}

FlatState FlatState::setpoint(const Vec3& r, double psi) {
  FlatState z;
  z.r = r;
  z.psi = psi;
  return z;
}

Vec3 acceleration(const QuadState& s, double mass) {
  const ThrustDirection d = thrust_direction(s.phi(), s.theta(), s.psi(), false);
  return s.thrust() / mass * d.b - Vec3(0.0, 0.0, kGravity);
}

StateVector derivative(const QuadState& s, const Input& u, double mass) {
  require_finite(s, "derivative");
  if (!u.allFinite()) throw NumericError("derivative: input has non-finite entries");
  StateVector dx;
  dx.segment<3>(0) = s.velocity();
  dx.segment<3>(3) = acceleration(s, mass);
  dx.segment<3>(6) = s.attitude_rate();
  dx.segment<3>(9) = u.segment<3>(1);
  dx[12] = s.thrust_rate();
  dx[13] = u[0];
  return dx;
}

FlatState flat_state(const QuadState& s, double mass) {
  if (!s.x.allFinite()) throw TransformationError("flat_state: state has non-finite entries");
  constexpr double kHalfPi = std::numbers::pi / 2.0;
  if (std::abs(s.phi()) >= kHalfPi || std::abs(s.theta()) >= kHalfPi) {
    throw TransformationError("flat_state: roll/pitch outside the model envelope");
  }
  const ThrustDirection d = thrust_direction(s.phi(), s.theta(), s.psi(), false);
  FlatState z;
  z.r = s.position();
  z.v = s.velocity();
  z.a = s.thrust() / mass * d.b - Vec3(0.0, 0.0, kGravity);
  z.j = s.thrust_rate() / mass * d.b + s.thrust() / mass * (d.jac * s.attitude_rate());
  z.psi = s.psi();
  z.psi_rate = s.attitude_rate()[2];
  return z;
}

LinearizingMatrices linearizing_matrices(const QuadState& s, double mass, const SingularityGuard& guard) {
  if (!s.x.allFinite()) throw SingularityError("linearizing_matrices: state has non-finite entries");
  if (!(s.thrust() > guard.min_thrust)) {
    throw SingularityError("thrust " + std::to_string(s.thrust()) + " N is at or below the floor " +
                           std::to_string(guard.min_thrust) + " N");
  }
  const double limit = std::numbers::pi / 2.0 - guard.attitude_margin;
  if (std::abs(s.phi()) >= limit || std::abs(s.theta()) >= limit) {
    throw SingularityError("roll/pitch too close to pi/2 for the linearizing transform");
  }

  const double f = s.thrust();
  const double fdot = s.thrust_rate();
  const Vec3 rates = s.attitude_rate();
  const ThrustDirection d = thrust_direction(s.phi(), s.theta(), s.psi(), true);

  LinearizingMatrices out;
  out.m1.setZero();
  out.m1.block<3, 1>(0, 0) = d.b / mass;
  out.m1.block<3, 3>(0, 1) = f / mass * d.jac;
  out.m1(3, 3) = 1.0;

  Vec3 curvature;
  for (int c = 0; c < 3; ++c) curvature[c] = rates.dot(d.hess[c] * rates);
  out.m2.head<3>() = 2.0 * fdot / mass * (d.jac * rates) + f / mass * curvature;
  out.m2[3] = 0.0;

  const Eigen::JacobiSVD<Mat4> svd(out.m1);
  const auto sv = svd.singularValues();
  out.condition = sv[0] / sv[3];
  return out;
}

Eigen::Matrix<double, 14, 14> flat_a_matrix() {
  Eigen::Matrix<double, 14, 14> a = Eigen::Matrix<double, 14, 14>::Zero();
  a.block<9, 9>(0, 3).setIdentity();
  a(12, 13) = 1.0;
  return a;
}

Eigen::Matrix<double, 14, 4> flat_b_matrix() {
  Eigen::Matrix<double, 14, 4> b = Eigen::Matrix<double, 14, 4>::Zero();
  b.block<3, 3>(9, 0).setIdentity();
  b(13, 3) = 1.0;
  return b;
}

ControllerGains::ControllerGains(const GainMatrix& k, double mass) : k_(k), mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw GainSpecError("vehicle mass must be positive");
  if (!k.allFinite()) throw GainSpecError("gain matrix has non-finite entries");
  const Eigen::Matrix<double, 14, 14> closed = flat_a_matrix() - flat_b_matrix() * k;
  const Eigen::EigenSolver<Eigen::Matrix<double, 14, 14>> eig(closed, false);
  for (int i = 0; i < 14; ++i) {
    if (!(eig.eigenvalues()[i].real() < 0.0)) {
      throw GainSpecError("closed-loop matrix A - BK is not Hurwitz (eigenvalue with real part " +
                          std::to_string(eig.eigenvalues()[i].real()) + ")");
    }
  }
}

namespace {

// Coefficients c_0..c_{n-1} of prod (s - p_i) = s^n + c_{n-1} s^{n-1} + ... + c_0.
template <std::size_t N>
std::array<double, N> monic_coefficients(const std::array<double, N>& poles) {
  std::array<double, N + 1> c{};
  c[0] = 1.0;  // running polynomial, lowest degree first
  std::size_t degree = 0;
  for (double p : poles) {
    for (std::size_t k = degree + 1; k > 0; --k) c[k] = c[k - 1] - p * c[k];
    c[0] = -p * c[0];
    ++degree;
  }
  std::array<double, N> out{};
  for (std::size_t k = 0; k < N; ++k) out[k] = c[k];
  return out;
}

}  // namespace

ControllerGains design_gains(const PoleSpec& poles, double mass) {
  for (double p : poles.translational) {
    if (!(p < 0.0) || !std::isfinite(p)) throw GainSpecError("translational pole " + std::to_string(p) + " is not stable");
  }
  for (double p : poles.yaw) {
    if (!(p < 0.0) || !std::isfinite(p)) throw GainSpecError("yaw pole " + std::to_string(p) + " is not stable");
  }
  const auto kt = monic_coefficients(poles.translational);
  const auto ky = monic_coefficients(poles.yaw);

  GainMatrix k = GainMatrix::Zero();
  for (int axis = 0; axis < 3; ++axis) {
    for (int order = 0; order < 4; ++order) k(axis, 3 * order + axis) = kt[order];
  }
  k(3, 12) = ky[0];
  k(3, 13) = ky[1];
  return ControllerGains(k, mass);
}

Input tracking_control(const QuadState& s, const FlatState& target, const ControllerGains& gains,
                       const SingularityGuard& guard) {
  const LinearizingMatrices lm = linearizing_matrices(s, gains.mass(), guard);
  const FlatState z = flat_state(s, gains.mass());
  const Eigen::Vector4d w = gains.k() * (target.vector() - z.vector());
  return lm.m1.partialPivLu().solve(w - lm.m2);
}

QuadState step(const QuadState& s, const Input& u, double dt, double mass) {
  if (!(dt > 0.0 && dt <= 0.02)) throw DomainError("integration step must lie in (0, 0.02] s");
  auto eval = [&](const StateVector& x) {
    QuadState q;
    q.x = x;
    return derivative(q, u, mass);
  };
  const StateVector k1 = eval(s.x);
  const StateVector k2 = eval(s.x + 0.5 * dt * k1);
  const StateVector k3 = eval(s.x + 0.5 * dt * k2);
  const StateVector k4 = eval(s.x + dt * k3);
  QuadState next;
  next.x = s.x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!next.x.allFinite()) throw DivergenceError("integration produced a non-finite state");
  return next;
}

}  // namespace dnncover
