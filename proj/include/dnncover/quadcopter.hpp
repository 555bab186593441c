#pragma once

#include "dnncover/geometry.hpp"

#include <Eigen/Core>

#include <array>

namespace dnncover {

inline constexpr double kGravity = 9.81;  // m/s^2

using StateVector = Eigen::Matrix<double, 14, 1>;
using FlatVector = Eigen::Matrix<double, 14, 1>;
using Input = Eigen::Vector4d;  // [f'', phi'', theta'', psi'']
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using GainMatrix = Eigen::Matrix<double, 4, 14>;

/// 14-entry quadcopter state:
/// [x y z | vx vy vz | phi theta psi | phi' theta' psi' | f f'].
struct QuadState {
  enum Index : int { kX = 0, kVx = 3, kPhi = 6, kTheta = 7, kPsi = 8, kPhiRate = 9, kThrust = 12, kThrustRate = 13 };

  StateVector x = StateVector::Zero();

  Vec3 position() const { return x.segment<3>(kX); }
  Vec3 velocity() const { return x.segment<3>(kVx); }
  Vec3 attitude() const { return x.segment<3>(kPhi); }
  Vec3 attitude_rate() const { return x.segment<3>(kPhiRate); }
  double phi() const { return x[kPhi]; }
  double theta() const { return x[kTheta]; }
  double psi() const { return x[kPsi]; }
  double thrust() const { return x[kThrust]; }
  double thrust_rate() const { return x[kThrustRate]; }

  /// Level hover at `position`: f = m g, everything else at rest.
  static QuadState hover(const Vec3& position, double mass);
};

/// Position, its first three derivatives, yaw and yaw rate.
struct FlatState {
  Vec3 r = Vec3::Zero();
  Vec3 v = Vec3::Zero();
  Vec3 a = Vec3::Zero();
  Vec3 j = Vec3::Zero();
  double psi = 0.0;
  double psi_rate = 0.0;

  FlatVector vector() const;
  /// Setpoint with zero velocity, acceleration and jerk at yaw `psi`.
  static FlatState setpoint(const Vec3& r, double psi = 0.0);
};

/// Translational acceleration in terms of the state (thrust along the body z axis).
Vec3 acceleration(const QuadState& s, double mass);

/// d/dt of the state under input u. Throws NumericError on non-finite input.
StateVector derivative(const QuadState& s, const Input& u, double mass);

/// Throws TransformationError outside |phi|, |theta| < pi/2 or on non-finite state.
FlatState flat_state(const QuadState& s, double mass);

struct SingularityGuard {
  double min_thrust = 0.1;        // N
  double attitude_margin = 0.05;  // rad from pi/2
};

/// [x'''' y'''' z'''' psi'']^T = m1 u + m2.
struct LinearizingMatrices {
  Mat4 m1;
  Eigen::Vector4d m2;
  double condition;  // 2-norm condition number of m1
};

/// Throws SingularityError when thrust <= min_thrust or roll/pitch is within
/// attitude_margin of pi/2.
LinearizingMatrices linearizing_matrices(const QuadState& s, double mass, const SingularityGuard& guard = {});

/// Chain-of-integrator model of the flat outputs.
Eigen::Matrix<double, 14, 14> flat_a_matrix();
Eigen::Matrix<double, 14, 4> flat_b_matrix();

class ControllerGains {
 public:
  /// Throws GainSpecError unless A - B K is Hurwitz and mass > 0.
  ControllerGains(const GainMatrix& k, double mass);

  const GainMatrix& k() const { return k_; }
  double mass() const { return mass_; }

 private:
  GainMatrix k_;
  double mass_;
};

struct PoleSpec {
  std::array<double, 4> translational{-2.0, -2.5, -3.0, -3.5};
  std::array<double, 2> yaw{-3.0, -4.0};
};

/// Per-axis pole placement on the x, y, z quadruple integrators and the yaw
/// double integrator. Throws GainSpecError for poles not in the open left half-plane.
ControllerGains design_gains(const PoleSpec& poles, double mass);

/// u = m1^{-1} (K (target - z) - m2).
Input tracking_control(const QuadState& s, const FlatState& target, const ControllerGains& gains,
                       const SingularityGuard& guard = {});

/// Classical RK4 with u held over the step. dt must lie in (0, 0.02].
/// Throws DivergenceError on a non-finite result.
QuadState step(const QuadState& s, const Input& u, double dt, double mass);

}  // namespace dnncover
