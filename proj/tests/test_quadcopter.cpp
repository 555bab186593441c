#include "dnncover/errors.hpp"
#include "dnncover/quadcopter.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <numbers>
#include <random>

using namespace dnncover;

namespace {

constexpr double kMass = 1.3;

QuadState random_state(std::mt19937_64& rng) {
  QuadState s;
  for (int k = 0; k < 3; ++k) s.x[k] = testing::uniform(rng, -5, 5);
  for (int k = 3; k < 6; ++k) s.x[k] = testing::uniform(rng, -2, 2);
  for (int k = 6; k < 8; ++k) s.x[k] = testing::uniform(rng, -0.5, 0.5);
  s.x[8] = testing::uniform(rng, -std::numbers::pi, std::numbers::pi);
  for (int k = 9; k < 12; ++k) s.x[k] = testing::uniform(rng, -1, 1);
  s.x[12] = kMass * kGravity * testing::uniform(rng, 0.6, 1.5);
  s.x[13] = testing::uniform(rng, -3, 3);
  return s;
}

QuadState with_angles(QuadState s, const Vec3& eta) {
  s.x.segment<3>(QuadState::kPhi) = eta;
  return s;
}

}  // namespace

TEST_SUITE("quadcopter") {
  TEST_CASE("hover is an equilibrium") {
    const QuadState s = QuadState::hover(Vec3(1, 2, 10), kMass);
    const StateVector dx = derivative(s, Input::Zero(), kMass);
    CHECK(dx.norm() < 1e-12);
    const QuadState next = step(s, Input::Zero(), 0.02, kMass);
    CHECK((next.x - s.x).norm() < 1e-12);
  }

  TEST_CASE("zero thrust is free fall") {
    QuadState s = QuadState::hover(Vec3::Zero(), kMass);
    s.x[QuadState::kThrust] = 0.0;
    CHECK(derivative(s, Input::Zero(), kMass)[5] == doctest::Approx(-9.81));
    for (int k = 0; k < 1000; ++k) s = step(s, Input::Zero(), 1e-3, kMass);
    CHECK(std::abs(s.position().z() + 4.905) < 1e-9);
  }

  TEST_CASE("pitched hover thrust accelerates along x") {
    QuadState s = QuadState::hover(Vec3::Zero(), kMass);
    s.x[QuadState::kTheta] = 0.1;
    const Vec3 a = acceleration(s, kMass);
    // Thrust direction (cos phi sin theta cos psi + sin phi sin psi, ..., cos phi cos theta).
    CHECK(a.x() == doctest::Approx(kGravity * std::sin(0.1)).epsilon(1e-14));
    CHECK(std::abs(a.y()) < 1e-15);
    CHECK(a.z() == doctest::Approx(kGravity * (std::cos(0.1) - 1.0)).epsilon(1e-12));

    // General angles against the rotation matrix R = Rz(psi) Ry(theta) Rx(phi).
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 100; ++trial) {
      const QuadState q = random_state(rng);
      const Eigen::Matrix3d r = (Eigen::AngleAxisd(q.psi(), Vec3::UnitZ()) *
                                 Eigen::AngleAxisd(q.theta(), Vec3::UnitY()) *
                                 Eigen::AngleAxisd(q.phi(), Vec3::UnitX()))
                                    .toRotationMatrix();
      const Vec3 expected = q.thrust() / kMass * r.col(2) - Vec3(0, 0, kGravity);
      CHECK((acceleration(q, kMass) - expected).norm() < 1e-12);
    }
  }

  TEST_CASE("derivative structure") {
    std::mt19937_64 rng(2);
    const QuadState s = random_state(rng);
    const Input u(0.4, -0.3, 0.2, 0.7);
    const StateVector dx = derivative(s, u, kMass);
    CHECK(dx.segment<3>(0) == s.velocity());
    CHECK(dx.segment<3>(6) == s.attitude_rate());
    CHECK(dx.segment<3>(9) == u.segment<3>(1));
    CHECK(dx[11] == u[3]);
    CHECK(dx[12] == s.thrust_rate());
    CHECK(dx[13] == u[0]);
    CHECK_THROWS_AS(derivative(s, Input(std::nan(""), 0, 0, 0), kMass), NumericError);
    QuadState bad = s;
    bad.x[4] = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(derivative(bad, u, kMass), NumericError);
  }

  TEST_CASE("flat state at hover and under thrust rate") {
    QuadState s = QuadState::hover(Vec3(3, 4, 5), kMass);
    FlatState z = flat_state(s, kMass);
    CHECK(z.r == Vec3(3, 4, 5));
    CHECK(z.v.norm() == 0.0);
    CHECK(z.a.norm() < 1e-14);
    CHECK(z.j.norm() == 0.0);
    CHECK(z.psi == 0.0);

    s.x[QuadState::kThrustRate] = 2.6;
    z = flat_state(s, kMass);
    CHECK(z.j.z() == doctest::Approx(2.6 / kMass).epsilon(1e-15));
    CHECK(std::abs(z.j.x()) < 1e-15);

    s.x[QuadState::kPhi] = std::numbers::pi / 2.0;
    CHECK_THROWS_AS(flat_state(s, kMass), TransformationError);
  }

  TEST_CASE("jerk matches central differences of acceleration") {
    std::mt19937_64 rng(3);
    const double h = 1e-4;
    for (int trial = 0; trial < 50; ++trial) {
      const QuadState s = random_state(rng);
      const Input u(testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1), testing::uniform(rng, -1, 1),
                    testing::uniform(rng, -1, 1));
      const QuadState ahead = step(s, u, h, kMass);
      // Backward step: integrate the time-reversed system.
      QuadState back = s;
      {
        auto eval = [&](const StateVector& x) {
          QuadState q;
          q.x = x;
          return derivative(q, u, kMass);
        };
        const StateVector k1 = eval(s.x);
        const StateVector k2 = eval(s.x - 0.5 * h * k1);
        const StateVector k3 = eval(s.x - 0.5 * h * k2);
        const StateVector k4 = eval(s.x - h * k3);
        back.x = s.x - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      const Vec3 fd = (acceleration(ahead, kMass) - acceleration(back, kMass)) / (2.0 * h);
      const Vec3 jerk = flat_state(s, kMass).j;
      CHECK((fd - jerk).norm() <= 1e-4 * std::max(1.0, jerk.norm()));
    }
  }

  TEST_CASE("linearizing matrices guard against singular states") {
    QuadState s = QuadState::hover(Vec3::Zero(), kMass);
    s.x[QuadState::kThrust] = 0.0;
    CHECK_THROWS_AS(linearizing_matrices(s, kMass), SingularityError);
    s.x[QuadState::kThrust] = 0.1;
    CHECK_THROWS_AS(linearizing_matrices(s, kMass), SingularityError);
    s.x[QuadState::kThrust] = kMass * kGravity;
    s.x[QuadState::kTheta] = std::numbers::pi / 2.0 - 0.04;
    CHECK_THROWS_AS(linearizing_matrices(s, kMass), SingularityError);
    s.x[QuadState::kTheta] = std::numbers::pi / 2.0 - 0.06;
    CHECK_NOTHROW(linearizing_matrices(s, kMass));
  }

  TEST_CASE("yaw row of the linearizing matrices") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 20; ++trial) {
      const LinearizingMatrices lm = linearizing_matrices(random_state(rng), kMass);
      CHECK(lm.m1.row(3) == Eigen::RowVector4d(0, 0, 0, 1));
      CHECK(lm.m2[3] == 0.0);
      CHECK(lm.condition >= 1.0);
      CHECK(std::isfinite(lm.condition));
    }
  }

  TEST_CASE("input columns match numeric derivatives of the thrust direction") {
    std::mt19937_64 rng(5);
    const double h = 1e-6;
    for (int trial = 0; trial < 50; ++trial) {
      const QuadState s = random_state(rng);
      const LinearizingMatrices lm = linearizing_matrices(s, kMass);
      // Column 0: d(acceleration)/df.
      QuadState sp = s, sm = s;
      sp.x[QuadState::kThrust] += h;
      sm.x[QuadState::kThrust] -= h;
      const Vec3 dfc = (acceleration(sp, kMass) - acceleration(sm, kMass)) / (2.0 * h);
      CHECK((lm.m1.block<3, 1>(0, 0) - dfc).norm() < 1e-8);
      // Columns 1..3: d(acceleration)/d(angle).
      for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e[k] = h;
        const Vec3 dc = (acceleration(with_angles(s, s.attitude() + e), kMass) -
                         acceleration(with_angles(s, s.attitude() - e), kMass)) /
                        (2.0 * h);
        CHECK((lm.m1.block<3, 1>(0, 1 + k) - dc).norm() < 1e-7);
      }
    }
  }

  TEST_CASE("drift term matches numeric second derivatives of the thrust direction") {
    std::mt19937_64 rng(6);
    const double h = 1e-4;
    for (int trial = 0; trial < 50; ++trial) {
      QuadState s = random_state(rng);
      s.x[QuadState::kThrustRate] = 0.0;
      const Vec3 rates = s.attitude_rate();
      // With zero thrust rate the drift is the second derivative of the
      // acceleration along the attitude-rate direction.
      auto acc_at = [&](double tau) { return acceleration(with_angles(s, s.attitude() + tau * rates), kMass); };
      const Vec3 second = (acc_at(h) - 2.0 * acc_at(0.0) + acc_at(-h)) / (h * h);
      const LinearizingMatrices lm = linearizing_matrices(s, kMass);
      CHECK((lm.m2.head<3>() - second).norm() < 1e-5 * std::max(1.0, second.norm()));

      // The thrust-rate coupling doubles the rate-weighted Jacobian.
      QuadState t = s;
      t.x[QuadState::kThrustRate] = 1.7;
      const LinearizingMatrices lt = linearizing_matrices(t, kMass);
      const Vec3 coupling = lt.m2.head<3>() - lm.m2.head<3>();
      const Vec3 jac_rates = lm.m1.block<3, 3>(0, 1) * rates * kMass / s.thrust();
      CHECK((coupling - 2.0 * 1.7 / kMass * jac_rates).norm() < 1e-12 * std::max(1.0, coupling.norm()));
    }
  }

  TEST_CASE("snap identity along controlled trajectories") {
    std::mt19937_64 rng(8);
    const ControllerGains gains = design_gains({}, kMass);
    const double h = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
      QuadState s = QuadState::hover(Vec3::Zero(), kMass);
      const FlatState target = FlatState::setpoint(
          Vec3(testing::uniform(rng, -3, 3), testing::uniform(rng, -3, 3), testing::uniform(rng, -2, 2)),
          testing::uniform(rng, -1, 1));
      const int steps = 20 + static_cast<int>(rng() % 80);
      for (int k = 0; k < steps; ++k) s = step(s, tracking_control(s, target, gains), 0.01, kMass);

      const Input u = tracking_control(s, target, gains);
      const QuadState s0 = step(s, u, h, kMass);
      const QuadState s1 = step(s0, u, h, kMass);
      Eigen::Vector4d fd;
      fd.head<3>() = (acceleration(s1, kMass) - 2.0 * acceleration(s0, kMass) + acceleration(s, kMass)) / (h * h);
      fd[3] = (s1.psi() - 2.0 * s0.psi() + s.psi()) / (h * h);
      const LinearizingMatrices lm = linearizing_matrices(s0, kMass);
      const Eigen::Vector4d predicted = lm.m1 * u + lm.m2;
      CHECK((fd - predicted).norm() <= 1e-3 * predicted.norm());
    }
  }

  TEST_CASE("pole placement reproduces the requested spectrum") {
    const ControllerGains gains = design_gains({}, 1.0);
    const Eigen::Matrix<double, 14, 14> closed = flat_a_matrix() - flat_b_matrix() * gains.k();
    const Eigen::EigenSolver<Eigen::Matrix<double, 14, 14>> eig(closed);
    std::vector<double> got;
    for (int i = 0; i < 14; ++i) {
      CHECK(std::abs(eig.eigenvalues()[i].imag()) < 1e-6);
      got.push_back(eig.eigenvalues()[i].real());
    }
    std::sort(got.begin(), got.end());
    std::vector<double> want{-4.0, -3.5, -3.5, -3.5, -3.0, -3.0, -3.0, -3.0, -2.5, -2.5, -2.5, -2.0, -2.0, -2.0};
    for (int i = 0; i < 14; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-6));

    // Per-axis characteristic polynomial is (s+2)(s+2.5)(s+3)(s+3.5) = s^4 + 11 s^3 + 44.75 s^2 + 79.75 s + 52.5.
    CHECK(gains.k()(0, 0) == doctest::Approx(52.5).epsilon(1e-12));
    CHECK(gains.k()(1, 4) == doctest::Approx(79.75).epsilon(1e-12));
    CHECK(gains.k()(2, 8) == doctest::Approx(44.75).epsilon(1e-12));
    CHECK(gains.k()(0, 9) == doctest::Approx(11.0).epsilon(1e-12));
    CHECK(gains.k()(3, 12) == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(gains.k()(3, 13) == doctest::Approx(7.0).epsilon(1e-12));

    // Distinct translational poles are reproduced to 1e-8 per axis.
    Eigen::Matrix4d chain = Eigen::Matrix4d::Zero();
    chain.block<3, 3>(0, 1).setIdentity();
    for (int o = 0; o < 4; ++o) chain(3, o) = -gains.k()(0, 3 * o);
    const Eigen::EigenSolver<Eigen::Matrix4d> axis(chain);
    std::vector<double> poles;
    for (int i = 0; i < 4; ++i) poles.push_back(axis.eigenvalues()[i].real());
    std::sort(poles.begin(), poles.end());
    const std::vector<double> requested{-3.5, -3.0, -2.5, -2.0};
    for (int i = 0; i < 4; ++i) CHECK(std::abs(poles[i] - requested[i]) < 1e-8);
  }

  TEST_CASE("unstable pole choices are rejected") {
    PoleSpec p;
    p.translational[1] = 1.0;
    CHECK_THROWS_AS(design_gains(p, 1.0), GainSpecError);
    PoleSpec y;
    y.yaw[0] = 0.0;
    CHECK_THROWS_AS(design_gains(y, 1.0), GainSpecError);
    CHECK_THROWS_AS(ControllerGains(GainMatrix::Zero(), 1.0), GainSpecError);
    CHECK_THROWS_AS(design_gains({}, 0.0), GainSpecError);
  }

  TEST_CASE("control at the setpoint and yaw decoupling") {
    const ControllerGains gains = design_gains({}, kMass);
    const QuadState s = QuadState::hover(Vec3(1, 1, 10), kMass);
    const Input u = tracking_control(s, FlatState::setpoint(Vec3(1, 1, 10)), gains);
    CHECK(u.norm() < 1e-12);

    const Input yaw = tracking_control(s, FlatState::setpoint(Vec3(1, 1, 10), 0.3), gains);
    CHECK(std::abs(yaw[0]) < 1e-12);
    CHECK(std::abs(yaw[1]) < 1e-12);
    CHECK(std::abs(yaw[2]) < 1e-12);
    CHECK(yaw[3] == doctest::Approx(12.0 * 0.3).epsilon(1e-12));

    QuadState hold = s;
    for (int k = 0; k < 500; ++k) hold = step(hold, tracking_control(hold, FlatState::setpoint(Vec3(1, 1, 10)), gains), 0.01, kMass);
    CHECK((hold.x - s.x).norm() < 1e-12);
  }

  TEST_CASE("step size validation") {
    const QuadState s = QuadState::hover(Vec3::Zero(), kMass);
    CHECK_THROWS_AS(step(s, Input::Zero(), 0.0, kMass), DomainError);
    CHECK_THROWS_AS(step(s, Input::Zero(), 0.03, kMass), DomainError);
    CHECK_THROWS_AS(step(s, Input::Zero(), -0.01, kMass), DomainError);
  }

  TEST_CASE("RK4 converges at fourth order") {
    const Input u(0.8, 0.3, -0.25, 0.4);
    QuadState start = QuadState::hover(Vec3::Zero(), kMass);
    start.x[QuadState::kPhiRate] = 0.2;
    auto integrate = [&](double dt) {
      QuadState s = start;
      const int n = static_cast<int>(std::llround(1.0 / dt));
      for (int k = 0; k < n; ++k) s = step(s, u, dt, kMass);
      return s;
    };
    const QuadState ref = integrate(1e-5);
    const double e1 = (integrate(0.02).x - ref.x).norm();
    const double e2 = (integrate(0.01).x - ref.x).norm();
    const double ratio = e1 / e2;
    CHECK(ratio > 13.0);
    CHECK(ratio < 19.0);
  }

  TEST_CASE("closed-loop step settles at the slowest pole rate") {
    const ControllerGains gains = design_gains({}, kMass);
    QuadState s = QuadState::hover(Vec3::Zero(), kMass);
    const FlatState target = FlatState::setpoint(Vec3(1, 0, 0));
    const double dt = 0.005;
    std::vector<double> t, err;
    for (int k = 0; k <= 4000; ++k) {
      t.push_back(k * dt);
      err.push_back(std::abs(s.position().x() - 1.0));
      s = step(s, tracking_control(s, target, gains), dt, kMass);
    }
    CHECK(err.back() < 1e-6);
    // Fit log error over the tail, where the slowest mode dominates.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (t[k] < 8.0 || t[k] > 14.0) continue;
      const double y = std::log(err[k]);
      sx += t[k];
      sy += y;
      sxx += t[k] * t[k];
      sxy += t[k] * y;
      ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-2.0).epsilon(0.1));
    CHECK(std::abs(s.position().y()) < 1e-9);
    CHECK(std::abs(s.position().z()) < 1e-9);
  }
}
