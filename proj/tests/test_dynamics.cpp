#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ehgo/dynamics.hpp"
#include "ehgo/errors.hpp"
#include "ehgo/sim.hpp"
#include "oracles.hpp"

using namespace ehgo;

TEST(Dynamics, WrapAngle) {
  EXPECT_NEAR(wrap_angle(3 * M_PI / 2), -M_PI / 2, 1e-12);
  EXPECT_NEAR(wrap_angle(-3 * M_PI / 2), M_PI / 2, 1e-12);
  EXPECT_NEAR(wrap_angle(M_PI), M_PI, 1e-12);
  EXPECT_NEAR(wrap_angle(0.3), 0.3, 1e-15);
}

TEST(Dynamics, ThrustAxisMatchesRotationProduct) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Vec3 e = oracle::random_vec(rng, -1.2, 1.2);
    EXPECT_LT((r3(e) - oracle::thrust_axis(e)).norm(), 1e-14);
  }
}

TEST(Dynamics, ThrustAxisJacobianMatchesFiniteDifference) {
  std::mt19937_64 rng(12);
  const double h = 1e-6;
  for (int i = 0; i < 50; ++i) {
    const Vec3 e = oracle::random_vec(rng, -1.0, 1.0);
    Mat3 fd;
    for (int k = 0; k < 3; ++k) {
      const Vec3 d = h * Vec3::Unit(k);
      fd.col(k) = (oracle::thrust_axis(e + d) - oracle::thrust_axis(e - d)) / (2 * h);
    }
    EXPECT_LT((r3_jacobian(e) - fd).norm(), 1e-8);
  }
}

TEST(Dynamics, EulerRateMapInvertsBodyRateMap) {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 200; ++i) {
    const Vec3 e = oracle::random_vec(rng, -1.3, 1.3);
    EXPECT_LT((psi(e) * oracle::rates_to_body(e) - Mat3::Identity()).norm(), 1e-12);
    EXPECT_LT((psi(e) * psi_inverse(e) - Mat3::Identity()).norm(), 1e-12);
  }
}

TEST(Dynamics, PsiDotMatchesFiniteDifference) {
  const Vec3 e(0.2, -0.4, 0.7), rate(0.5, -1.0, 0.3);
  const double h = 1e-6;
  const Mat3 fd = (psi(e + h * rate) - psi(e - h * rate)) / (2 * h);
  EXPECT_LT((psi_dot(e, rate) - fd).norm(), 1e-8);
}

TEST(Dynamics, EulerAccelerationMatchesRigidBodyOracle) {
  VehicleParams p;
  p.inertia << 0.012, 0.001, 0.0, 0.001, 0.015, 0.0, 0.0, 0.0, 0.022;
  std::mt19937_64 rng(14);
  for (int i = 0; i < 100; ++i) {
    RigidBodyState s;
    s.theta1 = oracle::random_vec(rng, -1.0, 1.0);
    s.theta2 = oracle::random_vec(rng, -2.0, 2.0);
    const Vec3 tau = oracle::random_vec(rng, -0.1, 0.1);
    const auto d = rigid_body_derivative(s, 12.0, tau, Vec3::Zero(), Vec3::Zero(), p);
    const Vec3 expected = oracle::euler_accel(s.theta1, s.theta2, tau, p.inertia);
    EXPECT_LT((d.theta2_dot - expected).norm(), 1e-6 * (1 + expected.norm()));
  }
}

TEST(Dynamics, HoverIsAnEquilibrium) {
  VehicleParams p;
  RigidBodyState s;
  const auto d = rigid_body_derivative(s, p.mass * kGravity, Vec3::Zero(), Vec3::Zero(),
                                       Vec3::Zero(), p);
  EXPECT_LT(d.to_vector().norm(), 1e-14);
}

TEST(Dynamics, FreeFallAcceleratesDownward) {
  VehicleParams p;
  RigidBodyState s;
  const auto d = rigid_body_derivative(s, 0.0, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
  EXPECT_NEAR(d.p2_dot.z(), kGravity, 1e-15);
  EXPECT_NEAR(d.p2_dot.head<2>().norm(), 0.0, 1e-15);
}

TEST(Dynamics, DisturbanceIsAdditive) {
  VehicleParams p;
  RigidBodyState s;
  const Disturbance dist = Disturbance::paper_sinusoids();
  const auto d = rigid_body_derivative(s, p.mass * kGravity, Vec3::Zero(), dist, 0.0, p);
  EXPECT_LT((d.p2_dot - Vec3(1, 0, 1)).norm(), 1e-12);
  EXPECT_LT((d.theta2_dot - Vec3(0, 1, 0)).norm(), 1e-12);
}

TEST(Dynamics, RejectsNegativeThrustAndSingularAttitude) {
  VehicleParams p;
  RigidBodyState s;
  EXPECT_THROW(rigid_body_derivative(s, -1.0, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p),
               NegativeThrust);
  s.theta1 = Vec3(0.0, M_PI / 2, 0.0);
  EXPECT_THROW(s.check_orientation(), SingularOrientation);
  EXPECT_THROW(psi(s.theta1), SingularOrientation);
}

TEST(Dynamics, StateVectorRoundTrip) {
  RigidBodyState s;
  s.p1 = Vec3(1, 2, 3);
  s.p2 = Vec3(4, 5, 6);
  s.theta1 = Vec3(0.1, 0.2, 0.3);
  s.theta2 = Vec3(-1, -2, -3);
  const RigidBodyState back = RigidBodyState::from_vector(s.to_vector());
  EXPECT_EQ(back.to_vector(), s.to_vector());
}

TEST(Dynamics, AttitudeErrorWrapsYawOnly) {
  const Vec3 e = attitude_error(Vec3(0.1, 0.2, 3.0), Vec3(0.0, 0.0, -3.0));
  EXPECT_NEAR(e.x(), 0.1, 1e-15);
  EXPECT_NEAR(e.y(), 0.2, 1e-15);
  EXPECT_NEAR(e.z(), 6.0 - 2 * M_PI, 1e-12);
}

TEST(Integrator, Rk4SingleStepOfExponential) {
  auto f = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd(x); };
  Eigen::VectorXd x(1);
  x << 1.0;
  const Eigen::VectorXd y = rk4_step(f, x, 0.0, 0.1);
  // 1 + h + h^2/2 + h^3/6 + h^4/24 at h = 0.1
  EXPECT_NEAR(y[0], 1.10517083333333, 1e-13);
}

TEST(Integrator, Rk4IsFourthOrderOnHarmonicOscillator) {
  auto f = [](double, const Eigen::Vector2d& x) { return Eigen::Vector2d(x[1], -x[0]); };
  auto global_error = [&](double h) {
    Eigen::Vector2d x(1.0, 0.0);
    const int n = static_cast<int>(std::lround(2.0 / h));
    for (int k = 0; k < n; ++k) x = rk4_step(f, x, k * h, h);
    return (x - Eigen::Vector2d(std::cos(2.0), -std::sin(2.0))).norm();
  };
  const double ratio = global_error(0.1) / global_error(0.05);
  EXPECT_GT(ratio, 12.0);
  EXPECT_LT(ratio, 20.0);
}
