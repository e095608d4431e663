#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "ehgo/reference.hpp"
#include "ehgo/signal.hpp"

using namespace ehgo;

TEST(Signal, ParseAndEvaluate) {
  const Signal s = Signal::parse("0.5*sin(2*t + 1) - t^2 + 3");
  const double t = 0.7;
  EXPECT_NEAR(s(t), 0.5 * std::sin(2 * t + 1) - t * t + 3, 1e-14);
}

TEST(Signal, DerivativeMatchesFiniteDifference) {
  const Signal s = Signal::parse("cos(t)*sin(3*t) + t^3");
  const Signal ds = s.derivative();
  const Signal dds = ds.derivative();
  const double t = 1.3, h = 1e-5;
  EXPECT_NEAR(ds(t), (s(t + h) - s(t - h)) / (2 * h), 1e-8);
  EXPECT_NEAR(dds(t), (s(t + h) - 2 * s(t) + s(t - h)) / (h * h), 1e-4);
}

TEST(Signal, ConstantHasZeroDerivative) {
  EXPECT_TRUE(Signal::parse("4.5").derivative().is_zero());
}

TEST(Signal, ParseErrorReportsPosition) {
  try {
    Signal::parse("sin(t");
    FAIL() << "expected a parse error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("column 6"), std::string::npos) << e.what();
  }
}

TEST(Signal, PaperSinusoidsAtZero) {
  const Disturbance d = Disturbance::paper_sinusoids();
  EXPECT_LT((d.sigma_rho(0.0) - Vec3(1, 0, 1)).norm(), 1e-15);
  EXPECT_LT((d.sigma_xi(0.0) - Vec3(0, 1, 0)).norm(), 1e-15);
  EXPECT_LT((d.sigma_rho.derivative()(0.0) - Vec3(0, 1, 0)).norm(), 1e-15);
}

TEST(Reference, QuinticBlend) {
  const auto q0 = quintic_blend(0.0);
  const auto qh = quintic_blend(0.5);
  const auto q1 = quintic_blend(1.0);
  EXPECT_DOUBLE_EQ(q0[0], 0.0);
  EXPECT_DOUBLE_EQ(q1[0], 1.0);
  EXPECT_NEAR(qh[0], 0.5, 1e-15);
  EXPECT_NEAR(qh[1], 1.875, 1e-14);  // 30 s^2 - 60 s^3 + 30 s^4
  EXPECT_NEAR(q0[1], 0.0, 1e-15);
  EXPECT_NEAR(q1[1], 0.0, 1e-15);
  EXPECT_NEAR(q1[2], 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(quintic_blend(1.5)[0], 1.0);
  EXPECT_DOUBLE_EQ(quintic_blend(1.5)[1], 0.0);
}

TEST(Reference, Figure8DerivativesMatchFiniteDifferences) {
  TrajectoryProfile p;
  const double t = 2.1, h = 1e-4;
  const auto c = figure8_curve(t, p);
  const auto cp = figure8_curve(t + h, p);
  const auto cm = figure8_curve(t - h, p);
  for (int k = 0; k < 5; ++k) {
    const Vec3 fd = (cp[static_cast<std::size_t>(k)] - cm[static_cast<std::size_t>(k)]) / (2 * h);
    EXPECT_LT((c[static_cast<std::size_t>(k + 1)] - fd).norm(), 1e-6) << "order " << k + 1;
  }
}

TEST(Reference, Figure8StartsAtCenterOffset) {
  TrajectoryProfile p;
  const auto c = figure8_curve(0.0, p);
  EXPECT_TRUE(c[0].allFinite());
  EXPECT_NEAR(c[0].z(), p.center.z(), 1e-15);
}

TEST(Reference, VehicleOnCurveHasCurveAcceleration) {
  TrajectoryProfile p;
  const double t = 3.0;
  const auto c = figure8_curve(t, p);
  ReferenceState xc;
  xc.xc1 = c[0];
  xc.xc2 = c[1];
  EXPECT_LT((reference_acceleration(t, xc, p) - c[2]).norm(), 1e-12);
}

TEST(Reference, ConstantVelocityHasNoAcceleration) {
  TrajectoryProfile p;
  p.kind = TrajectoryKind::constant_velocity;
  ReferenceState xc;
  xc.xc2 = Vec3(1, 2, 0);
  const auto d = reference_derivative(0.0, xc, p);
  EXPECT_EQ(d.xc1_dot, Vec3(1, 2, 0));
  EXPECT_EQ(d.xc2_dot, Vec3::Zero());
}

TEST(Reference, AccelerationDerivativesMatchFiniteDifferences) {
  TrajectoryProfile p;
  ReferenceState xc;
  xc.xc1 = Vec3(5.3, 0.2, -0.5);
  xc.xc2 = Vec3(0.4, -0.1, 0.0);
  const double t = 1.0, h = 1e-5;
  const auto d = reference_acceleration_derivatives(t, xc, p);
  auto advance = [&](double dt) {
    const auto rd = reference_derivative(t, xc, p);
    ReferenceState s = xc;
    s.xc1 += dt * rd.xc1_dot;
    s.xc2 += dt * rd.xc2_dot;
    return reference_acceleration(t + dt, s, p);
  };
  const Vec3 jerk_fd = (advance(h) - advance(-h)) / (2 * h);
  EXPECT_LT((d[0] - reference_acceleration(t, xc, p)).norm(), 1e-12);
  EXPECT_LT((d[1] - jerk_fd).norm(), 1e-5);
}

TEST(Reference, DescentOffsetEndpoints) {
  DescentProfile d;
  d.start_time = 2.0;
  d.duration = 4.0;
  d.final_clearance = -0.1;
  const DescentOffset off(d, -4.0, -0.5);
  EXPECT_NEAR(off(0.0)[0], -3.5, 1e-15);
  EXPECT_NEAR(off(2.0)[0], -3.5, 1e-15);
  EXPECT_NEAR(off(4.0)[0], -3.5 + 0.5 * 3.4, 1e-12);
  EXPECT_NEAR(off(6.0)[0], -0.1, 1e-15);
  EXPECT_NEAR(off(9.0)[0], -0.1, 1e-15);
  EXPECT_EQ(off.phase(1.0), 0);
  EXPECT_EQ(off.phase(3.0), 1);
  EXPECT_EQ(off.phase(7.0), 2);
  // velocity at the midpoint: 1.875 * total change / duration
  EXPECT_NEAR(off(4.0)[1], 1.875 * 3.4 / 4.0, 1e-12);
}

TEST(Reference, LandingTargetShiftsOnlyVertically) {
  DescentProfile d;
  const DescentOffset off(d, -4.0, -0.5);
  const Vec3 pr = landing_reference(0.0, Vec3(1, 2, -0.5), off);
  EXPECT_EQ(pr, Vec3(1, 2, -4.0));
}
