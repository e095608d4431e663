#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ehgo/errors.hpp"
#include "ehgo/observer.hpp"
#include "oracles.hpp"

using namespace ehgo;

TEST(Observer, BinomialGainsBlockStructure) {
  const double eps = 0.1;
  const ObserverGains g = build_gains(eps);
  // rho block, x component: (3/eps, 3/eps^2, 1/eps^3) on output 0.
  EXPECT_NEAR(g.H(slot::rho1, 0), 3 / eps, 1e-9);
  EXPECT_NEAR(g.H(slot::rho2, 0), 3 / (eps * eps), 1e-9);
  EXPECT_NEAR(g.H(slot::sigma_rho, 0), 1 / std::pow(eps, 3), 1e-9);
  // xc block: (4, 6, 4, 1) / eps^j on output 6.
  EXPECT_NEAR(g.H(slot::xc1, 6), 4 / eps, 1e-9);
  EXPECT_NEAR(g.H(slot::xc2, 6), 6 / (eps * eps), 1e-9);
  EXPECT_NEAR(g.H(slot::xc3, 6), 4 / std::pow(eps, 3), 1e-9);
  EXPECT_NEAR(g.H(slot::sigma_xc, 6), 1 / std::pow(eps, 4), 1e-9);
  // Blocks do not cross-couple and components stay on their own axis.
  EXPECT_EQ(g.H(slot::rho1, 1), 0.0);
  EXPECT_EQ(g.H(slot::xi1, 0), 0.0);
  EXPECT_EQ(g.H(slot::xc1, 3), 0.0);
  EXPECT_EQ((g.H.array() != 0.0).count(), 30);
}

TEST(Observer, RejectsNonHurwitzCoefficients) {
  try {
    build_gains({-1.0, 1.0, 1.0}, {3, 3, 1}, {4, 6, 4, 1}, 0.01);
    FAIL() << "expected NotHurwitz";
  } catch (const NotHurwitz& e) {
    EXPECT_EQ(e.block(), "rho");
    EXPECT_GE(e.root_real(), 0.0);
  }
  EXPECT_THROW(build_gains({3, 3, 1}, {3, 3, 1}, {1, 1, 1, 1}, 0.01), NotHurwitz);
}

TEST(Observer, PolynomialRootsOfBinomials) {
  Eigen::VectorXd c(4);
  c << 4, 6, 4, 1;
  const Eigen::VectorXcd r = polynomial_roots(c);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(r[i] + 1.0), 0.0, 1e-3);
  Eigen::VectorXd q(2);
  q << 0, -4;  // s^2 - 4
  const Eigen::VectorXcd r2 = polynomial_roots(q);
  EXPECT_NEAR(std::max(r2[0].real(), r2[1].real()), 2.0, 1e-12);
}

TEST(Observer, HalvingEpsilonDoublesFirstInjection) {
  VehicleParams p;
  const MixingMatrix mixer = build_mixer(p);
  ObserverState obs;
  obs.omega_hat = hover_rates(p, mixer);
  MeasurementFrame meas;
  meas.p1_meas = Vec3(0.3, -0.2, 0.1);
  ObserverInput in;
  in.omega_des = obs.omega_hat;
  const auto d1 = observer_derivative(obs, meas, in, build_gains(0.02), p, mixer);
  const auto d2 = observer_derivative(obs, meas, in, build_gains(0.01), p, mixer);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(d2.chi_hat_dot[slot::rho1 + i], 2 * d1.chi_hat_dot[slot::rho1 + i], 1e-9);
  }
}

TEST(Observer, ExactEstimateFollowsTrueDynamics) {
  VehicleParams p;
  const MixingMatrix mixer = build_mixer(p);
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 theta1 = oracle::random_vec(rng, -0.6, 0.6);
    const Vec3 theta2 = oracle::random_vec(rng, -1.0, 1.0);
    const Vec3 theta_r = oracle::random_vec(rng, -0.4, 0.4);
    const Vec3 thetar_dot = oracle::random_vec(rng, -0.5, 0.5);
    const Vec3 thetar_ddot = oracle::random_vec(rng, -0.5, 0.5);
    const Vec3 sigma_rho = oracle::random_vec(rng, -1.0, 1.0);
    const Vec3 sigma_xi = oracle::random_vec(rng, -1.0, 1.0);
    const Vec3 offset(0, 0, -1.5), offset_accel(0, 0, 0.2);

    ObserverState obs;
    obs.omega_hat = hover_rates(p, mixer).array() + 20.0 * (trial % 3);
    const Wrench w = mix_forward(obs.omega_hat, mixer, p.thrust_coefficient);

    ExtendedVector chi;
    const Vec3 rho1 = oracle::random_vec(rng, -1, 1), rho2 = oracle::random_vec(rng, -1, 1);
    const Vec3 xc1 = oracle::random_vec(rng, -3, 3), xc2 = oracle::random_vec(rng, -1, 1);
    const Vec3 xc3 = oracle::random_vec(rng, -1, 1), sxc = oracle::random_vec(rng, -1, 1);
    chi << rho1, rho2, sigma_rho, theta1 - theta_r, theta2 - thetar_dot, sigma_xi - thetar_ddot,
        xc1, xc2, xc3, sxc;
    obs.chi_hat = chi;

    MeasurementFrame meas;
    meas.theta1_meas = theta1;
    meas.xc1_meas = xc1;
    meas.p1_meas = rho1 + xc1 + offset;
    ObserverInput in;
    in.theta_r = theta_r;
    in.thetar_dot_bar = thetar_dot;
    in.omega_des = obs.omega_hat;
    in.pr_offset = offset;
    in.pr_offset_accel = offset_accel;

    const auto d = observer_derivative(obs, meas, in, build_gains(0.01), p, mixer);
    const Vec3 rho2_dot = -(w[0] / p.mass) * oracle::thrust_axis(theta1) +
                          oracle::g * Vec3::UnitZ() + sigma_rho - (xc3 + offset_accel);
    const Vec3 tau(w[1], w[2], w[3]);
    const Vec3 xi2_dot =
        oracle::euler_accel(theta1, theta2, tau, p.inertia) + sigma_xi - thetar_ddot;

    EXPECT_LT((d.chi_hat_dot.segment<3>(slot::rho1) - rho2).norm(), 1e-9);
    EXPECT_LT((d.chi_hat_dot.segment<3>(slot::rho2) - rho2_dot).norm(), 1e-9);
    EXPECT_LT(d.chi_hat_dot.segment<3>(slot::sigma_rho).norm(), 1e-9);
    EXPECT_LT((d.chi_hat_dot.segment<3>(slot::xi2) - xi2_dot).norm(), 1e-5);
    EXPECT_LT((d.chi_hat_dot.segment<3>(slot::xc3) - sxc).norm(), 1e-9);
    EXPECT_LT(d.omega_hat_dot.norm(), 1e-12);
  }
}

TEST(Observer, YawResidualIsWrapped) {
  VehicleParams p;
  const MixingMatrix mixer = build_mixer(p);
  ObserverState obs;
  obs.omega_hat = hover_rates(p, mixer);
  obs.chi_hat[slot::xi1 + 2] = M_PI - 0.01;
  MeasurementFrame meas;
  meas.theta1_meas = Vec3(0, 0, -M_PI + 0.01);
  ObserverInput in;
  in.omega_des = obs.omega_hat;
  const auto d = observer_derivative(obs, meas, in, build_gains(0.1), p, mixer);
  // The wrapped residual is +0.02, not -2 pi + 0.02.
  EXPECT_NEAR(d.chi_hat_dot[slot::xi1 + 2], 3 / 0.1 * 0.02, 1e-9);
}

TEST(Observer, ScaledErrorDividesByEpsilonPowers) {
  const ObserverGains g = build_gains(0.1);
  ExtendedVector chi = ExtendedVector::Ones(), hat = ExtendedVector::Zero();
  const ExtendedVector eta = scaled_error(chi, hat, g);
  EXPECT_NEAR(eta[slot::rho1], 100.0, 1e-9);
  EXPECT_NEAR(eta[slot::rho2], 10.0, 1e-12);
  EXPECT_NEAR(eta[slot::sigma_rho], 1.0, 1e-15);
  EXPECT_NEAR(eta[slot::xc1], 1000.0, 1e-9);
  EXPECT_NEAR(eta[slot::sigma_xc], 1.0, 1e-15);
}
