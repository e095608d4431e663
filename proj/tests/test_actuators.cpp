#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ehgo/actuators.hpp"
#include "ehgo/errors.hpp"

using namespace ehgo;

namespace {

// Feasible wrench: hover-ish thrust with torques small enough to keep every
// squared rate positive.
Wrench random_feasible(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> thrust(8.0, 20.0), torque(-0.05, 0.05);
  return {thrust(rng), torque(rng), torque(rng), 0.2 * torque(rng)};
}

}  // namespace

TEST(Mixer, ForwardAfterAllocateIsIdentity) {
  const double b = 1.5e-5;
  for (int n : {4, 6}) {
    const MixingMatrix mixer = build_mixer(n, 0.2, 0.016);
    std::mt19937_64 rng(static_cast<unsigned>(n));
    for (int i = 0; i < 100; ++i) {
      const Wrench w = random_feasible(rng);
      const Allocation a = allocate(w, mixer, b);
      ASSERT_FALSE(a.infeasible);
      const Wrench back = mix_forward(a.omega_des, mixer, b);
      EXPECT_LT((back - w).cwiseAbs().maxCoeff(), 1e-9) << "n = " << n;
    }
  }
}

TEST(Mixer, AllocationIsMinimumNorm) {
  const double b = 1.5e-5;
  const MixingMatrix mixer = build_mixer(6, 0.25, 0.02);
  const Eigen::MatrixXd& M = mixer.matrix();
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const Wrench w = random_feasible(rng);
    const Eigen::VectorXd oracle = M.transpose() * (M * M.transpose()).ldlt().solve(w) / b;
    const Eigen::VectorXd got = allocate(w, mixer, b).omega_des.array().square().matrix();
    EXPECT_LT((got - oracle).norm(), 1e-9 * oracle.norm());
  }
}

TEST(Mixer, QuadGeometry) {
  const MixingMatrix mixer = build_mixer(4, 0.2, 0.016);
  const Eigen::MatrixXd& M = mixer.matrix();
  ASSERT_EQ(M.rows(), 4);
  ASSERT_EQ(M.cols(), 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_DOUBLE_EQ(M(0, i), 1.0);
    // Arms at pi/4 + k pi/2 have equal lever arms on both axes.
    EXPECT_NEAR(std::abs(M(1, i)), 0.2 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(M(2, i)), 0.2 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(std::abs(M(3, i)), 0.016, 1e-15);
  }
  EXPECT_NEAR(M.row(3).sum(), 0.0, 1e-15);
}

TEST(Mixer, HoverRatesProduceWeight) {
  VehicleParams p;
  const MixingMatrix mixer = build_mixer(p);
  const Wrench w = mix_forward(hover_rates(p, mixer), mixer, p.thrust_coefficient);
  EXPECT_NEAR(w[0], p.mass * kGravity, 1e-9);
  EXPECT_LT(w.tail<3>().norm(), 1e-9);
}

TEST(Mixer, RejectsRankDeficientGeometry) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Ones(4, 4);
  EXPECT_THROW(MixingMatrix::from_matrix(M), RankDeficientMixer);
}

TEST(Mixer, NegativeThrustThrows) {
  const MixingMatrix mixer = build_mixer(4, 0.2, 0.016);
  EXPECT_THROW(allocate(Wrench(-1, 0, 0, 0), mixer, 1e-5), NegativeThrust);
}

TEST(Mixer, InfeasibleWrenchIsClampedAndFlagged) {
  const MixingMatrix mixer = build_mixer(4, 0.2, 0.016);
  const Allocation a = allocate(Wrench(1.0, 5.0, 0.0, 0.0), mixer, 1.5e-5);
  EXPECT_TRUE(a.infeasible);
  EXPECT_LT(a.worst_deficit, 0.0);
  EXPECT_GE(a.omega_des.minCoeff(), 0.0);
}

TEST(Actuators, FirstOrderLag) {
  Eigen::VectorXd w(2), wd(2);
  w << 100, 200;
  wd << 300, 200;
  const Eigen::VectorXd d = actuator_derivative(w, wd, 0.02);
  EXPECT_DOUBLE_EQ(d[0], 10000.0);
  EXPECT_DOUBLE_EQ(d[1], 0.0);
}
