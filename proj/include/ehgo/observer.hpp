#pragma once

#include <array>

#include <Eigen/Dense>

#include "ehgo/actuators.hpp"
#include "ehgo/controller.hpp"
#include "ehgo/dynamics.hpp"

namespace ehgo {

inline constexpr int kObserverOutputs = 9;
using InjectionMatrix = Eigen::Matrix<double, kExtendedStates, kObserverOutputs>;

/// Injection gains of the three block observers. Block i of relative degree
/// r_i gets gain alpha_j / eps^j on its j-th state.
struct ObserverGains {
  std::array<double, 3> alpha_rho{3.0, 3.0, 1.0};
  std::array<double, 3> alpha_xi{3.0, 3.0, 1.0};
  std::array<double, 4> alpha_xc{4.0, 6.0, 4.0, 1.0};
  double epsilon = 0.01;
  InjectionMatrix H = InjectionMatrix::Zero();
};

/// Throws NotHurwitz naming the block ("rho", "xi", "xc") and the offending
/// root when s^r + a1 s^(r-1) + ... + ar has a root with Re >= 0.
ObserverGains build_gains(const std::array<double, 3>& alpha_rho,
                          const std::array<double, 3>& alpha_xi,
                          const std::array<double, 4>& alpha_xc, double epsilon);
ObserverGains build_gains(double epsilon);

/// Roots of the monic polynomial s^n + c[0] s^(n-1) + ... + c[n-1].
Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& coefficients);

struct ObserverState {
  ExtendedVector chi_hat = ExtendedVector::Zero();
  Eigen::VectorXd omega_hat;
};

struct MeasurementFrame {
  Vec3 p1_meas = Vec3::Zero();
  Vec3 theta1_meas = Vec3::Zero();
  Vec3 xc1_meas = Vec3::Zero();
  double t = 0.0;
};

/// Controller signals the observer needs: the emitted attitude reference
/// and its estimated rate, the rotor command, and the known vertical offset
/// of the translational reference from the vehicle (value and acceleration).
struct ObserverInput {
  Vec3 theta_r = Vec3::Zero();
  Vec3 thetar_dot_bar = Vec3::Zero();
  Eigen::VectorXd omega_des;
  Vec3 pr_offset = Vec3::Zero();
  Vec3 pr_offset_accel = Vec3::Zero();
};

/// Measured outputs [rho1; xi1; xc1] of the three blocks.
Eigen::Matrix<double, kObserverOutputs, 1> observer_outputs(const MeasurementFrame& meas,
                                                            const ObserverInput& input);

struct ObserverDerivative {
  ExtendedVector chi_hat_dot;
  Eigen::VectorXd omega_hat_dot;
};

ObserverDerivative observer_derivative(const ObserverState& obs, const MeasurementFrame& meas,
                                       const ObserverInput& input, const ObserverGains& gains,
                                       const VehicleParams& params, const MixingMatrix& mixer);

EstimateBundle extract_estimates(const ObserverState& obs);

/// eta_j = (chi_j - chi_hat_j) / eps^(r_i - j) per block.
ExtendedVector scaled_error(const ExtendedVector& chi, const ExtendedVector& chi_hat,
                            const ObserverGains& gains);

}  // namespace ehgo
