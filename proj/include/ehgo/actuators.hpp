#pragma once

#include <Eigen/Dense>

#include "ehgo/dynamics.hpp"

namespace ehgo {

using Wrench = Eigen::Vector4d;  // [u_f, tau_x, tau_y, tau_z]

/// Geometry map from squared rotor rates to [thrust; torques] (up to the
/// thrust coefficient) and its cached minimum-norm right inverse.
class MixingMatrix {
 public:
  const Eigen::MatrixXd& matrix() const { return M_; }
  const Eigen::MatrixXd& pseudo_inverse() const { return M_pinv_; }
  int n_rotors() const { return static_cast<int>(M_.cols()); }

  /// Wraps an arbitrary 4 x n geometry. Throws RankDeficientMixer when
  /// rank(M) < 4.
  static MixingMatrix from_matrix(const Eigen::MatrixXd& M);

 private:
  Eigen::MatrixXd M_;
  Eigen::MatrixXd M_pinv_;
};

/// X configuration: arms evenly spaced in azimuth starting at pi/n, rotors
/// spinning in alternating directions.
MixingMatrix build_mixer(int n_rotors, double arm_length, double torque_ratio);
MixingMatrix build_mixer(const VehicleParams& params);

Wrench mix_forward(const Eigen::VectorXd& omega, const MixingMatrix& mixer, double b);

struct Allocation {
  Eigen::VectorXd omega_des;
  /// Most negative squared rate requested before clamping (0 if none).
  double worst_deficit = 0.0;
  /// Set when a clamped entry exceeded the report tolerance.
  bool infeasible = false;
};

inline constexpr double kClampReportTol = 1e-9;

/// Minimum-norm allocation of a desired wrench to rotor rates. Negative
/// squared rates are clamped to zero; the result flags an infeasible wrench
/// instead of throwing so a simulation can continue.
Allocation allocate(const Wrench& wrench_des, const MixingMatrix& mixer, double b,
                    double clamp_report_tol = kClampReportTol);

Eigen::VectorXd actuator_derivative(const Eigen::VectorXd& omega, const Eigen::VectorXd& omega_des,
                                    double tau_m);

/// Rotor rates that realize thrust m*g with zero torque.
Eigen::VectorXd hover_rates(const VehicleParams& params, const MixingMatrix& mixer);

}  // namespace ehgo
