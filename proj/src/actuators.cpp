#include "ehgo/actuators.hpp"

#include <cmath>
#include <string>

#include "ehgo/errors.hpp"

namespace ehgo {

MixingMatrix MixingMatrix::from_matrix(const Eigen::MatrixXd& M) {
  if (M.rows() != 4 || M.cols() < 4) {
    throw RankDeficientMixer("mixer must be 4 x n with n >= 4, got " + std::to_string(M.rows()) +
                             " x " + std::to_string(M.cols()));
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-10);
  if (lu.rank() < 4) {
    throw RankDeficientMixer("mixer rank " + std::to_string(lu.rank()) + " < 4");
  }
  MixingMatrix mm;
  mm.M_ = M;
  // Right inverse through the normal equations: M^T (M M^T)^-1.
  const Eigen::Matrix4d gram = M * M.transpose();
  mm.M_pinv_ = M.transpose() * gram.ldlt().solve(Eigen::Matrix4d::Identity());
  return mm;
}

MixingMatrix build_mixer(int n_rotors, double arm_length, double torque_ratio) {
  if (n_rotors < 4 || n_rotors % 2 != 0) {
    throw RankDeficientMixer("X configuration needs an even rotor count >= 4, got " +
                             std::to_string(n_rotors));
  }
  Eigen::MatrixXd M(4, n_rotors);
  for (int i = 0; i < n_rotors; ++i) {
    const double az = M_PI / n_rotors + 2.0 * M_PI * i / n_rotors;
    // Rotor at (l cos az, l sin az, 0) in the body frame pushing along -z_b:
    // r x (0, 0, -f) = (-y f, x f, 0).
    M(0, i) = 1.0;
    M(1, i) = -arm_length * std::sin(az);
    M(2, i) = arm_length * std::cos(az);
    M(3, i) = (i % 2 == 0) ? torque_ratio : -torque_ratio;
  }
  return MixingMatrix::from_matrix(M);
}

MixingMatrix build_mixer(const VehicleParams& params) {
  return build_mixer(params.n_rotors, params.arm_length, params.torque_ratio);
}

Wrench mix_forward(const Eigen::VectorXd& omega, const MixingMatrix& mixer, double b) {
  return b * mixer.matrix() * omega.cwiseAbs2();
}

Allocation allocate(const Wrench& wrench_des, const MixingMatrix& mixer, double b,
                    double clamp_report_tol) {
  if (wrench_des[0] < 0) {
    throw NegativeThrust("desired thrust " + std::to_string(wrench_des[0]) + " N is negative");
  }
  Eigen::VectorXd omega_sq = mixer.pseudo_inverse() * wrench_des / b;
  Allocation out;
  out.worst_deficit = std::min(0.0, omega_sq.minCoeff());
  out.infeasible = out.worst_deficit < -clamp_report_tol;
  out.omega_des = omega_sq.cwiseMax(0.0).cwiseSqrt();
  return out;
}

Eigen::VectorXd actuator_derivative(const Eigen::VectorXd& omega, const Eigen::VectorXd& omega_des,
                                    double tau_m) {
  return (omega_des - omega) / tau_m;
}

Eigen::VectorXd hover_rates(const VehicleParams& params, const MixingMatrix& mixer) {
  Wrench w(params.mass * kGravity, 0.0, 0.0, 0.0);
  return allocate(w, mixer, params.thrust_coefficient).omega_des;
}

}  // namespace ehgo
