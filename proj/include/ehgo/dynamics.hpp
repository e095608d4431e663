#pragma once

#include <Eigen/Dense>

#include "ehgo/signal.hpp"

namespace ehgo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kGravity = 9.81;
inline constexpr double kDefaultSingularityTol = 1e-6;

/// Physical description of the multirotor. Validate with validate().
struct VehicleParams {
  double mass = 1.2;                                          // kg
  Mat3 inertia = Vec3(0.012, 0.012, 0.022).asDiagonal();      // kg m^2
  double thrust_coefficient = 1.5e-5;                         // N s^2
  double tau_m = 0.02;                                        // s
  int n_rotors = 4;
  double arm_length = 0.2;                                    // m
  double torque_ratio = 0.016;                                // m

  /// Throws ValidationError naming the first violated constraint.
  void validate() const;
};

/// Position/velocity in the inertial frame (z down) and Euler angles/rates.
struct RigidBodyState {
  Vec3 p1 = Vec3::Zero();
  Vec3 p2 = Vec3::Zero();
  Vec3 theta1 = Vec3::Zero();  // [phi theta psi]
  Vec3 theta2 = Vec3::Zero();

  /// Checks |phi|, |theta| < pi/2 - tol; throws SingularOrientation otherwise.
  void check_orientation(double tol = kDefaultSingularityTol) const;

  Eigen::Matrix<double, 12, 1> to_vector() const;
  static RigidBodyState from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);
};

struct ErrorState {
  Vec3 rho1 = Vec3::Zero();
  Vec3 rho2 = Vec3::Zero();
  Vec3 xi1 = Vec3::Zero();
  Vec3 xi2 = Vec3::Zero();
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Euler-rate map Psi with theta2 = Psi * Omega.
Mat3 psi(const Vec3& theta1, double tol = kDefaultSingularityTol);
/// Closed-form inverse of psi().
Mat3 psi_inverse(const Vec3& theta1, double tol = kDefaultSingularityTol);
/// d/dt Psi(theta1(t)) given the Euler rates.
Mat3 psi_dot(const Vec3& theta1, const Vec3& theta1_dot, double tol = kDefaultSingularityTol);

/// Third column of the body-to-inertial rotation (thrust direction).
Vec3 r3(const Vec3& theta1);
/// Jacobian of r3 with respect to the Euler angles.
Mat3 r3_jacobian(const Vec3& theta1);

/// Drift of the Euler-rate dynamics evaluated at theta1_dot = xi2 + thetar_dot.
Vec3 rotational_drift(const ErrorState& xi, const Vec3& theta1, const Vec3& thetar_dot,
                      const VehicleParams& params);
/// Same as rotational_drift() but taking the Euler rates directly.
Vec3 euler_rate_drift(const Vec3& theta1, const Vec3& theta1_dot, const VehicleParams& params);

/// Input matrix G(theta1) = Psi J^-1 of the Euler-rate dynamics.
Mat3 rotational_input_matrix(const Vec3& theta1, const VehicleParams& params);

struct RigidBodyDerivative {
  Vec3 p1_dot;
  Vec3 p2_dot;
  Vec3 theta1_dot;
  Vec3 theta2_dot;

  Eigen::Matrix<double, 12, 1> to_vector() const;
};

RigidBodyDerivative rigid_body_derivative(const RigidBodyState& state, double u_f, const Vec3& tau,
                                          const Disturbance& dist, double t,
                                          const VehicleParams& params);

/// Variant with the disturbance already evaluated.
RigidBodyDerivative rigid_body_derivative(const RigidBodyState& state, double u_f, const Vec3& tau,
                                          const Vec3& sigma_rho, const Vec3& sigma_xi,
                                          const VehicleParams& params);

ErrorState error_coordinates(const RigidBodyState& state, const Vec3& p_r, const Vec3& pr_dot,
                             const Vec3& theta_r, const Vec3& thetar_dot);

/// theta1 - theta_r with the yaw component wrapped to (-pi, pi].
Vec3 attitude_error(const Vec3& theta1, const Vec3& theta_r);

}  // namespace ehgo
