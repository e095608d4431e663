#include "ehgo/dynamics.hpp"

#include <cmath>
#include <string>

#include "ehgo/errors.hpp"

namespace ehgo {

namespace {

void check_angles(const Vec3& theta1, double tol) {
  const double limit = M_PI / 2.0 - tol;
  if (!(std::abs(theta1.x()) < limit) || !(std::abs(theta1.y()) < limit)) {
    throw SingularOrientation("Euler angles (" + std::to_string(theta1.x()) + ", " +
                              std::to_string(theta1.y()) +
                              ") too close to the pitch/roll singularity");
  }
}

}  // namespace

void VehicleParams::validate() const {
  if (!(mass > 0)) throw ValidationError("vehicle.mass", "> 0");
  if (!(thrust_coefficient > 0)) throw ValidationError("vehicle.thrust_coefficient", "> 0");
  if (!(tau_m > 0)) throw ValidationError("vehicle.tau_m", "> 0");
  if (!(arm_length > 0)) throw ValidationError("vehicle.arm_length", "> 0");
  if (!(torque_ratio > 0)) throw ValidationError("vehicle.torque_ratio", "> 0");
  if (n_rotors != 4 && n_rotors != 6 && n_rotors != 8) {
    throw ValidationError("vehicle.n_rotors", "one of {4, 6, 8}");
  }
  if (!inertia.allFinite() || (inertia - inertia.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw ValidationError("vehicle.inertia", "symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> es(inertia);
  if (!(es.eigenvalues().minCoeff() > 0)) {
    throw ValidationError("vehicle.inertia", "positive definite");
  }
}

void RigidBodyState::check_orientation(double tol) const { check_angles(theta1, tol); }

Eigen::Matrix<double, 12, 1> RigidBodyState::to_vector() const {
  Eigen::Matrix<double, 12, 1> v;
  v << p1, p2, theta1, theta2;
  return v;
}

RigidBodyState RigidBodyState::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  RigidBodyState s;
  s.p1 = v.segment<3>(0);
  s.p2 = v.segment<3>(3);
  s.theta1 = v.segment<3>(6);
  s.theta2 = v.segment<3>(9);
  return s;
}

Eigen::Matrix<double, 12, 1> RigidBodyDerivative::to_vector() const {
  Eigen::Matrix<double, 12, 1> v;
  v << p1_dot, p2_dot, theta1_dot, theta2_dot;
  return v;
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
  if (w <= -M_PI) w += 2.0 * M_PI;
  return w;
}

Mat3 psi(const Vec3& theta1, double tol) {
  check_angles(theta1, tol);
  const double sf = std::sin(theta1.x()), cf = std::cos(theta1.x());
  const double ct = std::cos(theta1.y()), tt = std::tan(theta1.y());
  Mat3 m;
  m << 1.0, sf * tt, cf * tt,
       0.0, cf, -sf,
       0.0, sf / ct, cf / ct;
  return m;
}

Mat3 psi_inverse(const Vec3& theta1, double tol) {
  check_angles(theta1, tol);
  const double sf = std::sin(theta1.x()), cf = std::cos(theta1.x());
  const double st = std::sin(theta1.y()), ct = std::cos(theta1.y());
  Mat3 m;
  m << 1.0, 0.0, -st,
       0.0, cf, sf * ct,
       0.0, -sf, cf * ct;
  return m;
}

Mat3 psi_dot(const Vec3& theta1, const Vec3& theta1_dot, double tol) {
  check_angles(theta1, tol);
  const double sf = std::sin(theta1.x()), cf = std::cos(theta1.x());
  const double st = std::sin(theta1.y()), ct = std::cos(theta1.y());
  const double tt = st / ct, sec2 = 1.0 / (ct * ct);
  const double fd = theta1_dot.x(), td = theta1_dot.y();
  Mat3 m;
  m << 0.0, fd * cf * tt + td * sf * sec2, -fd * sf * tt + td * cf * sec2,
       0.0, -fd * sf, -fd * cf,
       0.0, fd * cf / ct + td * sf * st * sec2, -fd * sf / ct + td * cf * st * sec2;
  return m;
}

Vec3 r3(const Vec3& theta1) {
  const double sf = std::sin(theta1.x()), cf = std::cos(theta1.x());
  const double st = std::sin(theta1.y()), ct = std::cos(theta1.y());
  const double ss = std::sin(theta1.z()), cs = std::cos(theta1.z());
  return {cf * st * cs + sf * ss, cf * st * ss - sf * cs, cf * ct};
}

Mat3 r3_jacobian(const Vec3& theta1) {
  const double sf = std::sin(theta1.x()), cf = std::cos(theta1.x());
  const double st = std::sin(theta1.y()), ct = std::cos(theta1.y());
  const double ss = std::sin(theta1.z()), cs = std::cos(theta1.z());
  Mat3 j;
  j << -sf * st * cs + cf * ss, cf * ct * cs, -cf * st * ss + sf * cs,
       -sf * st * ss - cf * cs, cf * ct * ss, cf * st * cs + sf * ss,
       -sf * ct, -cf * st, 0.0;
  return j;
}

Vec3 euler_rate_drift(const Vec3& theta1, const Vec3& theta1_dot, const VehicleParams& params) {
  const Mat3 P = psi(theta1);
  const Vec3 omega = psi_inverse(theta1) * theta1_dot;
  const Mat3& J = params.inertia;
  const Vec3 gyro = omega.cross(J * omega);
  return psi_dot(theta1, theta1_dot) * omega - P * J.ldlt().solve(gyro);
}

Vec3 rotational_drift(const ErrorState& xi, const Vec3& theta1, const Vec3& thetar_dot,
                      const VehicleParams& params) {
  return euler_rate_drift(theta1, xi.xi2 + thetar_dot, params);
}

Mat3 rotational_input_matrix(const Vec3& theta1, const VehicleParams& params) {
  return psi(theta1) * params.inertia.inverse();
}

RigidBodyDerivative rigid_body_derivative(const RigidBodyState& state, double u_f, const Vec3& tau,
                                          const Vec3& sigma_rho, const Vec3& sigma_xi,
                                          const VehicleParams& params) {
  if (u_f < 0) throw NegativeThrust("thrust " + std::to_string(u_f) + " N is negative");
  state.check_orientation();
  RigidBodyDerivative d;
  d.p1_dot = state.p2;
  d.p2_dot = -(u_f / params.mass) * r3(state.theta1) + kGravity * Vec3::UnitZ() + sigma_rho;
  d.theta1_dot = state.theta2;
  d.theta2_dot = euler_rate_drift(state.theta1, state.theta2, params) +
                 psi(state.theta1) * params.inertia.ldlt().solve(tau) + sigma_xi;
  return d;
}

RigidBodyDerivative rigid_body_derivative(const RigidBodyState& state, double u_f, const Vec3& tau,
                                          const Disturbance& dist, double t,
                                          const VehicleParams& params) {
  return rigid_body_derivative(state, u_f, tau, dist.sigma_rho(t), dist.sigma_xi(t), params);
}

Vec3 attitude_error(const Vec3& theta1, const Vec3& theta_r) {
  Vec3 e = theta1 - theta_r;
  e.z() = wrap_angle(e.z());
  return e;
}

ErrorState error_coordinates(const RigidBodyState& state, const Vec3& p_r, const Vec3& pr_dot,
                             const Vec3& theta_r, const Vec3& thetar_dot) {
  ErrorState e;
  e.rho1 = state.p1 - p_r;
  e.rho2 = state.p2 - pr_dot;
  e.xi1 = attitude_error(state.theta1, theta_r);
  e.xi2 = state.theta2 - thetar_dot;
  return e;
}

}  // namespace ehgo
