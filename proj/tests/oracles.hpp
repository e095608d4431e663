#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's kinematics; everything is rebuilt from elementary rotations.

#include <cmath>
#include <random>

#include <Eigen/Dense>

namespace oracle {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double g = 9.81;

inline Mat3 rot_x(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}
inline Mat3 rot_y(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}
inline Mat3 rot_z(double a) {
  return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

// Body to inertial, yaw-pitch-roll order.
inline Mat3 rotation(const Vec3& e) { return rot_z(e.z()) * rot_y(e.y()) * rot_x(e.x()); }

inline Vec3 thrust_axis(const Vec3& e) { return rotation(e).col(2); }

// Body rates from Euler rates: Omega = e_x phi' + Rx^T e_y theta' + (Ry Rx)^T e_z psi'.
inline Mat3 rates_to_body(const Vec3& e) {
  Mat3 W;
  W.col(0) = Vec3::UnitX();
  W.col(1) = rot_x(e.x()).transpose() * Vec3::UnitY();
  W.col(2) = (rot_y(e.y()) * rot_x(e.x())).transpose() * Vec3::UnitZ();
  return W;
}

// Euler accelerations of a rigid body with inertia J under body torque tau.
inline Vec3 euler_accel(const Vec3& e, const Vec3& e_dot, const Vec3& tau, const Mat3& J) {
  const Mat3 W = rates_to_body(e);
  const Vec3 omega = W * e_dot;
  const Vec3 omega_dot = J.inverse() * (tau - omega.cross(J * omega));
  // W(e(t)) e'(t) = Omega(t)  =>  W e'' = Omega' - W' e'
  // five-point stencil along the motion
  const double h = 1e-3;
  auto Wt = [&](double s) { return rates_to_body(e + s * e_dot); };
  const Mat3 W_dot = (Wt(-2 * h) - 8 * Wt(-h) + 8 * Wt(h) - Wt(2 * h)) / (12 * h);
  return W.inverse() * (omega_dot - W_dot * e_dot);
}

// Lyapunov matrix of [[0, I], [-b1 I, -b2 I]] read off the quadratic form
// V = (b1+1)|x1|^2/(2 b2) + (b1 |x2|^2 + |b2 x1 + x2|^2)/(2 b1 b2).
inline Eigen::Matrix2d second_order_lyapunov(double b1, double b2) {
  Eigen::Matrix2d P;
  P(0, 0) = (b1 + 1) / (2 * b2) + b2 / (2 * b1);
  P(0, 1) = P(1, 0) = 1 / (2 * b1);
  P(1, 1) = (b1 + 1) / (2 * b1 * b2);
  return P;
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace oracle
