#pragma once

#include <array>

#include <Eigen/Dense>

#include "ehgo/dynamics.hpp"

namespace ehgo {

struct ReferenceState {
  Vec3 xc1 = Vec3::Zero();  // position
  Vec3 xc2 = Vec3::Zero();  // velocity

  Eigen::Matrix<double, 6, 1> to_vector() const;
  static ReferenceState from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);
};

enum class TrajectoryKind { figure8, constant_velocity, stationary };

struct DescentProfile {
  double start_time = 15.0;     // s
  double duration = 10.0;       // s
  double final_clearance = 0.0; // m, added to the vehicle z at touchdown
};

struct TrajectoryProfile {
  TrajectoryKind kind = TrajectoryKind::figure8;
  double amplitude_x = 3.0;   // m
  double amplitude_y = 1.5;   // m
  double angular_rate = 0.3;  // rad/s
  Vec3 center = Vec3(5.0, 0.0, -0.5);
  double pull_gain = 4.0;     // proportional gain of the pull toward the curve
  DescentProfile descent;

  void validate() const;
};

/// Closed-form figure-8 (lemniscate of Gerono) and its time derivatives:
/// element k of the result is the k-th derivative, k = 0..5.
std::array<Vec3, 6> figure8_curve(double t, const TrajectoryProfile& profile);

/// Vehicle acceleration: the curve acceleration plus a PD pull toward the
/// curve for figure8, zero otherwise.
Vec3 reference_acceleration(double t, const ReferenceState& xc, const TrajectoryProfile& profile);

/// Time derivatives of the vehicle acceleration along its own motion:
/// [acceleration, jerk, snap].
std::array<Vec3, 3> reference_acceleration_derivatives(double t, const ReferenceState& xc,
                                                        const TrajectoryProfile& profile);

struct ReferenceDerivative {
  Vec3 xc1_dot;
  Vec3 xc2_dot;
};

ReferenceDerivative reference_derivative(double t, const ReferenceState& xc,
                                         const TrajectoryProfile& profile);

/// Quintic 10s^3 - 15s^4 + 6s^5 blend on [0, 1]; returns derivatives 0..4
/// with respect to s. Outside [0, 1] the value is clamped and derivatives
/// vanish.
std::array<double, 5> quintic_blend(double s);

/// Vertical offset of the landing target above (z-down: below) the vehicle.
/// Starts at initial_altitude - vehicle_altitude and ends at the final
/// clearance. Element k is the k-th time derivative, k = 0..4.
class DescentOffset {
 public:
  DescentOffset() = default;
  DescentOffset(const DescentProfile& descent, double initial_altitude, double vehicle_altitude);

  std::array<double, 5> operator()(double t) const;
  double end_time() const { return descent_.start_time + descent_.duration; }
  /// 0 before the descent, 1 during, 2 after.
  int phase(double t) const;

 private:
  DescentProfile descent_{};
  double start_offset_ = 0.0;
};

/// Landing target position: the estimated vehicle position with the vertical
/// component shifted by the descent offset.
Vec3 landing_reference(double t, const Vec3& xc_est, const DescentOffset& offset);

}  // namespace ehgo
