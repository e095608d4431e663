#include "ehgo/reference.hpp"

#include <cmath>

#include "ehgo/errors.hpp"

namespace ehgo {

Eigen::Matrix<double, 6, 1> ReferenceState::to_vector() const {
  Eigen::Matrix<double, 6, 1> v;
  v << xc1, xc2;
  return v;
}

ReferenceState ReferenceState::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  ReferenceState r;
  r.xc1 = v.segment<3>(0);
  r.xc2 = v.segment<3>(3);
  return r;
}

void TrajectoryProfile::validate() const {
  if (!(amplitude_x >= 0)) throw ValidationError("profile.amplitude_x", ">= 0");
  if (!(amplitude_y >= 0)) throw ValidationError("profile.amplitude_y", ">= 0");
  if (!(angular_rate >= 0)) throw ValidationError("profile.angular_rate", ">= 0");
  if (!(pull_gain > 0)) throw ValidationError("profile.pull_gain", "> 0");
  if (!center.allFinite()) throw ValidationError("profile.center", "finite");
  if (!(descent.duration > 0)) throw ValidationError("profile.descent_duration", "> 0");
  if (!(descent.start_time >= 0)) throw ValidationError("profile.descent_start", ">= 0");
}

std::array<Vec3, 6> figure8_curve(double t, const TrajectoryProfile& profile) {
  const double w = profile.angular_rate;
  const double ax = profile.amplitude_x, ay = profile.amplitude_y;
  const double s1 = std::sin(w * t), c1 = std::cos(w * t);
  const double s2 = std::sin(2 * w * t), c2 = std::cos(2 * w * t);
  const double w2 = 2 * w;
  std::array<Vec3, 6> d;
  d[0] = profile.center + Vec3(ax * s1, ay * s2, 0.0);
  d[1] = Vec3(ax * w * c1, ay * w2 * c2, 0.0);
  d[2] = Vec3(-ax * w * w * s1, -ay * w2 * w2 * s2, 0.0);
  d[3] = Vec3(-ax * std::pow(w, 3) * c1, -ay * std::pow(w2, 3) * c2, 0.0);
  d[4] = Vec3(ax * std::pow(w, 4) * s1, ay * std::pow(w2, 4) * s2, 0.0);
  d[5] = Vec3(ax * std::pow(w, 5) * c1, ay * std::pow(w2, 5) * c2, 0.0);
  return d;
}

namespace {

// Critically damped pull: kp = k, kd = 2 sqrt(k).
double damping_gain(const TrajectoryProfile& p) { return 2.0 * std::sqrt(p.pull_gain); }

}  // namespace

Vec3 reference_acceleration(double t, const ReferenceState& xc, const TrajectoryProfile& profile) {
  if (profile.kind != TrajectoryKind::figure8) return Vec3::Zero();
  const auto c = figure8_curve(t, profile);
  return c[2] - profile.pull_gain * (xc.xc1 - c[0]) - damping_gain(profile) * (xc.xc2 - c[1]);
}

std::array<Vec3, 3> reference_acceleration_derivatives(double t, const ReferenceState& xc,
                                                        const TrajectoryProfile& profile) {
  if (profile.kind != TrajectoryKind::figure8) return {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  const auto c = figure8_curve(t, profile);
  const double kp = profile.pull_gain, kd = damping_gain(profile);
  // a = c'' - kp e - kd e', e = x - c; differentiate along x' = v, v' = a.
  const Vec3 e0 = xc.xc1 - c[0];
  const Vec3 e1 = xc.xc2 - c[1];
  const Vec3 a = c[2] - kp * e0 - kd * e1;
  const Vec3 e2 = a - c[2];
  const Vec3 jerk = c[3] - kp * e1 - kd * e2;
  const Vec3 e3 = jerk - c[3];
  const Vec3 snap = c[4] - kp * e2 - kd * e3;
  return {a, jerk, snap};
}

ReferenceDerivative reference_derivative(double t, const ReferenceState& xc,
                                         const TrajectoryProfile& profile) {
  return {xc.xc2, reference_acceleration(t, xc, profile)};
}

std::array<double, 5> quintic_blend(double s) {
  if (s <= 0.0) return {0.0, 0.0, 0.0, 0.0, 0.0};
  if (s >= 1.0) return {1.0, 0.0, 0.0, 0.0, 0.0};
  const double s2 = s * s, s3 = s2 * s;
  return {
      10 * s3 - 15 * s3 * s + 6 * s3 * s2,
      30 * s2 - 60 * s3 + 30 * s2 * s2,
      60 * s - 180 * s2 + 120 * s3,
      60 - 360 * s + 360 * s2,
      -360 + 720 * s,
  };
}

DescentOffset::DescentOffset(const DescentProfile& descent, double initial_altitude,
                             double vehicle_altitude)
    : descent_(descent), start_offset_(initial_altitude - vehicle_altitude) {}

std::array<double, 5> DescentOffset::operator()(double t) const {
  const double T = descent_.duration;
  const auto s = quintic_blend((t - descent_.start_time) / T);
  const double span = descent_.final_clearance - start_offset_;
  std::array<double, 5> out{};
  out[0] = start_offset_ + span * s[0];
  double scale = span;
  for (int k = 1; k < 5; ++k) {
    scale /= T;
    out[static_cast<std::size_t>(k)] = scale * s[static_cast<std::size_t>(k)];
  }
  return out;
}

int DescentOffset::phase(double t) const {
  if (t < descent_.start_time) return 0;
  if (t < end_time()) return 1;
  return 2;
}

Vec3 landing_reference(double t, const Vec3& xc_est, const DescentOffset& offset) {
  return xc_est + offset(t)[0] * Vec3::UnitZ();
}

}  // namespace ehgo
