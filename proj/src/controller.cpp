#include "ehgo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehgo/errors.hpp"

namespace ehgo {

namespace {

// Value with first and second time derivatives.
struct Jet {
  double v = 0.0, d = 0.0, dd = 0.0;
};

Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
Jet operator*(const Jet& a, const Jet& b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2 * a.d * b.d + a.v * b.dd};
}
Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }

Jet jsqrt(const Jet& a) {
  const double s = std::sqrt(a.v);
  return {s, a.d / (2 * s), a.dd / (2 * s) - a.d * a.d / (4 * s * s * s)};
}

Jet jatan2(const Jet& y, const Jet& x) {
  const double D = x.v * x.v + y.v * y.v;
  const double N = x.v * y.d - y.v * x.d;
  const double Nd = x.v * y.dd - y.v * x.dd;
  const double Dd = 2 * (x.v * x.d + y.v * y.d);
  return {std::atan2(y.v, x.v), N / D, (Nd * D - N * Dd) / (D * D)};
}

void check_forcing(const Vec3& f_t) {
  const double fz = f_t.z() - kGravity;
  if (std::abs(fz) < 1e-9 && std::abs(f_t.x()) < 1e-9) {
    throw DegenerateForcing("forcing leaves the thrust direction undefined");
  }
}

}  // namespace

void ControlGains::validate() const {
  if (!(beta1 > 0)) throw ValidationError("gains.beta1", "> 0");
  if (!(beta2 > 0)) throw ValidationError("gains.beta2", "> 0");
  if (!(gamma1 > 0)) throw ValidationError("gains.gamma1", "> 0");
  if (!(gamma2 > 0)) throw ValidationError("gains.gamma2", "> 0");
}

void SaturationBounds::validate() const {
  if (!(k_chi.array() > 0).all() || !k_chi.allFinite()) {
    throw ValidationError("saturation bounds", "all entries finite and > 0");
  }
}

ExtendedVector EstimateBundle::pack() const {
  ExtendedVector v;
  v << rho1_hat, rho2_hat, sigma_rho_hat, xi1_hat, xi2_hat, varsigma_xi_hat, xc1_hat, xc2_hat,
      xc3_hat, sigma_xc_hat;
  return v;
}

EstimateBundle EstimateBundle::unpack(const ExtendedVector& v) {
  EstimateBundle b;
  b.rho1_hat = v.segment<3>(slot::rho1);
  b.rho2_hat = v.segment<3>(slot::rho2);
  b.sigma_rho_hat = v.segment<3>(slot::sigma_rho);
  b.xi1_hat = v.segment<3>(slot::xi1);
  b.xi2_hat = v.segment<3>(slot::xi2);
  b.varsigma_xi_hat = v.segment<3>(slot::varsigma_xi);
  b.xc1_hat = v.segment<3>(slot::xc1);
  b.xc2_hat = v.segment<3>(slot::xc2);
  b.xc3_hat = v.segment<3>(slot::xc3);
  b.sigma_xc_hat = v.segment<3>(slot::sigma_xc);
  return b;
}

double sat(double y) {
  if (std::abs(y) <= 1.0) return y;
  return y > 0 ? 1.0 : -1.0;
}

ExtendedVector saturate(const ExtendedVector& raw, const SaturationBounds& bounds) {
  ExtendedVector out;
  for (int i = 0; i < kExtendedStates; ++i) {
    // k * sat(raw / k), without the rounding that k * (raw / k) brings in range
    const double k = bounds.k_chi[i];
    out[i] = std::abs(raw[i]) <= k ? raw[i] : std::copysign(k, raw[i]);
  }
  return out;
}

EstimateBundle saturate_estimates(const EstimateBundle& raw, const SaturationBounds& bounds) {
  return EstimateBundle::unpack(saturate(raw.pack(), bounds));
}

Vec3 forcing(const EstimateBundle& est, const ControlGains& gains) {
  return -gains.gamma1 * est.rho1_hat - gains.gamma2 * est.rho2_hat - est.sigma_rho_hat +
         est.xc3_hat;
}

Vec3 state_feedback_forcing(const Vec3& rho1, const Vec3& rho2, const Vec3& sigma_rho,
                            const Vec3& pr_ddot, const ControlGains& gains) {
  return -gains.gamma1 * rho1 - gains.gamma2 * rho2 - sigma_rho + pr_ddot;
}

AttitudeThrust translational_control(const Vec3& f_t, double mass) {
  check_forcing(f_t);
  AttitudeThrust out;
  const double vertical = kGravity - f_t.z();  // g - f_z, positive in the normal branch
  if (vertical <= 0.0) {
    out.thrust_reversal = true;
    return out;
  }
  const double D = std::hypot(f_t.x(), vertical);
  out.theta_r = Vec3(std::atan2(f_t.y(), D), std::atan2(-f_t.x(), vertical), 0.0);
  // -m (f_z - g) / (c_phi c_theta) with c_phi c_theta = (g - f_z) / |f_t - g e_z|.
  out.u_fd = mass * std::hypot(D, f_t.y());
  return out;
}

Vec3 reference_rates(const Vec3& f_t, const Vec3& f_t_dot) {
  const double fx = f_t.x(), fy = f_t.y(), fz = f_t.z() - kGravity;
  const double D2 = fx * fx + fz * fz;
  if (!(D2 > 1e-18)) throw DegenerateForcing("reference rates undefined at vertical forcing g");
  const double D = std::sqrt(D2);
  const double dfx = f_t_dot.x(), dfy = f_t_dot.y(), dfz = f_t_dot.z();
  const double phi_dot = (dfy * D2 - fy * (dfx * fx + dfz * fz)) / (D * (D2 + fy * fy));
  const double theta_dot = (dfx * fz - fx * dfz) / D2;
  return {phi_dot, theta_dot, 0.0};
}

Vec3 reference_angular_accel(const Vec3& f_t, const Vec3& f_t_dot, const Vec3& f_t_ddot) {
  const Jet fx{f_t.x(), f_t_dot.x(), f_t_ddot.x()};
  const Jet fy{f_t.y(), f_t_dot.y(), f_t_ddot.y()};
  const Jet vert{kGravity - f_t.z(), -f_t_dot.z(), -f_t_ddot.z()};
  if (!(fx.v * fx.v + vert.v * vert.v > 1e-18)) {
    throw DegenerateForcing("reference accelerations undefined at vertical forcing g");
  }
  const Jet D = jsqrt(fx * fx + vert * vert);
  const Jet phi = jatan2(fy, D);
  const Jet theta = jatan2(Jet{} - fx, vert);
  return {phi.dd, theta.dd, 0.0};
}

Vec3 f_t_dot_estimate(const EstimateBundle& est, double u_f, const Vec3& theta_r,
                      const ControlGains& gains, const VehicleParams& params,
                      bool include_reference_jerk) {
  const Vec3 accel_err = -(u_f / params.mass) * r3(theta_r) + kGravity * Vec3::UnitZ() +
                         est.sigma_rho_hat - est.xc3_hat;
  Vec3 out = -gains.gamma1 * est.rho2_hat - gains.gamma2 * accel_err;
  if (include_reference_jerk) out += est.sigma_xc_hat;
  return out;
}

Vec3 state_feedback_torque(const Vec3& xi1, const Vec3& xi2, const Vec3& varsigma_xi,
                           const Vec3& theta1, const Vec3& thetar_dot, const ControlGains& gains,
                           const VehicleParams& params) {
  const Vec3 f_r = -gains.beta1 * xi1 - gains.beta2 * xi2 - varsigma_xi;
  const Vec3 drift = euler_rate_drift(theta1, xi2 + thetar_dot, params);
  // G^-1 = J Psi^-1
  return params.inertia * (psi_inverse(theta1) * (f_r - drift));
}

Vec3 rotational_control(const EstimateBundle& est, const Vec3& theta1, const Vec3& thetar_dot_bar,
                        const ControlGains& gains, const VehicleParams& params) {
  return state_feedback_torque(est.xi1_hat, est.xi2_hat, est.varsigma_xi_hat, theta1,
                               thetar_dot_bar, gains, params);
}

double limit_forcing_tilt(Vec3& f_t, Vec3& f_t_dot, double limit) {
  const double vertical = kGravity - f_t.z();
  if (vertical <= 0.0) return 1.0;
  const double t = std::tan(limit);
  const double fx = std::abs(f_t.x()), fy = std::abs(f_t.y());
  double s = 1.0;
  if (fx * s > vertical * t) s = vertical * t / fx;
  // uniform scaling keeps |fy| <= t * hypot(s fx, vertical)
  const double excess = fy * fy - fx * fx * t * t;
  if (excess > 0.0) s = std::min(s, vertical * t / std::sqrt(excess));
  if (s >= 1.0) return 1.0;
  f_t.x() *= s;
  f_t.y() *= s;
  f_t_dot.x() *= s;
  f_t_dot.y() *= s;
  return s;
}

namespace {

bool outside_margin(const Vec3& theta_r, double delta) {
  const double limit = M_PI / 2.0 - delta;
  return !(std::abs(theta_r.x()) < limit) || !(std::abs(theta_r.y()) < limit);
}

}  // namespace

OutputFeedbackController::OutputFeedbackController(ControllerSettings settings,
                                                   SaturationBounds bounds, MixingMatrix mixer,
                                                   VehicleParams params)
    : settings_(settings),
      bounds_(std::move(bounds)),
      mixer_(std::move(mixer)),
      params_(std::move(params)) {
  settings_.gains.validate();
  bounds_.validate();
}

ControlOutput OutputFeedbackController::compute(const Vec3& theta1_meas,
                                                const ExtendedVector& raw_estimates,
                                                const Vec3& pr_offset_accel,
                                                const Vec3& pr_offset_jerk,
                                                const std::optional<ControlCommand>& previous) const {
  ControlOutput out;
  const ExtendedVector clipped = saturate(raw_estimates, bounds_);
  out.diagnostics.saturated_entries =
      static_cast<int>((clipped.array() != raw_estimates.array()).count());
  const EstimateBundle est = EstimateBundle::unpack(clipped);
  const ControlGains& gains = settings_.gains;

  ControlCommand& cmd = out.command;
  double tilt_scale = 1.0;
  try {
    out.f_t = forcing(est, gains) + pr_offset_accel;
    if (settings_.limit_tilt) {
      const double limit =
          settings_.max_tilt > 0.0 ? settings_.max_tilt : M_PI / 2.0 - settings_.delta - 1e-9;
      Vec3 unused = Vec3::Zero();
      tilt_scale = limit_forcing_tilt(out.f_t, unused, limit);
    }
    const AttitudeThrust at = translational_control(out.f_t, params_.mass);
    out.diagnostics.thrust_reversal = at.thrust_reversal;
    cmd.theta_r = at.theta_r;
    cmd.u_f = at.u_fd;
    if (!at.thrust_reversal) {
      out.f_t_dot = f_t_dot_estimate(est, at.u_fd, at.theta_r, gains, params_,
                                     settings_.use_reference_jerk) +
                    pr_offset_jerk;
      out.f_t_dot.x() *= tilt_scale;
      out.f_t_dot.y() *= tilt_scale;
      cmd.thetar_dot = reference_rates(out.f_t, out.f_t_dot);
    }
    cmd.tau = rotational_control(est, theta1_meas, cmd.thetar_dot, gains, params_);
  } catch (const DegenerateForcing&) {
    out.diagnostics.degenerate_hold = true;
    if (previous) {
      cmd = *previous;
    } else {
      cmd = ControlCommand{};
      cmd.u_f = params_.mass * kGravity;
      cmd.omega_des = hover_rates(params_, mixer_);
    }
    return out;
  }
  out.diagnostics.angle_margin_violation =
      tilt_scale < 1.0 || outside_margin(cmd.theta_r, settings_.delta);

  const Wrench w(cmd.u_f, cmd.tau.x(), cmd.tau.y(), cmd.tau.z());
  const Allocation alloc = allocate(w, mixer_, params_.thrust_coefficient);
  cmd.omega_des = alloc.omega_des;
  out.diagnostics.allocation_clamped = alloc.infeasible;
  return out;
}

ControlOutput OutputFeedbackController::step(const Vec3& theta1_meas,
                                             const ExtendedVector& raw_estimates,
                                             const Vec3& pr_offset_accel,
                                             const Vec3& pr_offset_jerk) {
  ControlOutput out =
      compute(theta1_meas, raw_estimates, pr_offset_accel, pr_offset_jerk, previous_);
  previous_ = out.command;
  return out;
}

ControlOutput OutputFeedbackController::evaluate(const Vec3& theta1_meas,
                                                 const ExtendedVector& raw_estimates,
                                                 const Vec3& pr_offset_accel,
                                                 const Vec3& pr_offset_jerk) const {
  return compute(theta1_meas, raw_estimates, pr_offset_accel, pr_offset_jerk, previous_);
}

StateFeedbackOutput state_feedback_step(const RigidBodyState& s, const TruthFeedforward& ff,
                                        const ControllerSettings& settings,
                                        const MixingMatrix& mixer, const VehicleParams& params) {
  const ControlGains& gains = settings.gains;
  const double m = params.mass;
  StateFeedbackOutput out;
  ControlOutput& co = out.control;
  ControlCommand& cmd = co.command;

  const Vec3 rho1 = s.p1 - ff.p_r[0];
  const Vec3 rho2 = s.p2 - ff.p_r[1];
  co.f_t = state_feedback_forcing(rho1, rho2, ff.sigma_rho, ff.p_r[2], gains);
  const AttitudeThrust at = translational_control(co.f_t, m);
  co.diagnostics.thrust_reversal = at.thrust_reversal;
  cmd.theta_r = at.theta_r;
  cmd.u_f = at.u_fd;

  if (!at.thrust_reversal) {
    const Vec3 g_ez = kGravity * Vec3::UnitZ();
    const Vec3 thrust_dir = r3(s.theta1);
    const Vec3 rho2_dot = -(cmd.u_f / m) * thrust_dir + g_ez + ff.sigma_rho - ff.p_r[2];
    co.f_t_dot = -gains.gamma1 * rho2 - gains.gamma2 * rho2_dot - ff.sigma_rho_dot + ff.p_r[3];
    // u = m |f - g e_z|
    const Vec3 lift = co.f_t - g_ez;
    const double u_dot = m * lift.dot(co.f_t_dot) / lift.norm();
    const Vec3 rho2_ddot = -(u_dot / m) * thrust_dir -
                           (cmd.u_f / m) * (r3_jacobian(s.theta1) * s.theta2) +
                           ff.sigma_rho_dot - ff.p_r[3];
    const Vec3 f_t_ddot =
        -gains.gamma1 * rho2_dot - gains.gamma2 * rho2_ddot - ff.sigma_rho_ddot + ff.p_r[4];
    cmd.thetar_dot = reference_rates(co.f_t, co.f_t_dot);
    out.thetar_ddot = reference_angular_accel(co.f_t, co.f_t_dot, f_t_ddot);
  }

  const Vec3 xi1 = attitude_error(s.theta1, cmd.theta_r);
  const Vec3 xi2 = s.theta2 - cmd.thetar_dot;
  out.varsigma_xi = ff.sigma_xi - out.thetar_ddot;
  cmd.tau = state_feedback_torque(xi1, xi2, out.varsigma_xi, s.theta1, cmd.thetar_dot, gains,
                                  params);
  co.diagnostics.angle_margin_violation = outside_margin(cmd.theta_r, settings.delta);

  const Wrench w(cmd.u_f, cmd.tau.x(), cmd.tau.y(), cmd.tau.z());
  const Allocation alloc = allocate(w, mixer, params.thrust_coefficient);
  cmd.omega_des = alloc.omega_des;
  co.diagnostics.allocation_clamped = alloc.infeasible;
  return out;
}

}  // namespace ehgo
