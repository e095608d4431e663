#pragma once

#include <array>
#include <optional>

#include <Eigen/Dense>

#include "ehgo/actuators.hpp"
#include "ehgo/dynamics.hpp"

namespace ehgo {

inline constexpr int kExtendedStates = 30;
using ExtendedVector = Eigen::Matrix<double, kExtendedStates, 1>;

/// Offsets of the named 3-vectors inside the 30-entry extended state.
namespace slot {
inline constexpr int rho1 = 0;
inline constexpr int rho2 = 3;
inline constexpr int sigma_rho = 6;
inline constexpr int xi1 = 9;
inline constexpr int xi2 = 12;
inline constexpr int varsigma_xi = 15;
inline constexpr int xc1 = 18;
inline constexpr int xc2 = 21;
inline constexpr int xc3 = 24;
inline constexpr int sigma_xc = 27;
}  // namespace slot

struct ControlGains {
  double beta1 = 16.0;
  double beta2 = 8.0;
  double gamma1 = 4.0;
  double gamma2 = 4.0;

  void validate() const;
};

/// Named view of the extended state (or of its estimate).
struct EstimateBundle {
  Vec3 rho1_hat = Vec3::Zero();
  Vec3 rho2_hat = Vec3::Zero();
  Vec3 sigma_rho_hat = Vec3::Zero();
  Vec3 xi1_hat = Vec3::Zero();
  Vec3 xi2_hat = Vec3::Zero();
  Vec3 varsigma_xi_hat = Vec3::Zero();
  Vec3 xc1_hat = Vec3::Zero();
  Vec3 xc2_hat = Vec3::Zero();
  Vec3 xc3_hat = Vec3::Zero();
  Vec3 sigma_xc_hat = Vec3::Zero();

  ExtendedVector pack() const;
  static EstimateBundle unpack(const ExtendedVector& v);
};

struct ControlCommand {
  double u_f = 0.0;
  Vec3 tau = Vec3::Zero();
  Vec3 theta_r = Vec3::Zero();
  Vec3 thetar_dot = Vec3::Zero();
  Eigen::VectorXd omega_des;
};

struct SaturationBounds {
  ExtendedVector k_chi = ExtendedVector::Constant(1e3);

  void validate() const;
};

/// sat(y) = y for |y| <= 1, sign(y) otherwise.
double sat(double y);

Vec3 forcing(const EstimateBundle& est, const ControlGains& gains);

/// Forcing with true errors, disturbance and reference acceleration.
Vec3 state_feedback_forcing(const Vec3& rho1, const Vec3& rho2, const Vec3& sigma_rho,
                            const Vec3& pr_ddot, const ControlGains& gains);

struct AttitudeThrust {
  Vec3 theta_r = Vec3::Zero();  // [phi_r theta_r 0]
  double u_fd = 0.0;
  /// The forcing asked for more downward acceleration than gravity; the
  /// command was clamped to zero thrust and a level attitude.
  bool thrust_reversal = false;
};

/// Inverts -(u/m) r3(theta_r) + g e_z = f_t for (phi_r, theta_r, u).
AttitudeThrust translational_control(const Vec3& f_t, double mass);

/// Time derivative of the translational_control angles along f_t(t).
Vec3 reference_rates(const Vec3& f_t, const Vec3& f_t_dot);

/// Second time derivative of the translational_control angles.
Vec3 reference_angular_accel(const Vec3& f_t, const Vec3& f_t_dot, const Vec3& f_t_ddot);

Vec3 f_t_dot_estimate(const EstimateBundle& est, double u_f, const Vec3& theta_r,
                      const ControlGains& gains, const VehicleParams& params,
                      bool include_reference_jerk = true);

Vec3 rotational_control(const EstimateBundle& est, const Vec3& theta1, const Vec3& thetar_dot_bar,
                        const ControlGains& gains, const VehicleParams& params);

/// Rotational law with true errors and lumped disturbance.
Vec3 state_feedback_torque(const Vec3& xi1, const Vec3& xi2, const Vec3& varsigma_xi,
                           const Vec3& theta1, const Vec3& thetar_dot, const ControlGains& gains,
                           const VehicleParams& params);

EstimateBundle saturate_estimates(const EstimateBundle& raw, const SaturationBounds& bounds);
ExtendedVector saturate(const ExtendedVector& raw, const SaturationBounds& bounds);

struct StepDiagnostics {
  int saturated_entries = 0;
  bool allocation_clamped = false;
  bool angle_margin_violation = false;
  bool degenerate_hold = false;
  bool thrust_reversal = false;
};

struct ControlOutput {
  ControlCommand command;
  StepDiagnostics diagnostics;
  Vec3 f_t = Vec3::Zero();
  Vec3 f_t_dot = Vec3::Zero();
};

struct ControllerSettings {
  ControlGains gains;
  double delta = 0.3;  // margin of the roll/pitch reference set, rad
  bool use_reference_jerk = true;
  /// Output feedback only: caps the horizontal forcing so the reference tilt
  /// stays within max_tilt (0 selects pi/2 - delta).
  bool limit_tilt = true;
  double max_tilt = 0.0;
};

/// Scales the horizontal part of f_t (and f_t_dot) so both reference angles stay
/// within `limit`. Returns the scale factor applied, 1 when untouched.
double limit_forcing_tilt(Vec3& f_t, Vec3& f_t_dot, double limit);

/// Output-feedback pipeline: saturate -> forcing -> translational_control ->
/// f_t_dot_estimate -> reference_rates -> rotational_control -> allocate.
/// Keeps the previous command so a degenerate forcing holds it for a step.
class OutputFeedbackController {
 public:
  OutputFeedbackController(ControllerSettings settings, SaturationBounds bounds,
                           MixingMatrix mixer, VehicleParams params);

  /// `theta1_meas` is the measured attitude; `pr_offset_accel/jerk` are
  /// known feedforward terms of the translational reference that are not
  /// part of the vehicle estimate (the descent offset).
  ControlOutput step(const Vec3& theta1_meas, const ExtendedVector& raw_estimates,
                     const Vec3& pr_offset_accel = Vec3::Zero(),
                     const Vec3& pr_offset_jerk = Vec3::Zero());

  /// Same as step() but without touching the hold cache.
  ControlOutput evaluate(const Vec3& theta1_meas, const ExtendedVector& raw_estimates,
                         const Vec3& pr_offset_accel = Vec3::Zero(),
                         const Vec3& pr_offset_jerk = Vec3::Zero()) const;

  const SaturationBounds& bounds() const { return bounds_; }
  const ControllerSettings& settings() const { return settings_; }
  void reset() { previous_.reset(); }

 private:
  ControlOutput compute(const Vec3& theta1_meas, const ExtendedVector& raw_estimates,
                        const Vec3& pr_offset_accel, const Vec3& pr_offset_jerk,
                        const std::optional<ControlCommand>& previous) const;

  ControllerSettings settings_;
  SaturationBounds bounds_;
  MixingMatrix mixer_;
  VehicleParams params_;
  std::optional<ControlCommand> previous_;
};

/// Everything the state-feedback law needs to know about the world.
struct TruthFeedforward {
  Vec3 sigma_rho = Vec3::Zero();
  Vec3 sigma_rho_dot = Vec3::Zero();
  Vec3 sigma_rho_ddot = Vec3::Zero();
  Vec3 sigma_xi = Vec3::Zero();
  std::array<Vec3, 5> p_r{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(),
                          Vec3::Zero()};  // derivatives 0..4
};

struct StateFeedbackOutput {
  ControlOutput control;
  Vec3 thetar_ddot = Vec3::Zero();
  Vec3 varsigma_xi = Vec3::Zero();
};

/// Exact feedback-linearizing law using the true state, disturbances and
/// reference derivatives (actuators assumed to realize the command).
StateFeedbackOutput state_feedback_step(const RigidBodyState& state, const TruthFeedforward& ff,
                                        const ControllerSettings& settings,
                                        const MixingMatrix& mixer, const VehicleParams& params);

}  // namespace ehgo
