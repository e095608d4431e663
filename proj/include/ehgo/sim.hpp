#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ehgo/actuators.hpp"
#include "ehgo/controller.hpp"
#include "ehgo/dynamics.hpp"
#include "ehgo/observer.hpp"
#include "ehgo/reference.hpp"
#include "ehgo/signal.hpp"

namespace ehgo {

enum class ControlMode { state_feedback, output_feedback };

struct NoiseStd {
  double position = 0.005;          // m
  double orientation = 0.002;       // rad
  double vehicle_position = 0.01;   // m
};

struct ObserverSettings {
  std::array<double, 3> alpha_rho{3.0, 3.0, 1.0};
  std::array<double, 3> alpha_xi{3.0, 3.0, 1.0};
  std::array<double, 4> alpha_xc{4.0, 6.0, 4.0, 1.0};
  double epsilon = 0.01;
  /// Start from measured outputs in the first state of each block (true)
  /// or from all zeros (false).
  bool init_from_measurements = true;
  /// When false the controller sees the raw measured outputs in the first
  /// state of each block and the initial values everywhere else.
  bool enabled = true;

  ObserverGains gains() const { return build_gains(alpha_rho, alpha_xi, alpha_xc, epsilon); }
};

struct SaturationSettings {
  double scale = 1.5;   // k_i = max(scale * max|chi_i|, floor) from the pre-pass
  double floor = 0.1;
  std::optional<SaturationBounds> bounds;  // skips the pre-pass when set
};

struct ScenarioConfig {
  double duration = 40.0;  // s
  double step = 1e-3;      // s
  std::uint64_t seed = 1;
  NoiseStd noise;
  ControlMode mode = ControlMode::output_feedback;
  RigidBodyState initial_state = default_initial_state();
  ReferenceState initial_vehicle = default_initial_vehicle();
  TrajectoryProfile profile;
  Disturbance disturbance = Disturbance::paper_sinusoids();
  VehicleParams params;
  ControllerSettings controller;
  ObserverSettings observer;
  SaturationSettings saturation;
  double divergence_limit = 1e6;

  /// Throws ValidationError for the first violated constraint.
  void validate() const;
  long step_count() const;

  static RigidBodyState default_initial_state();
  static ReferenceState default_initial_vehicle();
};

/// Classical fourth-order Runge-Kutta step of x' = f(t, x).
template <class F, class Vector>
Vector rk4_step(F&& f, const Vector& x, double t, double h) {
  const Vector k1 = f(t, x);
  const Vector k2 = f(t + 0.5 * h, Vector(x + 0.5 * h * k1));
  const Vector k3 = f(t + 0.5 * h, Vector(x + 0.5 * h * k2));
  const Vector k4 = f(t + h, Vector(x + h * k3));
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct NoiseSample {
  Vec3 position = Vec3::Zero();
  Vec3 orientation = Vec3::Zero();
  Vec3 vehicle_position = Vec3::Zero();
};

/// Seeded Gaussian measurement noise; always draws nine values per sample
/// in a fixed order so zero channels do not shift the others.
class NoiseModel {
 public:
  NoiseModel(std::uint64_t seed, NoiseStd stddev) : rng_(seed), std_(stddev) {}
  NoiseSample sample();

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  NoiseStd std_;
};

struct SimRecord {
  double t = 0.0;
  RigidBodyState state;
  ReferenceState vehicle;
  ExtendedVector chi_hat = ExtendedVector::Zero();
  Eigen::VectorXd omega_des;
  StepDiagnostics diagnostics;
  ExtendedVector chi = ExtendedVector::Zero();  // true extended state
  double u_f = 0.0;
  Vec3 tau = Vec3::Zero();
  Vec3 theta_r = Vec3::Zero();
  Vec3 thetar_dot_bar = Vec3::Zero();
  Vec3 sigma_rho = Vec3::Zero();
  Vec3 sigma_xi = Vec3::Zero();
  MeasurementFrame meas;
  Eigen::VectorXd omega;
  double descent_offset = 0.0;
  int descent_phase = 0;
};

struct SimLog {
  ControlMode mode = ControlMode::output_feedback;
  int n_rotors = 4;
  double step = 0.0;
  SaturationBounds bounds;
  std::vector<SimRecord> records;
};

/// Saturation bounds from a state-feedback log: max(scale * max|chi_i|, floor).
SaturationBounds bounds_from_log(const SimLog& log, double scale, double floor);

/// Runs the closed loop. In output-feedback mode without explicit bounds a
/// noise-free state-feedback pre-pass of the same scenario supplies them.
/// Throws Diverged when the state leaves the admissible region.
SimLog run_scenario(const ScenarioConfig& config);

struct Metrics {
  long records = 0;
  double rho1_rms = 0.0, rho1_max = 0.0;  // final 25%
  double xi1_rms = 0.0, xi1_max = 0.0;
  std::array<double, 3> estimation_rms{};  // translational, rotational, vehicle blocks
  double estimation_rms_total = 0.0;
  std::array<double, 10> estimation_rms_slot{};
  double touchdown_time = 0.0;  // NaN when the descent never completes
  double touchdown_horizontal = 0.0;
  double touchdown_vertical = 0.0;
  std::array<double, 3> peak_estimate{};  // max |chi_hat| entry per block
  std::array<double, 3> peak_error{};     // max |chi - chi_hat| entry per block
  long saturated_entries = 0;
  long allocation_clamps = 0;
  long angle_margin_hits = 0;
  long degenerate_holds = 0;
  long thrust_reversals = 0;
};

Metrics compute_metrics(const SimLog& log);

/// Index of the first record of the final quarter of a log with n records.
std::size_t steady_start(std::size_t n);

}  // namespace ehgo
