#include "ehgo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ehgo/errors.hpp"

namespace ehgo {

RigidBodyState ScenarioConfig::default_initial_state() {
  RigidBodyState s;
  s.p1 = Vec3(1.0, 1.0, -4.0);
  return s;
}

ReferenceState ScenarioConfig::default_initial_vehicle() {
  ReferenceState r;
  r.xc1 = Vec3(5.0, 0.0, -0.5);
  r.xc2 = Vec3(0.9, 0.9, 0.0);
  return r;
}

long ScenarioConfig::step_count() const {
  return static_cast<long>(std::floor(duration / step + 1e-9));
}

void ScenarioConfig::validate() const {
  if (!(step > 0)) throw ValidationError("sim.step", "> 0");
  if (!(duration >= step)) throw ValidationError("sim.duration", ">= sim.step");
  if (!(noise.position >= 0)) throw ValidationError("noise.position", ">= 0");
  if (!(noise.orientation >= 0)) throw ValidationError("noise.orientation", ">= 0");
  if (!(noise.vehicle_position >= 0)) throw ValidationError("noise.vehicle_position", ">= 0");
  params.validate();
  profile.validate();
  controller.gains.validate();
  if (!(controller.delta > 0 && controller.delta < M_PI / 2)) {
    throw ValidationError("gains.delta", "in (0, pi/2)");
  }
  if (!(step <= params.tau_m / 5.0 + 1e-12)) throw ValidationError("sim.step", "<= vehicle.tau_m / 5");
  if (mode == ControlMode::output_feedback) {
    observer.gains();  // Hurwitz and epsilon range checks
    if (observer.enabled && !(step <= observer.epsilon / 5.0 + 1e-12)) {
      throw ValidationError("sim.step", "<= observer.epsilon / 5");
    }
  }
  if (!(saturation.scale > 0)) throw ValidationError("observer.saturation_scale", "> 0");
  if (!(saturation.floor > 0)) throw ValidationError("observer.saturation_floor", "> 0");
  if (saturation.bounds) saturation.bounds->validate();
  if (!(divergence_limit > 0)) throw ValidationError("sim.divergence_limit", "> 0");
  if (!initial_state.to_vector().allFinite()) throw ValidationError("initial state", "finite");
  initial_state.check_orientation(0.0);
}

NoiseSample NoiseModel::sample() {
  NoiseSample s;
  for (int i = 0; i < 3; ++i) s.position[i] = std_.position * normal_(rng_);
  for (int i = 0; i < 3; ++i) s.orientation[i] = std_.orientation * normal_(rng_);
  for (int i = 0; i < 3; ++i) s.vehicle_position[i] = std_.vehicle_position * normal_(rng_);
  return s;
}

SaturationBounds bounds_from_log(const SimLog& log, double scale, double floor) {
  ExtendedVector peak = ExtendedVector::Zero();
  for (const SimRecord& r : log.records) peak = peak.cwiseMax(r.chi.cwiseAbs());
  SaturationBounds b;
  b.k_chi = (scale * peak).cwiseMax(floor);
  return b;
}

namespace {

struct StageResult {
  Eigen::VectorXd dx;
  ControlOutput control;
  ExtendedVector estimates = ExtendedVector::Zero();
  MeasurementFrame meas;
  Vec3 sigma_rho = Vec3::Zero();
  Vec3 sigma_xi = Vec3::Zero();
  Vec3 thetar_ddot = Vec3::Zero();  // state-feedback mode only
};

// Bundle layout: [plant 12 | omega n | vehicle 6 | chi_hat 30 | omega_hat n].
class ClosedLoop {
 public:
  ClosedLoop(const ScenarioConfig& cfg, const SaturationBounds& bounds)
      : cfg_(cfg),
        n_(cfg.params.n_rotors),
        mixer_(build_mixer(cfg.params)),
        gains_(cfg.mode == ControlMode::output_feedback ? cfg.observer.gains() : build_gains(0.5)),
        controller_(cfg.controller, bounds, mixer_, cfg.params),
        offset_(cfg.profile.descent, cfg.initial_state.p1.z(), cfg.initial_vehicle.xc1.z()),
        sigma_rho_(cfg.disturbance.sigma_rho),
        sigma_rho_dot_(sigma_rho_.derivative()),
        sigma_rho_ddot_(sigma_rho_dot_.derivative()),
        sigma_xi_(cfg.disturbance.sigma_xi) {}

  int size() const { return 48 + 2 * n_; }
  int omega_index() const { return 12; }
  int vehicle_index() const { return 12 + n_; }
  int chi_index() const { return 18 + n_; }
  int omega_hat_index() const { return 48 + n_; }
  const DescentOffset& offset() const { return offset_; }

  Eigen::VectorXd initial_bundle(const NoiseSample& noise) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(size());
    const Eigen::VectorXd hover = hover_rates(cfg_.params, mixer_);
    x.segment<12>(0) = cfg_.initial_state.to_vector();
    x.segment(omega_index(), n_) = hover;
    x.segment<6>(vehicle_index()) = cfg_.initial_vehicle.to_vector();
    x.segment(omega_hat_index(), n_) = hover;
    if (cfg_.mode == ControlMode::output_feedback && cfg_.observer.init_from_measurements) {
      const MeasurementFrame meas = measure(0.0, cfg_.initial_state, cfg_.initial_vehicle, noise);
      const double d = offset_(0.0)[0];
      ExtendedVector chi = ExtendedVector::Zero();
      chi.segment<3>(slot::rho1) = meas.p1_meas - meas.xc1_meas - d * Vec3::UnitZ();
      chi.segment<3>(slot::xc1) = meas.xc1_meas;
      // The attitude reference does not depend on the rotational estimates.
      const ControlOutput first = controller_.evaluate(meas.theta1_meas, chi);
      chi.segment<3>(slot::xi1) = attitude_error(meas.theta1_meas, first.command.theta_r);
      x.segment<kExtendedStates>(chi_index()) = chi;
    }
    return x;
  }

  StageResult evaluate(double t, const Eigen::VectorXd& x, const NoiseSample& noise, bool commit) {
    const RigidBodyState s = RigidBodyState::from_vector(x.segment<12>(0));
    const Eigen::VectorXd omega = x.segment(omega_index(), n_);
    const ReferenceState xc = ReferenceState::from_vector(x.segment<6>(vehicle_index()));
    const ExtendedVector chi_hat = x.segment<kExtendedStates>(chi_index());
    const Eigen::VectorXd omega_hat = x.segment(omega_hat_index(), n_);
    const auto d = offset_(t);
    const VehicleParams& params = cfg_.params;

    StageResult r;
    r.dx = Eigen::VectorXd::Zero(size());
    r.sigma_rho = sigma_rho_(t);
    r.sigma_xi = sigma_xi_(t);
    r.meas = measure(t, s, xc, noise);

    Eigen::VectorXd omega_applied;
    if (cfg_.mode == ControlMode::state_feedback) {
      TruthFeedforward ff;
      ff.sigma_rho = r.sigma_rho;
      ff.sigma_rho_dot = sigma_rho_dot_(t);
      ff.sigma_rho_ddot = sigma_rho_ddot_(t);
      ff.sigma_xi = r.sigma_xi;
      const auto acc = reference_acceleration_derivatives(t, xc, cfg_.profile);
      ff.p_r = {xc.xc1 + d[0] * Vec3::UnitZ(), xc.xc2 + d[1] * Vec3::UnitZ(),
                acc[0] + d[2] * Vec3::UnitZ(), acc[1] + d[3] * Vec3::UnitZ(),
                acc[2] + d[4] * Vec3::UnitZ()};
      const StateFeedbackOutput sf =
          state_feedback_step(s, ff, cfg_.controller, mixer_, params);
      r.control = sf.control;
      r.thetar_ddot = sf.thetar_ddot;
      r.estimates = chi_hat;
      // Ideal actuators: the allocated rates act immediately.
      omega_applied = r.control.command.omega_des;
    } else {
      const Vec3 accel = d[2] * Vec3::UnitZ();
      const Vec3 jerk = d[3] * Vec3::UnitZ();
      r.estimates = chi_hat;
      if (!cfg_.observer.enabled) {
        r.estimates.segment<3>(slot::rho1) = r.meas.p1_meas - r.meas.xc1_meas - d[0] * Vec3::UnitZ();
        r.estimates.segment<3>(slot::xc1) = r.meas.xc1_meas;
        const ControlOutput pre = controller_.evaluate(r.meas.theta1_meas, r.estimates, accel, jerk);
        r.estimates.segment<3>(slot::xi1) =
            attitude_error(r.meas.theta1_meas, pre.command.theta_r);
      }
      r.control = commit ? controller_.step(r.meas.theta1_meas, r.estimates, accel, jerk)
                         : controller_.evaluate(r.meas.theta1_meas, r.estimates, accel, jerk);
      const ControlCommand& cmd = r.control.command;
      if (cfg_.observer.enabled) {
        ObserverInput in;
        in.theta_r = cmd.theta_r;
        in.thetar_dot_bar = cmd.thetar_dot;
        in.omega_des = cmd.omega_des;
        in.pr_offset = d[0] * Vec3::UnitZ();
        in.pr_offset_accel = accel;
        ObserverState obs{chi_hat, omega_hat};
        const ObserverDerivative od =
            observer_derivative(obs, r.meas, in, gains_, params, mixer_);
        r.dx.segment<kExtendedStates>(chi_index()) = od.chi_hat_dot;
      }
      omega_applied = omega;
    }

    const Eigen::VectorXd& omega_des = r.control.command.omega_des;
    r.dx.segment(omega_hat_index(), n_) = actuator_derivative(omega_hat, omega_des, params.tau_m);
    r.dx.segment(omega_index(), n_) = actuator_derivative(omega, omega_des, params.tau_m);

    const Wrench w = mix_forward(omega_applied, mixer_, params.thrust_coefficient);
    const RigidBodyDerivative pd =
        rigid_body_derivative(s, w[0], Vec3(w[1], w[2], w[3]), r.sigma_rho, r.sigma_xi, params);
    r.dx.segment<12>(0) = pd.to_vector();
    const ReferenceDerivative rd = reference_derivative(t, xc, cfg_.profile);
    r.dx.segment<3>(vehicle_index()) = rd.xc1_dot;
    r.dx.segment<3>(vehicle_index() + 3) = rd.xc2_dot;
    return r;
  }

 private:
  static MeasurementFrame measure(double t, const RigidBodyState& s, const ReferenceState& xc,
                                  const NoiseSample& noise) {
    MeasurementFrame m;
    m.p1_meas = s.p1 + noise.position;
    m.theta1_meas = s.theta1 + noise.orientation;
    m.xc1_meas = xc.xc1 + noise.vehicle_position;
    m.t = t;
    return m;
  }

  const ScenarioConfig& cfg_;
  int n_;
  MixingMatrix mixer_;
  ObserverGains gains_;
  OutputFeedbackController controller_;
  DescentOffset offset_;
  VectorSignal sigma_rho_, sigma_rho_dot_, sigma_rho_ddot_, sigma_xi_;
};

// Fills the true extended state of every record. Reference-angle rates come
// from `thetar_dot`/`thetar_ddot` when given, otherwise from differences of
// the logged attitude references.
void fill_truth(SimLog& log, const ScenarioConfig& cfg, const DescentOffset& offset,
                const std::vector<Vec3>* thetar_ddot_exact) {
  auto& rec = log.records;
  const std::size_t n = rec.size();
  const double h = cfg.step;
  for (std::size_t k = 0; k < n; ++k) {
    SimRecord& r = rec[k];
    Vec3 rate, accel;
    if (thetar_ddot_exact) {
      rate = r.thetar_dot_bar;
      accel = (*thetar_ddot_exact)[k];
    } else if (n < 3) {
      rate = r.thetar_dot_bar;
      accel = Vec3::Zero();
    } else {
      const std::size_t c = std::clamp<std::size_t>(k, 1, n - 2);
      const Vec3& a = rec[c - 1].theta_r;
      const Vec3& b = rec[c].theta_r;
      const Vec3& e = rec[c + 1].theta_r;
      accel = (e - 2.0 * b + a) / (h * h);
      if (k == c) {
        rate = (e - a) / (2.0 * h);
      } else if (k == 0) {
        rate = (rec[1].theta_r - rec[0].theta_r) / h;
      } else {
        rate = (rec[n - 1].theta_r - rec[n - 2].theta_r) / h;
      }
    }
    const auto d = offset(r.t);
    const RigidBodyState& s = r.state;
    const auto acc = reference_acceleration_derivatives(r.t, r.vehicle, cfg.profile);
    const Vec3 xi2 = s.theta2 - rate;
    const Vec3 mismatch = euler_rate_drift(s.theta1, s.theta2, cfg.params) -
                          euler_rate_drift(s.theta1, xi2 + r.thetar_dot_bar, cfg.params);
    r.chi << s.p1 - r.vehicle.xc1 - d[0] * Vec3::UnitZ(), s.p2 - r.vehicle.xc2 - d[1] * Vec3::UnitZ(),
        r.sigma_rho, attitude_error(s.theta1, r.theta_r), xi2, r.sigma_xi - accel + mismatch,
        r.vehicle.xc1, r.vehicle.xc2, acc[0], acc[1];
  }
}

SimLog integrate(const ScenarioConfig& cfg, const SaturationBounds& bounds) {
  ClosedLoop loop(cfg, bounds);
  NoiseModel noise(cfg.seed, cfg.noise);
  const double h = cfg.step;
  const long steps = cfg.step_count();

  SimLog log;
  log.mode = cfg.mode;
  log.n_rotors = cfg.params.n_rotors;
  log.step = h;
  log.bounds = bounds;
  log.records.reserve(static_cast<std::size_t>(steps) + 1);
  std::vector<Vec3> thetar_ddot;
  if (cfg.mode == ControlMode::state_feedback) thetar_ddot.reserve(log.records.capacity());

  const int n = cfg.params.n_rotors;
  Eigen::VectorXd x;
  try {
    x = loop.initial_bundle(noise.sample());
  } catch (const SingularOrientation& e) {
    throw Diverged(0, 0.0, e.what());
  } catch (const DegenerateForcing& e) {
    throw Diverged(0, 0.0, e.what());
  }

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * h;
    const NoiseSample ns = noise.sample();
    try {
      const StageResult first = loop.evaluate(t, x, ns, true);

      SimRecord r;
      r.t = t;
      r.state = RigidBodyState::from_vector(x.segment<12>(0));
      r.omega = x.segment(loop.omega_index(), n);
      r.vehicle = ReferenceState::from_vector(x.segment<6>(loop.vehicle_index()));
      r.chi_hat = first.estimates;
      const ControlCommand& cmd = first.control.command;
      r.omega_des = cmd.omega_des;
      r.diagnostics = first.control.diagnostics;
      r.u_f = cmd.u_f;
      r.tau = cmd.tau;
      r.theta_r = cmd.theta_r;
      r.thetar_dot_bar = cmd.thetar_dot;
      r.sigma_rho = first.sigma_rho;
      r.sigma_xi = first.sigma_xi;
      r.meas = first.meas;
      r.descent_offset = loop.offset()(t)[0];
      r.descent_phase = loop.offset().phase(t);
      log.records.push_back(std::move(r));
      if (cfg.mode == ControlMode::state_feedback) thetar_ddot.push_back(first.thetar_ddot);
      if (k == steps) break;

      bool first_stage = true;
      auto f = [&](double tt, const Eigen::VectorXd& xx) -> Eigen::VectorXd {
        if (first_stage) {
          first_stage = false;
          return first.dx;
        }
        return loop.evaluate(tt, xx, ns, false).dx;
      };
      x = rk4_step(f, x, t, h);
    } catch (const SingularOrientation& e) {
      throw Diverged(k, t, e.what());
    } catch (const DegenerateForcing& e) {
      throw Diverged(k, t, e.what());
    }

    auto omega_hat = x.segment(loop.omega_hat_index(), n);
    omega_hat = omega_hat.cwiseMax(0.0);
    if (!x.allFinite()) throw Diverged(k + 1, t + h, "non-finite state");
    if (x.norm() > cfg.divergence_limit) {
      throw Diverged(k + 1, t + h, "state norm " + std::to_string(x.norm()) + " above guard");
    }
  }

  fill_truth(log, cfg, loop.offset(),
             cfg.mode == ControlMode::state_feedback ? &thetar_ddot : nullptr);
  return log;
}

}  // namespace

SimLog run_scenario(const ScenarioConfig& config) {
  config.validate();
  if (config.mode == ControlMode::state_feedback) {
    return integrate(config, config.saturation.bounds.value_or(SaturationBounds{}));
  }
  SaturationBounds bounds;
  if (config.saturation.bounds) {
    bounds = *config.saturation.bounds;
  } else {
    ScenarioConfig pre = config;
    pre.mode = ControlMode::state_feedback;
    pre.noise = NoiseStd{0.0, 0.0, 0.0};
    bounds = bounds_from_log(integrate(pre, SaturationBounds{}), config.saturation.scale,
                             config.saturation.floor);
  }
  return integrate(config, bounds);
}

}  // namespace ehgo
