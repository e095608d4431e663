#include "ehgo/verify.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "ehgo/actuators.hpp"
#include "ehgo/analysis.hpp"
#include "ehgo/config.hpp"
#include "ehgo/controller.hpp"
#include "ehgo/dynamics.hpp"
#include "ehgo/errors.hpp"
#include "ehgo/log_io.hpp"
#include "ehgo/observer.hpp"
#include "ehgo/reference.hpp"
#include "ehgo/sim.hpp"

namespace ehgo {

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

class Harness {
 public:
  explicit Harness(const VerifyOptions& o) : opt_(o), rng_(20240611) {}

  double uni(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  Vec3 vec(double lo, double hi) { return {uni(lo, hi), uni(lo, hi), uni(lo, hi)}; }

  // Plant thrust direction as seen by the harness.
  Vec3 thrust_dir(const Vec3& theta) const {
    return opt_.inject_r3_sign_fault ? Vec3(-r3(theta)) : r3(theta);
  }

  void check(const std::string& name, const std::function<std::string(bool&)>& body) {
    CheckResult r{name, false, ""};
    try {
      bool ok = false;
      r.detail = body(ok);
      r.passed = ok;
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    results.push_back(r);
  }

  std::vector<CheckResult> results;

 private:
  VerifyOptions opt_;
  std::mt19937_64 rng_;
};

double rk4_global_error(double h) {
  // x'' = -x from (1, 0) over one second; exact (cos t, -sin t).
  auto f = [](double, const Eigen::Vector2d& x) { return Eigen::Vector2d(x[1], -x[0]); };
  Eigen::Vector2d x(1.0, 0.0);
  const int steps = static_cast<int>(std::lround(1.0 / h));
  for (int k = 0; k < steps; ++k) x = rk4_step(f, x, k * h, h);
  return (x - Eigen::Vector2d(std::cos(1.0), -std::sin(1.0))).norm();
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& options) {
  Harness H(options);
  const VehicleParams params;
  const ControlGains gains;

  H.check("rotational feedback-linearization identity (1000 states)", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      RigidBodyState s;
      s.theta1 = Vec3(H.uni(-1.2, 1.2), H.uni(-1.2, 1.2), H.uni(-3, 3));
      s.theta2 = H.vec(-2, 2);
      const Vec3 theta_r(H.uni(-1, 1), H.uni(-1, 1), 0.0);
      const Vec3 thetar_dot = H.vec(-1, 1), thetar_ddot = H.vec(-3, 3), sigma_xi = H.vec(-2, 2);
      const Vec3 xi1 = attitude_error(s.theta1, theta_r), xi2 = s.theta2 - thetar_dot;
      const Vec3 tau = state_feedback_torque(xi1, xi2, sigma_xi - thetar_ddot, s.theta1,
                                             thetar_dot, gains, params);
      const auto d = rigid_body_derivative(s, 10.0, tau, Vec3::Zero(), sigma_xi, params);
      const Vec3 xi2_dot = d.theta2_dot - thetar_ddot;
      worst = std::max(worst, (xi2_dot + gains.beta1 * xi1 + gains.beta2 * xi2).cwiseAbs().maxCoeff());
    }
    ok = worst < 1e-9;
    return "max deviation " + sci(worst);
  });

  H.check("translational feedback-linearization identity (1000 states)", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const Vec3 rho1 = H.vec(-1, 1), rho2 = H.vec(-1, 1), sigma = H.vec(-1, 1);
      const Vec3 pr_ddot = H.vec(-1, 1);
      const Vec3 f = state_feedback_forcing(rho1, rho2, sigma, pr_ddot, gains);
      const AttitudeThrust at = translational_control(f, params.mass);
      // Perfect attitude tracking: the body attitude equals the reference.
      const Vec3 p_ddot = -(at.u_fd / params.mass) * H.thrust_dir(at.theta_r) +
                          kGravity * Vec3::UnitZ() + sigma;
      const Vec3 rho_ddot = p_ddot - pr_ddot;
      worst = std::max(worst, (rho_ddot + gains.gamma1 * rho1 + gains.gamma2 * rho2).cwiseAbs().maxCoeff());
    }
    ok = worst < 1e-9;
    return "max deviation " + sci(worst);
  });

  H.check("harness plant agrees with rigid-body model", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      RigidBodyState s;
      s.theta1 = Vec3(H.uni(-1, 1), H.uni(-1, 1), H.uni(-3, 3));
      const double u = H.uni(0, 30);
      const Vec3 sigma = H.vec(-1, 1);
      const auto d = rigid_body_derivative(s, u, Vec3::Zero(), sigma, Vec3::Zero(), params);
      const Vec3 mine = -(u / params.mass) * H.thrust_dir(s.theta1) + kGravity * Vec3::UnitZ() + sigma;
      worst = std::max(worst, (d.p2_dot - mine).cwiseAbs().maxCoeff());
    }
    ok = worst < 1e-12;
    return "max deviation " + sci(worst);
  });

  H.check("translational_control inverts the thrust map", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Vec3 f = H.vec(-8, 8);
      f.z() = H.uni(-15, kGravity - 0.5);
      const AttitudeThrust at = translational_control(f, params.mass);
      const Vec3 back = -(at.u_fd / params.mass) * H.thrust_dir(at.theta_r) + kGravity * Vec3::UnitZ();
      worst = std::max(worst, (back - f).cwiseAbs().maxCoeff());
    }
    ok = worst < 1e-9;
    return "max deviation " + sci(worst);
  });

  H.check("hover forcing gives level attitude and weight thrust", [&](bool& ok) {
    const AttitudeThrust at = translational_control(Vec3::Zero(), params.mass);
    const double err = std::abs(at.u_fd - params.mass * kGravity) + at.theta_r.norm();
    ok = err < 1e-12;
    return "deviation " + sci(err);
  });

  H.check("reference_rates match finite differences", [&](bool& ok) {
    double worst = 0.0;
    auto f_of = [](double t) {
      return Vec3(2 * std::sin(0.7 * t), -1.5 * std::cos(1.3 * t), 1 + 0.8 * std::sin(0.4 * t));
    };
    auto df_of = [](double t) {
      return Vec3(1.4 * std::cos(0.7 * t), 1.95 * std::sin(1.3 * t), 0.32 * std::cos(0.4 * t));
    };
    const double h = 1e-5;
    for (int i = 0; i < 50; ++i) {
      const double t = 0.2 * i;
      const Vec3 fd = (translational_control(f_of(t + h), 1.0).theta_r -
                       translational_control(f_of(t - h), 1.0).theta_r) / (2 * h);
      const Vec3 an = reference_rates(f_of(t), df_of(t));
      worst = std::max(worst, (fd - an).norm() / std::max(1e-3, an.norm()));
    }
    ok = worst < 1e-5;
    return "max relative deviation " + sci(worst);
  });

  H.check("reference angular accelerations match finite differences", [&](bool& ok) {
    double worst = 0.0;
    auto f_of = [](double t) {
      return Vec3(2 * std::sin(0.7 * t), -1.5 * std::cos(1.3 * t), 1 + 0.8 * std::sin(0.4 * t));
    };
    auto df_of = [](double t) {
      return Vec3(1.4 * std::cos(0.7 * t), 1.95 * std::sin(1.3 * t), 0.32 * std::cos(0.4 * t));
    };
    auto ddf_of = [](double t) {
      return Vec3(-0.98 * std::sin(0.7 * t), 2.535 * std::cos(1.3 * t), -0.128 * std::sin(0.4 * t));
    };
    const double h = 1e-5;
    for (int i = 0; i < 50; ++i) {
      const double t = 0.2 * i;
      const Vec3 fd = (reference_rates(f_of(t + h), df_of(t + h)) -
                       reference_rates(f_of(t - h), df_of(t - h))) / (2 * h);
      const Vec3 an = reference_angular_accel(f_of(t), df_of(t), ddf_of(t));
      worst = std::max(worst, (fd - an).norm() / std::max(1e-3, an.norm()));
    }
    ok = worst < 1e-5;
    return "max relative deviation " + sci(worst);
  });

  H.check("saturation is idempotent and odd", [&](bool& ok) {
    SaturationBounds b;
    for (int i = 0; i < kExtendedStates; ++i) b.k_chi[i] = H.uni(0.1, 3);
    ExtendedVector raw;
    for (int i = 0; i < kExtendedStates; ++i) raw[i] = H.uni(-10, 10);
    const ExtendedVector once = saturate(raw, b);
    const bool idem = saturate(once, b) == once;
    const bool odd = saturate(ExtendedVector(-raw), b) == ExtendedVector(-once);
    const bool bounded = (once.cwiseAbs().array() <= b.k_chi.array()).all();
    ok = idem && odd && bounded;
    return ok ? "ok" : "violated";
  });

  for (int n : {4, 6}) {
    H.check("mixer round trip on the feasible cone, n=" + std::to_string(n), [&, n](bool& ok) {
      const MixingMatrix mixer = build_mixer(n, 0.2, 0.016);
      double worst = 0.0;
      int used = 0;
      for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd w2(n);
        for (int j = 0; j < n; ++j) w2[j] = H.uni(2e5, 6e5);
        const Wrench w = mix_forward(w2.cwiseSqrt(), mixer, params.thrust_coefficient);
        const Allocation a = allocate(w, mixer, params.thrust_coefficient);
        if (a.infeasible) continue;
        ++used;
        const Wrench back = mix_forward(a.omega_des, mixer, params.thrust_coefficient);
        worst = std::max(worst, (back - w).cwiseAbs().maxCoeff() / std::max(1.0, w.norm()));
      }
      ok = worst < 1e-9 && used > 100;
      return "max relative deviation " + sci(worst) + " over " + std::to_string(used) + " wrenches";
    });
  }

  H.check("allocation is minimum norm", [&](bool& ok) {
    const MixingMatrix mixer = build_mixer(6, 0.2, 0.016);
    const Eigen::MatrixXd M = mixer.matrix();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Wrench w(H.uni(5, 20), H.uni(-0.2, 0.2), H.uni(-0.2, 0.2), H.uni(-0.05, 0.05));
      const Eigen::VectorXd oracle = M.completeOrthogonalDecomposition().solve(w / params.thrust_coefficient);
      const Eigen::VectorXd mine = mixer.pseudo_inverse() * w / params.thrust_coefficient;
      worst = std::max(worst, (oracle - mine).norm() / oracle.norm());
    }
    ok = worst < 1e-9;
    return "max relative deviation " + sci(worst);
  });

  H.check("odd rotor count is rejected", [&](bool& ok) {
    try {
      build_mixer(5, 0.2, 0.016);
      ok = false;
      return std::string("no error raised");
    } catch (const RankDeficientMixer&) {
      ok = true;
      return std::string("RankDeficientMixer raised");
    }
  });

  H.check("psi_inverse inverts psi", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const Vec3 th(H.uni(-1.4, 1.4), H.uni(-1.4, 1.4), H.uni(-3, 3));
      worst = std::max(worst, (psi(th) * psi_inverse(th) - Mat3::Identity()).cwiseAbs().maxCoeff());
    }
    ok = worst < 1e-9;
    return "max deviation " + sci(worst);
  });

  H.check("Lyapunov residual on random stable matrices", [&](bool& ok) {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      Eigen::MatrixXd A(6, 6);
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) A(r, c) = H.uni(-1, 1);
      }
      const double shift = A.eigenvalues().real().maxCoeff() + H.uni(0.5, 2.0);
      A -= shift * Eigen::MatrixXd::Identity(6, 6);
      worst = std::max(worst, solve_lyapunov(A).residual_norm);
    }
    ok = worst < 1e-10;
    return "max residual " + sci(worst);
  });

  H.check("Lyapunov solution for unit gains", [&](bool& ok) {
    const LyapunovCertificate c = solve_lyapunov(second_order_error_matrix(1.0, 1.0));
    Eigen::MatrixXd expect(6, 6);
    expect << 1.5 * Mat3::Identity(), 0.5 * Mat3::Identity(), 0.5 * Mat3::Identity(), Mat3::Identity();
    const double err = (c.P - expect).cwiseAbs().maxCoeff();
    ok = err < 1e-10;
    return "max deviation " + sci(err);
  });

  H.check("non-Hurwitz matrix is rejected", [&](bool& ok) {
    try {
      solve_lyapunov(Eigen::MatrixXd::Identity(6, 6));
      ok = false;
      return std::string("no error raised");
    } catch (const NotHurwitz&) {
      ok = true;
      return std::string("NotHurwitz raised");
    }
  });

  H.check("cascade Q definite below the bound, indefinite above", [&](bool& ok) {
    bool good = true;
    for (int i = 0; i < 100; ++i) {
      const double c = H.uni(0.1, 3), k = H.uni(0.1, 3), L = H.uni(0.1, 3), c3 = H.uni(0.1, 3);
      const CascadeWeight w = cascade_weight(c, k, L, c3);
      const double lo = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
                            cascade_q(w.bound * H.uni(0.01, 0.99), c, k, L, c3))
                            .eigenvalues()
                            .minCoeff();
      const double hi = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
                            cascade_q(w.bound * H.uni(1.01, 3.0), c, k, L, c3))
                            .eigenvalues()
                            .minCoeff();
      good = good && w.lambda_min > 0 && lo > 0 && hi < 0;
    }
    ok = good;
    return good ? "ok" : "violated";
  });

  H.check("domain constant respects the attitude bound", [&](bool& ok) {
    const DomainConstants d = domain_constants(gains, 0.3, 5.0);
    const double bound = (gains.beta1 + 1) * 0.09 / (2 * gains.beta2);
    ok = d.c_xi < bound && d.c_rho > 0 && d.rho_max > 0;
    return "c_xi " + sci(d.c_xi) + " < " + sci(bound);
  });

  H.check("RK4 global error ratio when halving the step", [&](bool& ok) {
    const double ratio = rk4_global_error(0.1) / rk4_global_error(0.05);
    ok = ratio >= 12 && ratio <= 20;
    return "ratio " + sci(ratio);
  });

  H.check("RK4 single step of x' = x", [&](bool& ok) {
    auto f = [](double, const Eigen::Matrix<double, 1, 1>& x) { return x; };
    const Eigen::Matrix<double, 1, 1> x = rk4_step(f, Eigen::Matrix<double, 1, 1>(1.0), 0.0, 0.1);
    const double err = std::abs(x[0] - 1.10517083);
    ok = err < 1e-8;
    return "deviation " + sci(err);
  });

  H.check("observer gains reject non-Hurwitz coefficients", [&](bool& ok) {
    try {
      build_gains({-1, 1, 1}, {3, 3, 1}, {4, 6, 4, 1}, 0.01);
      ok = false;
      return std::string("no error raised");
    } catch (const NotHurwitz& e) {
      ok = e.block() == "rho";
      return std::string("NotHurwitz in block ") + e.block();
    }
  });

  H.check("observer injection vanishes at the true state", [&](bool& ok) {
    const MixingMatrix mixer = build_mixer(params);
    const ObserverGains g = build_gains(0.01);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      MeasurementFrame m;
      m.p1_meas = H.vec(-3, 3);
      m.theta1_meas = Vec3(H.uni(-0.5, 0.5), H.uni(-0.5, 0.5), H.uni(-3, 3));
      m.xc1_meas = H.vec(-3, 3);
      ObserverInput in;
      in.theta_r = Vec3(H.uni(-0.5, 0.5), H.uni(-0.5, 0.5), 0.0);
      in.omega_des = hover_rates(params, mixer);
      ObserverState obs;
      obs.omega_hat = in.omega_des;
      for (int k = 0; k < kExtendedStates; ++k) obs.chi_hat[k] = H.uni(-1, 1);
      const auto y = observer_outputs(m, in);
      obs.chi_hat.segment<3>(slot::rho1) = y.segment<3>(0);
      obs.chi_hat.segment<3>(slot::xi1) = y.segment<3>(3);
      obs.chi_hat.segment<3>(slot::xc1) = y.segment<3>(6);
      const ExtendedVector with = observer_derivative(obs, m, in, g, params, mixer).chi_hat_dot;
      ObserverGains zero = g;
      zero.H.setZero();
      const ExtendedVector without = observer_derivative(obs, m, in, zero, params, mixer).chi_hat_dot;
      worst = std::max(worst, (with - without).cwiseAbs().maxCoeff());
    }
    ok = worst < 1e-9;
    return "max injection " + sci(worst);
  });

  H.check("scaled error power bookkeeping", [&](bool& ok) {
    const ObserverGains g = build_gains(0.1);
    ExtendedVector chi = ExtendedVector::Zero(), hat = ExtendedVector::Zero();
    chi[slot::rho1] = 0.01;
    chi[slot::xc1] = 0.001;
    const ExtendedVector eta = scaled_error(chi, hat, g);
    const double err = std::abs(eta[slot::rho1] - 1.0) + std::abs(eta[slot::xc1] - 1.0);
    ok = err < 1e-12;
    return "deviation " + sci(err);
  });

  H.check("signal derivatives match finite differences", [&](bool& ok) {
    const Signal s = Signal::parse("0.5*sin(2*t + 1) - t^2 + 3*cos(t)*sin(t)");
    const Signal d = s.derivative();
    double worst = 0.0;
    const double h = 1e-6;
    for (int i = 0; i < 40; ++i) {
      const double t = 0.25 * i;
      worst = std::max(worst, std::abs((s(t + h) - s(t - h)) / (2 * h) - d(t)));
    }
    ok = worst < 1e-6;
    return "max deviation " + sci(worst);
  });

  H.check("quintic descent blend endpoints", [&](bool& ok) {
    const auto a = quintic_blend(0.0), b = quintic_blend(1.0), m = quintic_blend(0.5);
    ok = a[0] == 0.0 && b[0] == 1.0 && std::abs(m[0] - 0.5) < 1e-15 && a[1] == 0 && b[1] == 0 &&
         a[2] == 0 && b[2] == 0;
    return ok ? "ok" : "violated";
  });

  H.check("closed loop holds a hover equilibrium", [&](bool& ok) {
    ScenarioConfig cfg = load_config("hover_smoke", {"sim.duration=0.5"});
    const SimLog log = run_scenario(cfg);
    double worst = 0.0;
    for (const SimRecord& r : log.records) {
      worst = std::max(worst, r.chi.segment<3>(slot::rho1).norm() + r.chi.segment<3>(slot::xi1).norm());
    }
    ok = worst < 1e-8;
    return "max tracking error " + sci(worst);
  });

  H.check("identical seeds give identical logs", [&](bool& ok) {
    ScenarioConfig cfg = load_config("paper_landing", {"sim.duration=0.3"});
    const std::string a = log_csv(run_scenario(cfg));
    const std::string b = log_csv(run_scenario(cfg));
    ok = a == b;
    return ok ? "byte-identical" : "logs differ";
  });

  return H.results;
}

std::string format_report(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  int passed = 0;
  for (const CheckResult& r : results) {
    os << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    passed += r.passed ? 1 : 0;
  }
  os << passed << '/' << results.size() << " checks passed\n";
  return os.str();
}

}  // namespace ehgo
