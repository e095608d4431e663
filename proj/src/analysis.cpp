#include "ehgo/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include "ehgo/errors.hpp"

namespace ehgo {

LyapunovCertificate solve_lyapunov(const Eigen::MatrixXd& A) {
  const Eigen::Index n = A.rows();
  if (n == 0 || A.cols() != n) throw ValidationError("A", "square and non-empty");
  const Eigen::VectorXcd eig = A.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(eig[i].real() < 0.0)) throw NotHurwitz("A", eig[i].real(), eig[i].imag());
  }

  // Unknowns: P(i, j) for i <= j. Equations: the same entries of P A + A^T P.
  const Eigen::Index m = n * (n + 1) / 2;
  auto index = [n](Eigen::Index i, Eigen::Index j) {
    if (i > j) std::swap(i, j);
    return i * n - i * (i - 1) / 2 + (j - i);
  };
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const Eigen::Index row = index(i, j);
      // (P A)_ij = sum_k P_ik A_kj ; (A^T P)_ij = sum_k A_ki P_kj
      for (Eigen::Index k = 0; k < n; ++k) {
        M(row, index(i, k)) += A(k, j);
        M(row, index(k, j)) += A(k, i);
      }
      rhs[row] = (i == j) ? -1.0 : 0.0;
    }
  }
  const Eigen::VectorXd p = M.fullPivLu().solve(rhs);

  LyapunovCertificate cert;
  cert.P.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) cert.P(i, j) = p[index(i, j)];
  }
  cert.residual_norm =
      (cert.P * A + A.transpose() * cert.P + Eigen::MatrixXd::Identity(n, n)).norm();
  if (!(cert.residual_norm <= 1e-10)) {
    throw IllConditioned("Lyapunov residual " + std::to_string(cert.residual_norm) +
                         " exceeds 1e-10");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cert.P);
  cert.lambda_min = es.eigenvalues().minCoeff();
  cert.lambda_max = es.eigenvalues().maxCoeff();
  if (!(cert.lambda_min > 0.0)) throw IllConditioned("Lyapunov solution is not positive definite");
  return cert;
}

Eigen::MatrixXd second_order_error_matrix(double k1, double k2) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6);
  A.topRightCorner<3, 3>().setIdentity();
  A.bottomLeftCorner<3, 3>() = -k1 * Mat3::Identity();
  A.bottomRightCorner<3, 3>() = -k2 * Mat3::Identity();
  return A;
}

DomainConstants domain_constants(const ControlGains& gains, double delta, double L_e) {
  gains.validate();
  if (!(delta > 0.0 && delta < M_PI / 2)) throw ValidationError("delta", "in (0, pi/2)");
  if (!(L_e > 0.0)) throw ValidationError("L_e", "> 0");
  DomainConstants d;
  d.delta = delta;
  d.L_e = L_e;
  d.p_xi = solve_lyapunov(second_order_error_matrix(gains.beta1, gains.beta2));
  d.p_rho = solve_lyapunov(second_order_error_matrix(gains.gamma1, gains.gamma2));
  d.c_xi = 0.9 * (gains.beta1 + 1.0) * delta * delta / (2.0 * gains.beta2);
  d.rho_max = 2.0 * L_e * delta * d.p_rho.lambda_max;
  d.c_rho = d.p_rho.lambda_max * d.rho_max * d.rho_max;
  return d;
}

double lipschitz_e_theta_over(const std::vector<Vec3>& theta_r_samples, double mass,
                              double u_f_max, double delta) {
  if (u_f_max == 0.0) return 0.0;
  // Error directions: the 26 neighbours of the origin on the unit cube.
  std::vector<Vec3> dirs;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -1; c <= 1; ++c) {
        if (a || b || c) dirs.push_back(Vec3(a, b, c).normalized());
      }
    }
  }
  const double radii[] = {1.0, 0.5, 0.25, 1e-1, 1e-2, 1e-4};
  double best = 0.0;
  for (const Vec3& tr : theta_r_samples) {
    const Vec3 base = r3(tr);
    for (double scale : radii) {
      const double r = scale * delta;
      for (const Vec3& u : dirs) {
        const double ratio = (r3(tr + r * u) - base).norm() / r;
        best = std::max(best, ratio);
      }
    }
  }
  return u_f_max / mass * best;
}

double estimate_lipschitz_e_theta(const VehicleParams& params, double u_f_max, double delta) {
  if (!(delta > 0.0 && delta < M_PI / 2)) throw ValidationError("delta", "in (0, pi/2)");
  if (!(u_f_max >= 0.0)) throw ValidationError("u_f_max", ">= 0");
  const double limit = M_PI / 2 - delta;
  constexpr int kGrid = 13;
  std::vector<Vec3> samples;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double phi = -limit + 2.0 * limit * i / (kGrid - 1);
      const double theta = -limit + 2.0 * limit * j / (kGrid - 1);
      samples.emplace_back(phi, theta, 0.0);
    }
  }
  return 1.1 * lipschitz_e_theta_over(samples, params.mass, u_f_max, delta);
}

Eigen::Matrix2d cascade_q(double b, double c, double k, double L, double c3) {
  Eigen::Matrix2d Q;
  Q << b * c, -b * k * L / 2.0, -b * k * L / 2.0, c3;
  return Q;
}

CascadeWeight cascade_weight(double c, double k, double L, double c3) {
  if (!(c > 0 && k > 0 && L > 0 && c3 > 0)) throw ValidationError("cascade inputs", "all > 0");
  CascadeWeight w;
  w.bound = 4.0 * c * c3 / ((k * L) * (k * L));
  w.b = 0.5 * w.bound;
  w.Q = cascade_q(w.b, c, k, L, c3);
  w.lambda_min = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(w.Q).eigenvalues().minCoeff();
  return w;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y, double* intercept) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit data", "two or more pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (intercept) *intercept = (sy - slope * sx) / n;
  return slope;
}

namespace {

unsigned sweep_threads(std::size_t jobs) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EHGO_SIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) cap = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::min<std::size_t>(cap, jobs));
}

}  // namespace

SweepResult epsilon_sweep(const ScenarioConfig& base, const std::vector<double>& epsilons) {
  if (epsilons.size() < 3) throw ValidationError("epsilons", "at least three values");
  for (double e : epsilons) {
    if (!(e > 0.0 && e < 1.0)) throw ValidationError("epsilons", "every value in (0, 1)");
  }

  ScenarioConfig cfg = base;
  cfg.mode = ControlMode::output_feedback;
  cfg.noise = NoiseStd{0.0, 0.0, 0.0};
  if (!cfg.saturation.bounds) {
    // The bounds come from state feedback and do not depend on epsilon.
    ScenarioConfig pre = cfg;
    pre.mode = ControlMode::state_feedback;
    cfg.saturation.bounds =
        bounds_from_log(run_scenario(pre), cfg.saturation.scale, cfg.saturation.floor);
  }

  SweepResult result;
  result.points.resize(epsilons.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < epsilons.size(); i = next++) {
      SweepPoint& pt = result.points[i];
      pt.epsilon = epsilons[i];
      ScenarioConfig run = cfg;
      run.observer.epsilon = epsilons[i];
      run.step = std::min(cfg.step, epsilons[i] / 5.0);
      try {
        const Metrics m = compute_metrics(run_scenario(run));
        pt.steady_error = m.estimation_rms_total;
        pt.block_error = m.estimation_rms;
      } catch (const Diverged& e) {
        pt.diverged = true;
        pt.note = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned threads = sweep_threads(epsilons.size());
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<double> xs, ys;
  for (const SweepPoint& pt : result.points) {
    if (pt.diverged) {
      std::cerr << "warning: epsilon " << pt.epsilon << " excluded: " << pt.note << '\n';
      continue;
    }
    xs.push_back(pt.epsilon);
    ys.push_back(pt.steady_error);
  }
  if (xs.size() < 3) throw Error("epsilon sweep: fewer than three runs survived");
  result.slope = loglog_slope(xs, ys, &result.intercept);
  return result;
}

CertificateReport certify_log(const SimLog& log, const DomainConstants& constants, double d1,
                              const CertifyOptions& options) {
  CertificateReport rep;
  rep.d1 = d1;
  const auto& rec = log.records;
  const std::size_t n = rec.size();
  rep.v_xi.resize(n);
  rep.v_rho.resize(n);
  rep.v_sf.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    Eigen::Matrix<double, 6, 1> xi, rho;
    xi << rec[k].chi.segment<3>(slot::xi1), rec[k].chi.segment<3>(slot::xi2);
    rho << rec[k].chi.segment<3>(slot::rho1), rec[k].chi.segment<3>(slot::rho2);
    rep.v_xi[k] = xi.dot(constants.p_xi.P * xi);
    rep.v_rho[k] = rho.dot(constants.p_rho.P * rho);
    rep.v_sf[k] = d1 * rep.v_rho[k] + rep.v_xi[k];
  }
  if (n == 0) return rep;

  for (std::size_t k = 0; k < n; ++k) {
    if (rep.first_entry < 0) {
      if (rep.v_xi[k] <= constants.c_xi) rep.first_entry = static_cast<std::ptrdiff_t>(k);
    } else if (rep.v_xi[k] > constants.c_xi) {
      rep.invariance_violations.push_back(k);
    }
  }

  const double floor = options.floor_relative * rep.v_sf[0];
  std::size_t decreasing = 0;
  for (std::size_t k = 1; k < n; ++k) {
    if (rec[k].t < options.settle_time) continue;
    if (rep.v_sf[k - 1] <= floor) break;
    ++rep.decrease_samples;
    if (rep.v_sf[k] < rep.v_sf[k - 1]) ++decreasing;
  }
  rep.decrease_fraction =
      rep.decrease_samples ? static_cast<double>(decreasing) / rep.decrease_samples : 0.0;

  // Fit log V = a - rate t over the first quarter, above the floor.
  const std::size_t end = std::max<std::size_t>(2, n / 4);
  double st = 0, sv = 0, stt = 0, stv = 0, m = 0;
  for (std::size_t k = 0; k < std::min(end, n); ++k) {
    if (!(rep.v_sf[k] > floor && rep.v_sf[k] > 0)) continue;
    const double t = rec[k].t, lv = std::log(rep.v_sf[k]);
    st += t;
    sv += lv;
    stt += t * t;
    stv += t * lv;
    m += 1;
  }
  if (m >= 2) rep.decay_rate = -(m * stv - st * sv) / (m * stt - st * st);
  return rep;
}

}  // namespace ehgo
