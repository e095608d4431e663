#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ehgo/controller.hpp"
#include "ehgo/dynamics.hpp"
#include "ehgo/sim.hpp"

namespace ehgo {

struct LyapunovCertificate {
  Eigen::MatrixXd P;
  double residual_norm = 0.0;  // Frobenius norm of P A + A^T P + I
  double lambda_min = 0.0;
  double lambda_max = 0.0;
};

/// Solves P A + A^T P = -I for symmetric P by vectorizing its independent
/// entries. Throws NotHurwitz if A has an eigenvalue with Re >= 0 and
/// IllConditioned if the residual exceeds 1e-10.
LyapunovCertificate solve_lyapunov(const Eigen::MatrixXd& A);

/// Error dynamics [e1; e2]' = [[0, I], [-k1 I, -k2 I]] [e1; e2] (6 x 6).
Eigen::MatrixXd second_order_error_matrix(double k1, double k2);

struct DomainConstants {
  double delta = 0.0;
  double c_xi = 0.0;
  double c_rho = 0.0;
  double rho_max = 0.0;
  double L_e = 0.0;
  LyapunovCertificate p_xi;
  LyapunovCertificate p_rho;
};

/// Sublevel-set constants that keep the attitude errors within delta.
DomainConstants domain_constants(const ControlGains& gains, double delta, double L_e);

/// Largest |e(theta_r, xi1)| / |xi1| found over the given attitude
/// references and over error vectors with |xi1| <= delta, where
/// e = -(u/m)(r3(theta_r + xi1) - r3(theta_r)). No safety margin applied.
double lipschitz_e_theta_over(const std::vector<Vec3>& theta_r_samples, double mass,
                              double u_f_max, double delta);

/// Grid estimate over roll/pitch references with |phi|, |theta| <= pi/2 - delta,
/// times a 1.1 margin.
double estimate_lipschitz_e_theta(const VehicleParams& params, double u_f_max, double delta);

struct CascadeWeight {
  double b = 0.0;
  double bound = 0.0;  // 4 c c3 / (k L)^2
  Eigen::Matrix2d Q = Eigen::Matrix2d::Zero();
  double lambda_min = 0.0;
};

/// Q(b) = [[b c, -b k L / 2], [-b k L / 2, c3]].
Eigen::Matrix2d cascade_q(double b, double c, double k, double L, double c3);

/// Weight at half the bound that keeps Q positive definite.
CascadeWeight cascade_weight(double c, double k, double L, double c3);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y,
                    double* intercept = nullptr);

struct SweepPoint {
  double epsilon = 0.0;
  bool diverged = false;
  std::string note;
  double steady_error = 0.0;            // RMS of |chi - chi_hat| over the final 25%
  std::array<double, 3> block_error{};  // same, per observer block
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Runs the output-feedback scenario once per epsilon without measurement
/// noise (the disturbance of `base` is kept) and fits the log-log slope of
/// the steady estimation error. Diverged runs are reported and skipped; the
/// fit needs at least three survivors. Parallelism is capped by the
/// EHGO_SIM_THREADS environment variable.
SweepResult epsilon_sweep(const ScenarioConfig& base, const std::vector<double>& epsilons);

struct CertifyOptions {
  double settle_time = 0.0;      // decrease fraction counted from here
  double floor_relative = 1e-12; // ... until V drops below this fraction of V(0)
};

struct CertificateReport {
  std::vector<std::size_t> invariance_violations;  // record indices
  std::ptrdiff_t first_entry = -1;                 // first index with V_xi <= c_xi
  double decrease_fraction = 0.0;
  std::size_t decrease_samples = 0;
  double decay_rate = 0.0;  // fitted over the first 25% of the log
  double d1 = 0.0;          // weight of V_rho in the composite function
  std::vector<double> v_xi, v_rho, v_sf;
};

/// Evaluates V_xi, V_rho and V_sf = d1 V_rho + V_xi on the true extended
/// states of a log. `d1` is typically cascade_weight(...).b.
CertificateReport certify_log(const SimLog& log, const DomainConstants& constants, double d1,
                              const CertifyOptions& options = {});

}  // namespace ehgo
