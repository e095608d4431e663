#include "ehgo/observer.hpp"

#include <cmath>

#include "ehgo/errors.hpp"

namespace ehgo {

namespace {

struct Block {
  int first_state;  // index of the block's first extended state
  int output;       // index of the block's output in y
  int order;
};

constexpr std::array<Block, 3> kBlocks{{{0, 0, 3}, {9, 3, 3}, {18, 6, 4}}};

void check_hurwitz(const std::string& name, const Eigen::VectorXd& coefficients) {
  const Eigen::VectorXcd roots = polynomial_roots(coefficients);
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    if (!(roots[i].real() < 0.0)) throw NotHurwitz(name, roots[i].real(), roots[i].imag());
  }
}

template <std::size_t N>
Eigen::VectorXd to_vector(const std::array<double, N>& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(N));
  for (std::size_t i = 0; i < N; ++i) v[static_cast<Eigen::Index>(i)] = a[i];
  return v;
}

}  // namespace

Eigen::VectorXcd polynomial_roots(const Eigen::VectorXd& c) {
  const Eigen::Index n = c.size();
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  companion.row(0) = -c.transpose();
  if (n > 1) companion.bottomLeftCorner(n - 1, n - 1).setIdentity();
  return companion.eigenvalues();
}

ObserverGains build_gains(const std::array<double, 3>& alpha_rho,
                          const std::array<double, 3>& alpha_xi,
                          const std::array<double, 4>& alpha_xc, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ValidationError("observer.epsilon", "in (0, 1)");
  check_hurwitz("rho", to_vector(alpha_rho));
  check_hurwitz("xi", to_vector(alpha_xi));
  check_hurwitz("xc", to_vector(alpha_xc));

  ObserverGains g;
  g.alpha_rho = alpha_rho;
  g.alpha_xi = alpha_xi;
  g.alpha_xc = alpha_xc;
  g.epsilon = epsilon;
  const std::array<Eigen::VectorXd, 3> alphas{to_vector(alpha_rho), to_vector(alpha_xi),
                                              to_vector(alpha_xc)};
  for (std::size_t b = 0; b < kBlocks.size(); ++b) {
    const Block& blk = kBlocks[b];
    for (int j = 0; j < blk.order; ++j) {
      const double gain = alphas[b][j] / std::pow(epsilon, j + 1);
      g.H.block<3, 3>(blk.first_state + 3 * j, blk.output) = gain * Mat3::Identity();
    }
  }
  return g;
}

ObserverGains build_gains(double epsilon) {
  const ObserverGains d;
  return build_gains(d.alpha_rho, d.alpha_xi, d.alpha_xc, epsilon);
}

Eigen::Matrix<double, kObserverOutputs, 1> observer_outputs(const MeasurementFrame& meas,
                                                            const ObserverInput& input) {
  Eigen::Matrix<double, kObserverOutputs, 1> y;
  y << meas.p1_meas - meas.xc1_meas - input.pr_offset, attitude_error(meas.theta1_meas, input.theta_r),
      meas.xc1_meas;
  return y;
}

ObserverDerivative observer_derivative(const ObserverState& obs, const MeasurementFrame& meas,
                                       const ObserverInput& input, const ObserverGains& gains,
                                       const VehicleParams& params, const MixingMatrix& mixer) {
  const ExtendedVector& x = obs.chi_hat;
  const Vec3& theta1 = meas.theta1_meas;

  // Simulated wrench from the simulated rotor rates.
  const Wrench w = mix_forward(obs.omega_hat, mixer, params.thrust_coefficient);
  const Vec3 tau(w[1], w[2], w[3]);

  ExtendedVector dx = ExtendedVector::Zero();
  // Chain structure: every state but the last of each block integrates the next.
  for (const Block& blk : kBlocks) {
    for (int j = 0; j + 1 < blk.order; ++j) {
      dx.segment<3>(blk.first_state + 3 * j) = x.segment<3>(blk.first_state + 3 * (j + 1));
    }
  }

  // Translational block: rho2' = g e_z - p_r'' - (u/m) r3 + sigma_rho.
  const Vec3 pr_ddot = x.segment<3>(slot::xc3) + input.pr_offset_accel;
  dx.segment<3>(slot::rho2) += kGravity * Vec3::UnitZ() - pr_ddot - (w[0] / params.mass) * r3(theta1);

  // Rotational block: xi2' = f(xi_hat, theta1, thetar_dot_bar) + G tau + varsigma.
  const Vec3 rates = x.segment<3>(slot::xi2) + input.thetar_dot_bar;
  dx.segment<3>(slot::xi2) +=
      euler_rate_drift(theta1, rates, params) + rotational_input_matrix(theta1, params) * tau;

  const Eigen::Matrix<double, kObserverOutputs, 1> y = observer_outputs(meas, input);
  Eigen::Matrix<double, kObserverOutputs, 1> y_hat;
  y_hat << x.segment<3>(slot::rho1), x.segment<3>(slot::xi1), x.segment<3>(slot::xc1);
  Eigen::Matrix<double, kObserverOutputs, 1> residual = y - y_hat;
  residual[5] = wrap_angle(residual[5]);  // yaw
  dx += gains.H * residual;

  ObserverDerivative out;
  out.chi_hat_dot = dx;
  out.omega_hat_dot = actuator_derivative(obs.omega_hat, input.omega_des, params.tau_m);
  return out;
}

EstimateBundle extract_estimates(const ObserverState& obs) {
  return EstimateBundle::unpack(obs.chi_hat);
}

ExtendedVector scaled_error(const ExtendedVector& chi, const ExtendedVector& chi_hat,
                            const ObserverGains& gains) {
  ExtendedVector eta;
  for (const Block& blk : kBlocks) {
    for (int j = 0; j < blk.order; ++j) {
      const double scale = std::pow(gains.epsilon, blk.order - (j + 1));
      const int i = blk.first_state + 3 * j;
      eta.segment<3>(i) = (chi.segment<3>(i) - chi_hat.segment<3>(i)) / scale;
    }
  }
  return eta;
}

}  // namespace ehgo
