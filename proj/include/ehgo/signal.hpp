#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ehgo {

/// Scalar closed-form function of time built from constants, t, sin, cos,
/// integer powers, sums and products. Every signal is smooth and has an
/// analytic derivative, which is itself a Signal.
class Signal {
 public:
  Signal();  // the zero signal

  static Signal constant(double c);
  static Signal time();
  static Signal sin(const Signal& arg);
  static Signal cos(const Signal& arg);
  static Signal pow(const Signal& base, int exponent);

  /// Parses expressions such as "0.5*sin(2*t + 1) - t^2 + 3".
  /// Throws std::invalid_argument with the offending position on error.
  static Signal parse(std::string_view text);

  double operator()(double t) const;
  Signal derivative() const;
  std::string to_string() const;
  bool is_zero() const;

  friend Signal operator+(const Signal& a, const Signal& b);
  friend Signal operator-(const Signal& a, const Signal& b);
  friend Signal operator*(const Signal& a, const Signal& b);
  friend Signal operator-(const Signal& a);

  struct Node;

 private:
  explicit Signal(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Three independent scalar signals; evaluates to a vector.
class VectorSignal {
 public:
  VectorSignal() = default;
  VectorSignal(Signal x, Signal y, Signal z) : axes_{std::move(x), std::move(y), std::move(z)} {}

  Eigen::Vector3d operator()(double t) const;
  VectorSignal derivative() const;
  const Signal& axis(int i) const { return axes_[static_cast<std::size_t>(i)]; }
  std::string to_string() const;

 private:
  std::array<Signal, 3> axes_{};
};

/// Lumped translational (m/s^2) and rotational (rad/s^2) disturbances.
struct Disturbance {
  VectorSignal sigma_rho;
  VectorSignal sigma_xi;

  static Disturbance none() { return {}; }
  /// sigma_xi = (sin t, cos t, sin t), sigma_rho = (cos t, sin t, cos t).
  static Disturbance paper_sinusoids();
};

}  // namespace ehgo
