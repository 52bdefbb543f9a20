#pragma once

namespace regkit {

/// Regularization schedule a(t) driving the DSM flows.
class Schedule {
 public:
  enum class Kind { Constant, Power, TauPower };

  /// a(t) = a_const.
  static Schedule constant(double a_const);
  /// a(t) = c0 / (c1 + t)^b with c0, c1 > 0 and 1/2 < b < 1.
  static Schedule power(double c0, double c1, double b);
  /// a(τ) = τ^{−γ}, 0 < γ < 1; used to pick a constant a from a horizon τ.
  static Schedule tau_power(double gamma);

  Kind kind() const { return kind_; }
  double c0() const { return c0_; }
  double c1() const { return c1_; }
  double b_exp() const { return b_; }
  double gamma() const { return gamma_; }
  double a_const() const { return a_const_; }

  double value(double t) const;
  /// ȧ(t).
  double derivative(double t) const;
  /// ä(t).
  double second_derivative(double t) const;
  /// ∫_s^t a(p) dp in closed form.
  double integral(double s, double t) const;
  /// The t ≥ 0 with a(t) = a. Throws when a lies outside (0, a(0)].
  double inverse(double a) const;

  /// Decaying, twice differentiable, ä > 0 and ȧ/a → 0 (power kind only).
  bool supports_discrepancy_stop() const { return kind_ == Kind::Power; }

 private:
  Schedule() = default;
  Kind kind_ = Kind::Constant;
  double c0_ = 1.0;
  double c1_ = 1.0;
  double b_ = 0.75;
  double gamma_ = 0.5;
  double a_const_ = 1.0;
};

}  // namespace regkit
