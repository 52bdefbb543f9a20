#pragma once

#include "regkit/operators.hpp"

#include <optional>
#include <string>

namespace regkit {

/// Outcome of one regularized solve.
struct SolveReport {
  Vector solution;                     // real part of u_δ
  std::optional<Vector> solution_imag; // imaginary part, complex flows only
  std::string method;
  double a_chosen = 0.0;               // regularization parameter (a, or a(t_δ) for flows)
  std::optional<double> stop_time;     // t_δ for DSM flows
  std::optional<long> stop_index;      // n(δ) for the stationary iteration
  double residual_norm = 0.0;          // ‖A u_δ − f_δ‖
  std::optional<double> error_norm;    // ‖u_δ − y‖
  double f_value = 0.0;                // F(u_δ) = ‖A u_δ − f_δ‖² + a‖u_δ‖²
  long inner_iterations = 0;
  std::string notice;                  // e.g. degenerate-input fallbacks, heuristic modes

  /// The value reported in the CLI "param" column.
  double parameter() const {
    if (stop_index) return static_cast<double>(*stop_index);
    if (stop_time) return *stop_time;
    return a_chosen;
  }

  double imag_norm() const { return solution_imag ? solution_imag->norm() : 0.0; }

  /// Recomputes residual_norm and f_value from the stored solution.
  void evaluate(const LinearOperator& op, const Vector& f_delta);
  /// Sets error_norm = ‖u_δ − y‖ (imaginary part included).
  void set_reference(const Vector& y);
};

}  // namespace regkit
