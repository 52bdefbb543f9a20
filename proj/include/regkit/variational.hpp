#pragma once

#include "regkit/operators.hpp"
#include "regkit/report.hpp"
#include "regkit/spectral.hpp"

#include <functional>
#include <optional>
#include <utility>

namespace regkit {

/// Constants of the discrepancy principle ‖A u_{a,δ} − f_δ‖ = Cδ.
struct DiscrepancyConfig {
  double C = 1.5;           // 1 < C < 2
  double b_slack = 0.5;     // relaxed variant requires C² > 1 + b_slack
  double root_tol = 1e-10;  // relative tolerance on a
  /// Search bracket for a; defaults to (1e−16·s_max, 1e4·s_max).
  std::optional<std::pair<double, double>> bracket;

  /// Throws PreconditionError when the constants are out of range.
  void validate() const;
};

/// F(u) = ‖A u − f‖² + a‖u‖².
double tikhonov_functional(const LinearOperator& op, const Vector& f, double a, const Vector& u);

/// u_{a,δ} = T_a⁻¹ Aᵀ f_δ.
SolveReport tikhonov(const LinearOperator& op, const NoisyData& noisy, double a,
                     RegularizedSolveOptions opts = {});

/// a = δ^γ, 0 < γ < 1.
double apriori_a(double delta, double gamma);

/// Root of h(a, δ) = C²δ² by bisection on log a.
double discrepancy_a(const SpectralModel& model, const NoisyData& noisy,
                     const DiscrepancyConfig& cfg);

/// Tikhonov solution at the discrepancy root. δ = 0 falls back to the
/// minimal-norm solution.
SolveReport discrepancy_solve(const LinearOperator& op, const SpectralModel& model,
                              const NoisyData& noisy, const DiscrepancyConfig& cfg);

/// Result of an approximate minimization of F for a fixed a.
struct InnerResult {
  Vector u;
  long iterations = 0;
};

/// Approximate minimizer: given a and the admissible F-value m + (C²−1−b)δ²,
/// returns some u.
using InnerSolver = std::function<InnerResult(double a, double f_target)>;

/// Exact spectral minimizer of F.
InnerSolver exact_inner_solver(const SpectralModel& model, const Vector& f_delta);

/// Conjugate gradients on T_a u = Aᵀf_δ from u = 0, stopped at the first
/// iterate whose F-value meets the target.
InnerSolver truncated_cg_inner_solver(const LinearOperator& op, const Vector& f_delta,
                                      long max_iterations = 0);

/// Discrepancy principle for approximate minimizers: finds a with
/// ‖A u_{a,δ} − f_δ‖ = Cδ where u_{a,δ} comes from `inner` and is certified
/// against F(u) ≤ m + (C² − 1 − b)δ² at every evaluated a.
SolveReport relaxed_discrepancy(const LinearOperator& op, const SpectralModel& model,
                                const NoisyData& noisy, const DiscrepancyConfig& cfg,
                                const InnerSolver& inner);

}  // namespace regkit
