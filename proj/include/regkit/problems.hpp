#pragma once

#include "regkit/operators.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace regkit {

enum class Family { DiagonalPower, Hilbert, FredholmGauss, CounterexampleT8 };

std::string to_string(Family family);
/// Throws PreconditionError naming the valid families.
Family parse_family(std::string_view name);

struct ProblemSpec {
  Family family = Family::DiagonalPower;
  Eigen::Index size = 100;
  double power_p = 1.0;               // diagonal family: d_k = k^{−p}
  std::optional<double> source_gamma; // y = |A|^γ z with ‖z‖ = 1
  std::uint64_t seed = 0;
  double sigma = 0.1;                 // Gaussian kernel width

  void validate() const;
};

/// Builds A, a unit-norm exact solution y ⟂ N(A) (or y = |A|^γ z) and f = A y.
ForwardProblem generate(const ProblemSpec& spec);

/// f_δ = f + δ e/‖e‖ with e standard normal under `seed`.
NoisyData add_noise(const ForwardProblem& problem, double delta, std::uint64_t seed);

/// Checks ‖A y − f‖ ≤ 1e−12 max(1, ‖f‖) and ‖P_N y‖ ≤ 1e−10 ‖y‖. Throws
/// InconsistentDataError on violation.
void check_problem(const ForwardProblem& problem);

struct CounterexampleResult {
  double a = 0.0;
  double ratio = 0.0;         // δ / √a
  double relative_residual = 0.0;
  double series = 0.0;        // Σ_j j⁻² / (j⁻¹ + a)² at the root (tail included)
};

/// Σ_{j=1}^{J} 1/(1 + a j)² plus, when requested, the tail ∫_J^∞ dj/(1 + a j)²
/// = 1/(a(1 + aJ)).
double counterexample_series(double a, long terms, bool tail_correction = true);

/// Solves C²δ²/a² = Σ_j j⁻²/(j⁻¹ + a)² (eigenvalues 1/j, |f_δj|² = 1/j²) for a.
CounterexampleResult counterexample_t8(long terms, double C, double delta,
                                       bool tail_correction = true);

}  // namespace regkit
