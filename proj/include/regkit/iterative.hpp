#pragma once

#include "regkit/operators.hpp"
#include "regkit/report.hpp"
#include "regkit/spectral.hpp"

#include <optional>
#include <span>
#include <vector>

namespace regkit {

/// State of u_{n+1} = B u_n + T_a⁻¹ Aᵀ f_δ with B = a T_a⁻¹.
struct IterationState {
  Vector iterate;  // u_n
  long index = 1;  // n (the initial element is u_1)
  double a = 0.0;
  std::optional<std::vector<double>> error_history;  // ‖u_j − y‖, j = 1..n
  std::vector<double> diff_history;                  // ‖u_{j+1} − u_j‖, j = 1..n−1
};

/// Runs the stationary iteration from u_1 up to u_{n_max}. u_1 must be
/// orthogonal to N(A) to within 1e−10.
IterationState iterate(const LinearOperator& op, const SpectralModel& model,
                       const NoisyData& noisy, double a, const Vector& u1, long n_max,
                       const std::optional<Vector>& reference = std::nullopt);

/// E(n) = ‖Bⁿ w‖ = (Σ_k (a/(a+s_k))^{2n} ⟨w, e_k⟩²)^{1/2}.
double error_decay(const SpectralModel& model, const Vector& w, double a, long n);

/// E(0..n_max) from the spectral formula (oracle mode, y known).
std::vector<double> oracle_error_profile(const SpectralModel& model, const Vector& w, double a,
                                         long n_max);

/// Heuristic E(n) estimate from successive differences d_n = ‖u_{n+1} − u_n‖:
/// E(n) ≈ d_n / (1 − q_n), q_n = d_n / d_{n−1}. Returns one value per difference.
std::vector<double> surrogate_error_profile(std::span<const double> diff_history);

/// argmin over 0 ≤ n < size of (n+1)δ/(2√a) + E(n); ties go to the smallest n.
long stopping_minimize(std::span<const double> error_profile, double delta, double a);

/// Smallest n with E(n) ≤ (n+1)δ/(2√a). Throws ConvergenceError reporting
/// the final gap when no crossing exists in the profile.
long stopping_balance(std::span<const double> error_profile, double delta, double a);

enum class StoppingRule { Minimize, Balance };

struct IterationParams {
  std::optional<double> a;  // default: largest eigenvalue of T
  long n_max = 10000;
  StoppingRule rule = StoppingRule::Minimize;
};

/// Iterates from u_1 = 0 and stops at n(δ). Uses the oracle profile when y is
/// known (`reference`) and the surrogate otherwise. The reported solution is
/// u_{n(δ)+1}, whose distance to y is the quantity the rule balances.
SolveReport iterate_with_stopping(const LinearOperator& op, const SpectralModel& model,
                                  const NoisyData& noisy, const IterationParams& params,
                                  const std::optional<Vector>& reference);

}  // namespace regkit
