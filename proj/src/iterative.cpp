#include "regkit/iterative.hpp"

#include "regkit/errors.hpp"
#include "regkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace regkit {

IterationState iterate(const LinearOperator& op, const SpectralModel& model,
                       const NoisyData& noisy, double a, const Vector& u1, long n_max,
                       const std::optional<Vector>& reference) {
  if (u1.size() != op.cols()) throw DimensionError("iterate: initial element has wrong length");
  if (n_max < 1) throw PreconditionError("iterate: n_max must be at least 1");
  const double null_part = model.null_component_norm(u1);
  if (null_part > 1e-10 * std::max(1.0, u1.norm()))
    throw PreconditionError("initial element has a null-space component of norm " +
                            std::to_string(null_part) + "; convergence requires u₁ ⟂ N(A)");

  const RegularizedSolver solver(op, a);
  const Vector rhs = op.apply_adjoint(noisy.data);

  IterationState state;
  state.a = a;
  state.iterate = u1;
  state.index = 1;
  if (reference) state.error_history.emplace(1, (u1 - *reference).norm());
  state.diff_history.reserve(static_cast<std::size_t>(n_max - 1));

  for (long n = 1; n < n_max; ++n) {
    Vector next = solver.solve(a * state.iterate + rhs);
    state.diff_history.push_back((next - state.iterate).norm());
    state.iterate = std::move(next);
    state.index = n + 1;
    if (reference) state.error_history->push_back((state.iterate - *reference).norm());
  }
  return state;
}

double error_decay(const SpectralModel& model, const Vector& w, double a, long n) {
  if (!(a > 0.0)) throw PreconditionError("error_decay: a must be positive");
  const Vector c = model.coefficients(w);
  std::vector<double> terms(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double q = a / (a + model.eigenvalues(k));
    terms[k] = std::pow(q, 2.0 * static_cast<double>(n)) * c(k) * c(k);
  }
  return std::sqrt(std::max(0.0, spectral_sum(std::move(terms))));
}

std::vector<double> oracle_error_profile(const SpectralModel& model, const Vector& w, double a,
                                         long n_max) {
  if (!(a > 0.0)) throw PreconditionError("error profile: a must be positive");
  const Vector c = model.coefficients(w);
  std::vector<double> ratio(c.size());
  std::vector<double> terms(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double q = a / (a + model.eigenvalues(k));
    ratio[k] = q * q;
    terms[k] = c(k) * c(k);
  }
  std::vector<double> profile;
  profile.reserve(static_cast<std::size_t>(n_max + 1));
  for (long n = 0; n <= n_max; ++n) {
    profile.push_back(std::sqrt(std::max(0.0, spectral_sum(terms))));
    for (std::size_t k = 0; k < terms.size(); ++k) terms[k] *= ratio[k];
  }
  return profile;
}

std::vector<double> surrogate_error_profile(std::span<const double> diff_history) {
  std::vector<double> out;
  out.reserve(diff_history.size());
  for (std::size_t n = 0; n < diff_history.size(); ++n) {
    const std::size_t prev = n > 0 ? n - 1 : 0;
    const std::size_t cur = n > 0 ? n : std::min<std::size_t>(1, diff_history.size() - 1);
    double q = diff_history[prev] > 0.0 ? diff_history[cur] / diff_history[prev] : 0.0;
    q = std::clamp(q, 0.0, 0.999);
    out.push_back(diff_history[n] / (1.0 - q));
  }
  return out;
}

namespace {

void check_stopping_inputs(std::span<const double> profile, double delta, double a) {
  if (profile.empty()) throw PreconditionError("stopping rule: empty search range");
  if (!(delta > 0.0)) throw PreconditionError("stopping rule needs δ > 0");
  if (!(a > 0.0)) throw PreconditionError("stopping rule needs a > 0");
}

}  // namespace

long stopping_minimize(std::span<const double> error_profile, double delta, double a) {
  check_stopping_inputs(error_profile, delta, a);
  const double slope = delta / (2.0 * std::sqrt(a));
  long best = 0;
  double best_value = slope + error_profile[0];
  for (std::size_t n = 1; n < error_profile.size(); ++n) {
    const double value = static_cast<double>(n + 1) * slope + error_profile[n];
    if (value < best_value) {
      best_value = value;
      best = static_cast<long>(n);
    }
  }
  return best;
}

long stopping_balance(std::span<const double> error_profile, double delta, double a) {
  check_stopping_inputs(error_profile, delta, a);
  const double slope = delta / (2.0 * std::sqrt(a));
  for (std::size_t n = 0; n < error_profile.size(); ++n)
    if (error_profile[n] <= static_cast<double>(n + 1) * slope) return static_cast<long>(n);
  const std::size_t last = error_profile.size() - 1;
  throw ConvergenceError("no crossing E(n) = (n+1)δ/(2√a) up to n = " + std::to_string(last) +
                         "; final gap " +
                         std::to_string(error_profile[last] - static_cast<double>(last + 1) * slope));
}

SolveReport iterate_with_stopping(const LinearOperator& op, const SpectralModel& model,
                                  const NoisyData& noisy, const IterationParams& params,
                                  const std::optional<Vector>& reference) {
  if (!(noisy.delta > 0.0)) throw PreconditionError("iteration stopping rules need δ > 0");
  const double a = params.a.value_or(model.max_eigenvalue() > 0.0 ? model.max_eigenvalue() : 1.0);
  const Vector u1 = Vector::Zero(op.cols());

  std::vector<double> profile;
  std::string notice;
  if (reference) {
    profile = oracle_error_profile(model, u1 - *reference, a, params.n_max);
  } else {
    const IterationState probe = iterate(op, model, noisy, a, u1, params.n_max + 1);
    profile = surrogate_error_profile(probe.diff_history);
    notice = "heuristic: E(n) estimated from successive differences";
  }
  const long n = params.rule == StoppingRule::Minimize ? stopping_minimize(profile, noisy.delta, a)
                                                       : stopping_balance(profile, noisy.delta, a);
  IterationState state = iterate(op, model, noisy, a, u1, n + 1);

  SolveReport rep;
  rep.method = params.rule == StoppingRule::Minimize ? "iterate_min" : "iterate_balance";
  rep.solution = std::move(state.iterate);
  rep.a_chosen = a;
  rep.stop_index = n;
  rep.inner_iterations = n;
  rep.notice = notice;
  rep.evaluate(op, noisy.data);
  if (reference) rep.set_reference(*reference);
  return rep;
}

}  // namespace regkit
