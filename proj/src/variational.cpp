#include "regkit/variational.hpp"

#include "regkit/errors.hpp"
#include "regkit/numerics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace regkit {

void SolveReport::evaluate(const LinearOperator& op, const Vector& f_delta) {
  double res2 = (op.apply(solution) - f_delta).squaredNorm();
  double norm2 = solution.squaredNorm();
  if (solution_imag) {
    res2 += op.apply(*solution_imag).squaredNorm();
    norm2 += solution_imag->squaredNorm();
  }
  residual_norm = std::sqrt(res2);
  f_value = res2 + a_chosen * norm2;
}

void SolveReport::set_reference(const Vector& y) {
  double e2 = (solution - y).squaredNorm();
  if (solution_imag) e2 += solution_imag->squaredNorm();
  error_norm = std::sqrt(e2);
}

void DiscrepancyConfig::validate() const {
  if (!(C > 1.0 && C < 2.0))
    throw PreconditionError("discrepancy constant C must lie in (1, 2), got " + std::to_string(C));
  if (!(b_slack > 0.0) || !(C * C - 1.0 - b_slack > 0.0))
    throw PreconditionError("slack b must satisfy b > 0 and C² > 1 + b");
  if (!(root_tol > 0.0)) throw PreconditionError("root tolerance must be positive");
  if (bracket && !(bracket->first > 0.0 && bracket->first < bracket->second))
    throw PreconditionError("bracket must satisfy 0 < a_min < a_max");
}

double tikhonov_functional(const LinearOperator& op, const Vector& f, double a, const Vector& u) {
  return (op.apply(u) - f).squaredNorm() + a * u.squaredNorm();
}

SolveReport tikhonov(const LinearOperator& op, const NoisyData& noisy, double a,
                     RegularizedSolveOptions opts) {
  RegularizedSolver solver(op, a, opts);
  SolveReport rep;
  rep.method = "tikhonov";
  rep.a_chosen = a;
  rep.solution = solver.solve(op.apply_adjoint(noisy.data));
  rep.inner_iterations = solver.last_iterations();
  rep.evaluate(op, noisy.data);
  return rep;
}

double apriori_a(double delta, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("a-priori exponent γ must lie in (0, 1), got " + std::to_string(gamma));
  if (!(delta > 0.0)) throw PreconditionError("a-priori rule needs δ > 0");
  return std::pow(delta, gamma);
}

namespace {

void check_discrepancy_preconditions(const SpectralModel& model, const NoisyData& noisy,
                                     const DiscrepancyConfig& cfg) {
  cfg.validate();
  if (!(noisy.delta > 0.0)) throw PreconditionError("discrepancy principle needs δ > 0");
  const double c_delta = cfg.C * noisy.delta;
  if (noisy.data.norm() <= c_delta)
    throw PreconditionError(
        "‖f_δ‖ ≤ Cδ: discrepancy principle inapplicable, data indistinguishable from noise");
  if (model.co_null_component_norm(noisy.data) >= c_delta)
    throw PreconditionError(
        "component of f_δ in N(Aᵀ) is at least Cδ: the discrepancy equation has no root");
}

/// Widens [lo, hi] until above(lo) is false and above(hi) is true.
template <class Predicate>
std::pair<double, double> expand_bracket(double lo, double hi, Predicate above) {
  for (int k = 0; !above(hi); ++k) {
    if (k >= 100) throw ConvergenceError("discrepancy root not bracketed: residual stays below Cδ");
    hi *= 10.0;
  }
  for (int k = 0; above(lo); ++k) {
    if (k >= 100 || lo < 1e3 * std::numeric_limits<double>::min())
      throw ConvergenceError("discrepancy root not bracketed: residual stays above Cδ");
    lo /= 10.0;
  }
  return {lo, hi};
}

std::pair<double, double> default_bracket(const SpectralModel& model, const DiscrepancyConfig& cfg) {
  if (cfg.bracket) return *cfg.bracket;
  const double s_max = model.max_eigenvalue() > 0.0 ? model.max_eigenvalue() : 1.0;
  return {1e-16 * s_max, 1e4 * s_max};
}

}  // namespace

double discrepancy_a(const SpectralModel& model, const NoisyData& noisy,
                     const DiscrepancyConfig& cfg) {
  check_discrepancy_preconditions(model, noisy, cfg);
  const double target = cfg.C * cfg.C * noisy.delta * noisy.delta;
  auto above = [&](double a) { return discrepancy_h(model, noisy.data, a) >= target; };
  auto [lo, hi] = default_bracket(model, cfg);
  std::tie(lo, hi) = expand_bracket(lo, hi, above);
  return bisect_log(lo, hi, cfg.root_tol, above);
}

SolveReport discrepancy_solve(const LinearOperator& op, const SpectralModel& model,
                              const NoisyData& noisy, const DiscrepancyConfig& cfg) {
  if (noisy.delta == 0.0) {
    SolveReport rep;
    rep.method = "minimal_norm";
    rep.solution = minimal_norm_solution(model, op, noisy.data);
    rep.notice = "δ = 0: parameter choice bypassed, minimal-norm solution returned";
    rep.evaluate(op, noisy.data);
    return rep;
  }
  const double a = discrepancy_a(model, noisy, cfg);
  // The spectral minimizer stays accurate at the tiny a this rule picks on
  // severely ill-conditioned operators, where a Cholesky solve of T + aI does not.
  SolveReport rep;
  rep.method = "tikhonov_discrepancy";
  rep.solution = spectral_tikhonov(model, noisy.data, a);
  rep.a_chosen = a;
  rep.evaluate(op, noisy.data);
  return rep;
}

InnerSolver exact_inner_solver(const SpectralModel& model, const Vector& f_delta) {
  return [&model, f_delta](double a, double) {
    return InnerResult{spectral_tikhonov(model, f_delta, a), 0};
  };
}

InnerSolver truncated_cg_inner_solver(const LinearOperator& op, const Vector& f_delta,
                                      long max_iterations) {
  return [&op, f_delta, max_iterations](double a, double f_target) {
    const long max_it = max_iterations > 0 ? max_iterations : 50 * op.cols() + 50;
    const Vector rhs = op.apply_adjoint(f_delta);
    Vector u = Vector::Zero(op.cols());
    Vector r = rhs;
    Vector p = r;
    double rr = r.squaredNorm();
    long it = 0;
    while (it < max_it && tikhonov_functional(op, f_delta, a, u) > f_target && rr > 0.0) {
      const Vector tp = op.apply_adjoint(op.apply(p)) + a * p;
      const double alpha = rr / p.dot(tp);
      u += alpha * p;
      r -= alpha * tp;
      const double rr_new = r.squaredNorm();
      p = r + (rr_new / rr) * p;
      rr = rr_new;
      ++it;
    }
    return InnerResult{std::move(u), it};
  };
}

SolveReport relaxed_discrepancy(const LinearOperator& op, const SpectralModel& model,
                                const NoisyData& noisy, const DiscrepancyConfig& cfg,
                                const InnerSolver& inner) {
  check_discrepancy_preconditions(model, noisy, cfg);
  const double delta2 = noisy.delta * noisy.delta;
  const double c_delta = cfg.C * noisy.delta;
  const double allowance = (cfg.C * cfg.C - 1.0 - cfg.b_slack) * delta2;
  const double rounding = 1e-14 * noisy.data.squaredNorm();

  auto certified = [&](double a) {
    const double m = tikhonov_functional(op, noisy.data, a, spectral_tikhonov(model, noisy.data, a));
    const double target = m + allowance;
    InnerResult res = inner(a, target);
    const double gap = tikhonov_functional(op, noisy.data, a, res.u) - target;
    if (gap > rounding)
      throw CertificationError("approximate minimizer violates F(u) ≤ m + (C²−1−b)δ² at a = " +
                                   std::to_string(a) + " by " + std::to_string(gap),
                               gap);
    return res;
  };
  auto above = [&](double a) { return (op.apply(certified(a).u) - noisy.data).norm() >= c_delta; };

  auto [lo, hi] = default_bracket(model, cfg);
  std::tie(lo, hi) = expand_bracket(lo, hi, above);
  const double a = bisect_log(lo, hi, cfg.root_tol, above);

  InnerResult res = certified(a);
  SolveReport rep;
  rep.method = "tikhonov_relaxed";
  rep.a_chosen = a;
  rep.solution = std::move(res.u);
  rep.inner_iterations = res.iterations;
  rep.evaluate(op, noisy.data);
  return rep;
}

}  // namespace regkit
