#include "regkit/dsm.hpp"

#include "regkit/errors.hpp"
#include "regkit/ode.hpp"
#include "regkit/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

namespace regkit {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

ComplexVector apply_complex(const LinearOperator& op, const ComplexVector& u) {
  const Vector re = op.apply(u.real());
  const Vector im = op.apply(u.imag());
  ComplexVector out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

double complex_distance(const ComplexVector& u, const Vector& y) {
  return std::sqrt((u.real() - y).squaredNorm() + u.imag().squaredNorm());
}

void check_instability(double state_norm, double data_norm, double a, double t) {
  const double limit = 1e8 * std::max(data_norm, 1e-300) / a;
  if (!std::isfinite(state_norm) || state_norm > limit)
    throw ConvergenceError("integrator unstable at t = " + std::to_string(t) +
                           ": state norm exceeds 1e8·‖g‖/a; reduce the step");
}

void require_positive_a(double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw PreconditionError("DSM parameter a must be positive, got " + std::to_string(a));
}

SolveReport flow_report(std::string method, const ForwardProblem& problem, const NoisyData& noisy,
                        const ComplexVector& u, double a, double t) {
  SolveReport rep;
  rep.method = std::move(method);
  rep.solution = u.real();
  rep.solution_imag = u.imag();
  rep.a_chosen = a;
  rep.stop_time = t;
  rep.evaluate(problem.op, noisy.data);
  rep.set_reference(problem.exact_solution);
  return rep;
}

SolveReport real_flow_report(std::string method, const ForwardProblem& problem,
                             const NoisyData& noisy, Vector u, double a, double t) {
  SolveReport rep;
  rep.method = std::move(method);
  rep.solution = std::move(u);
  rep.a_chosen = a;
  rep.stop_time = t;
  rep.evaluate(problem.op, noisy.data);
  rep.set_reference(problem.exact_solution);
  return rep;
}

}  // namespace

FlowSystem make_flow_system(const LinearOperator& op, const Vector& f) {
  if (op.is_selfadjoint()) return FlowSystem{op, f, false};
  return FlowSystem{LinearOperator::symmetric(op.gram()), op.apply_adjoint(f), true};
}

double default_step(double spectral_radius, double a) {
  return std::min(0.1, 0.1 / (1.0 + std::abs(spectral_radius) + a));
}

// ---- v1 ---------------------------------------------------------------------

ComplexVector dsm1_closed_form(const SelfadjointModel& model, const Vector& g, double a, double t) {
  require_positive_a(a);
  if (t < 0.0) throw PreconditionError("flow time must be nonnegative");
  const Vector c = model.basis.transpose() * g;
  ComplexVector w(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const cd z{model.eigenvalues(k), a};  // s + ia
    w(k) = (1.0 - std::exp(kI * z * t)) / z * c(k);
  }
  return model.basis.cast<cd>() * w;
}

Trajectory dsm1_integrate(const LinearOperator& b_op, const Vector& g, double a, double t_end,
                          double step, const TrajectoryOptions& opts) {
  require_positive_a(a);
  if (!b_op.is_selfadjoint()) throw PreconditionError("dsm1_integrate needs a selfadjoint operator");
  const double g_norm = g.norm();
  const ComplexVector ig = kI * g.cast<cd>();

  Trajectory traj;
  traj.method = "dsm1";
  if (opts.reference) traj.errors_vs_y.emplace();
  const long stride = std::max(1L, opts.record_every);
  const long n_steps = static_cast<long>(std::ceil(t_end / step - 1e-12));

  auto rhs = [&](double, const ComplexVector& u) -> ComplexVector {
    return kI * apply_complex(b_op, u) - a * u - ig;
  };
  auto observe = [&](long k, double t, const ComplexVector& u) {
    const double norm = u.norm();
    check_instability(norm, g_norm, a, t);
    if (k % stride != 0 && k != n_steps) return;
    traj.times.push_back(t);
    traj.states.push_back(u);
    traj.residuals.push_back((apply_complex(b_op, u) - g.cast<cd>()).norm());
    if (opts.reference) traj.errors_vs_y->push_back(complex_distance(u, *opts.reference));
  };
  rk4_integrate(rhs, ComplexVector(ComplexVector::Zero(g.size())), 0.0, t_end, step, observe);
  return traj;
}

void Dsm1Params::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0))
    throw PreconditionError("dsm1: γ must lie in (0, 1), got " + std::to_string(gamma));
  if (!(mu > gamma))
    throw PreconditionError("dsm1: stopping exponent μ must exceed γ so that e^{−at}/a → 0");
}

SolveReport dsm1_solve(const ForwardProblem& problem, const NoisyData& noisy,
                       const Dsm1Params& params) {
  params.validate();
  double a = 0.0;
  double t = 0.0;
  if (noisy.delta > 0.0) {
    a = params.a.value_or(std::pow(noisy.delta, params.gamma));
    t = params.t_stop.value_or(std::pow(noisy.delta, -params.mu));
  } else {
    if (!params.a || !params.t_stop)
      throw PreconditionError("dsm1 with δ = 0 needs explicit a and stopping time");
    a = *params.a;
    t = *params.t_stop;
  }
  const FlowSystem sys = make_flow_system(problem.op, noisy.data);
  const SelfadjointModel model = decompose_selfadjoint(sys.op);
  return flow_report("dsm1", problem, noisy, dsm1_closed_form(model, sys.data, a, t), a, t);
}

// ---- v2 ---------------------------------------------------------------------

ComplexVector dsm2_closed_form(const SelfadjointModel& model, const Vector& g,
                               const Schedule& sched, double t, double rel_tol) {
  if (t < 0.0) throw PreconditionError("flow time must be nonnegative");
  const Vector c = model.basis.transpose() * g;
  const double abs_tol = rel_tol * std::max(g.norm(), 1e-300);
  // ∫ₛᵗ a ≥ a(t)(t − s): contributions older than 50/a(t) are below e^{−50}.
  const double a_t = sched.value(t);
  const double lo = std::max(0.0, t - 50.0 / a_t);
  ComplexVector w = ComplexVector::Zero(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    if (c(k) == 0.0 || t == 0.0) continue;
    const double lambda = model.eigenvalues(k);
    auto integrand = [&](double s) {
      return std::exp(cd{-sched.integral(s, t), lambda * (t - s)});
    };
    const double panel = std::min(50.0, 2.0 / (std::abs(lambda) + 1e-12));
    const auto q = integrate_adaptive<cd>(integrand, lo, t, abs_tol / std::abs(c(k)), panel);
    w(k) = -kI * c(k) * q.value;
  }
  return model.basis.cast<cd>() * w;
}

double dsm2_stop_time(const Schedule& sched, double delta) {
  const double target = std::sqrt(delta);
  if (target >= sched.value(0.0)) return 0.0;
  return sched.inverse(target);
}

SolveReport dsm2_solve(const ForwardProblem& problem, const NoisyData& noisy,
                       const Dsm2Params& params) {
  if (params.schedule.kind() != Schedule::Kind::Power)
    throw PreconditionError("dsm2 needs a power schedule c0/(c1+t)^b");
  double t = 0.0;
  if (params.t_stop)
    t = *params.t_stop;
  else if (noisy.delta > 0.0)
    t = dsm2_stop_time(params.schedule, noisy.delta);
  else
    throw PreconditionError("dsm2 with δ = 0 needs an explicit stopping time");
  const FlowSystem sys = make_flow_system(problem.op, noisy.data);
  const SelfadjointModel model = decompose_selfadjoint(sys.op);
  return flow_report("dsm2", problem, noisy, dsm2_closed_form(model, sys.data, params.schedule, t),
                     params.schedule.value(t), t);
}

// ---- v3 ---------------------------------------------------------------------

Vector dsm3_closed_form(const SpectralModel& model, const LinearOperator& op, const Vector& f,
                        const Schedule& sched, double t, double rel_tol) {
  if (t < 0.0) throw PreconditionError("flow time must be nonnegative");
  const Vector g = model.coefficients(op.apply_adjoint(f));
  Vector w = Vector::Zero(g.size());
  if (t == 0.0) return model.basis * w;
  const double abs_tol = rel_tol * std::max(f.norm(), 1e-300);
  const double lo = std::max(0.0, t - 60.0);  // e^{−60} weight cutoff
  for (Eigen::Index k = 0; k < g.size(); ++k) {
    if (g(k) == 0.0) continue;
    const double s = model.eigenvalues(k);
    if (sched.kind() == Schedule::Kind::Constant) {
      w(k) = g(k) * (-std::expm1(-t)) / (s + sched.a_const());
      continue;
    }
    auto integrand = [&](double r) { return std::exp(-(t - r)) / (s + sched.value(r)); };
    const auto q = integrate_adaptive<double>(integrand, lo, t, abs_tol / std::abs(g(k)), 1.0);
    w(k) = g(k) * q.value;
  }
  return model.basis * w;
}

Trajectory dsm3_integrate(const LinearOperator& op, const NoisyData& noisy, const Schedule& sched,
                          double t_end, double step, const TrajectoryOptions& opts) {
  const Vector rhs_data = op.apply_adjoint(noisy.data);
  const double data_norm = rhs_data.norm();

  Trajectory traj;
  traj.method = "dsm3";
  traj.complex_valued = false;
  if (opts.reference) traj.errors_vs_y.emplace();
  const long stride = std::max(1L, opts.record_every);
  const long n_steps = static_cast<long>(std::ceil(t_end / step - 1e-12));

  std::optional<Vector> frozen;
  if (sched.kind() == Schedule::Kind::Constant)
    frozen = solve_regularized(op, sched.a_const(), rhs_data);

  auto rhs = [&](double t, const Vector& u) -> Vector {
    if (frozen) return *frozen - u;
    const double a = sched.value(t);
    if (!(a > 0.0)) throw PreconditionError("schedule must stay positive along the flow");
    return solve_regularized(op, a, rhs_data) - u;
  };
  auto observe = [&](long k, double t, const Vector& u) {
    check_instability(u.norm(), data_norm, sched.value(t), t);
    if (k % stride != 0 && k != n_steps) return;
    traj.times.push_back(t);
    traj.states.push_back(u.cast<cd>());
    traj.residuals.push_back((op.apply(u) - noisy.data).norm());
    if (opts.reference) traj.errors_vs_y->push_back((u - *opts.reference).norm());
  };
  rk4_integrate(rhs, Vector(Vector::Zero(op.cols())), 0.0, t_end, step, observe);
  return traj;
}

double dsm3_stop_time(const Schedule& sched, double delta) {
  const double target = std::pow(delta, 2.0 / 3.0);
  if (target >= sched.value(0.0)) return 0.0;
  return sched.inverse(target);
}

namespace {

Vector run_dsm3(const LinearOperator& op, const SpectralModel& model, const NoisyData& noisy,
                const Dsm3Params& params, double t) {
  if (params.backend == FlowBackend::ClosedForm)
    return dsm3_closed_form(model, op, noisy.data, params.schedule, t);
  const double step = params.step.value_or(default_step(model.max_eigenvalue(),
                                                        params.schedule.value(0.0)));
  TrajectoryOptions opts;
  opts.record_every = std::numeric_limits<long>::max();
  const Trajectory traj = dsm3_integrate(op, noisy, params.schedule, t, step, opts);
  return traj.terminal().real();
}

}  // namespace

SolveReport dsm3_solve(const ForwardProblem& problem, const SpectralModel& model,
                       const NoisyData& noisy, const Dsm3Params& params) {
  double t = 0.0;
  if (params.t_stop)
    t = *params.t_stop;
  else if (noisy.delta > 0.0)
    t = dsm3_stop_time(params.schedule, noisy.delta);
  else
    throw PreconditionError("dsm3 with δ = 0 needs an explicit stopping time");
  return real_flow_report("dsm3", problem, noisy, run_dsm3(problem.op, model, noisy, params, t),
                          params.schedule.value(t), t);
}

SolveReport dsm_discrepancy_stop(const ForwardProblem& problem, const SpectralModel& model,
                                 const NoisyData& noisy, const Dsm3Params& params,
                                 const DiscrepancyConfig& cfg) {
  if (!params.schedule.supports_discrepancy_stop())
    throw PreconditionError(
        "discrepancy stopping needs a decaying, twice differentiable schedule with ä > 0 "
        "(power kind)");
  if (noisy.delta == 0.0) {
    SolveReport rep = discrepancy_solve(problem.op, model, noisy, cfg);
    rep.set_reference(problem.exact_solution);
    return rep;
  }
  const double a_delta = discrepancy_a(model, noisy, cfg);
  // a_δ above a(0) means the flow is read off immediately.
  const bool immediate = a_delta >= params.schedule.value(0.0);
  const double t = immediate ? 0.0 : params.schedule.inverse(a_delta);
  SolveReport rep = real_flow_report("dsm_discrepancy", problem, noisy,
                                     run_dsm3(problem.op, model, noisy, params, t), a_delta, t);
  if (immediate) rep.notice = "discrepancy parameter exceeds a(0); stopped at t = 0";
  return rep;
}

}  // namespace regkit
