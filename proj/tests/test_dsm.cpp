#include "regkit/dsm.hpp"
#include "regkit/errors.hpp"
#include "regkit/problems.hpp"
#include "regkit/spectral.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace regkit;
using cd = std::complex<double>;

namespace {

ForwardProblem identity_problem() {
  const Vector y = (Vector(2) << 0.6, 0.8).finished();
  return {LinearOperator::identity(2), y, y, 0};
}

ForwardProblem hilbert10() {
  ProblemSpec spec;
  spec.family = Family::Hilbert;
  spec.size = 10;
  spec.seed = 3;
  return generate(spec);
}

ForwardProblem diagonal_problem(Eigen::Index n, double p) {
  ProblemSpec spec;
  spec.size = n;
  spec.power_p = p;
  spec.seed = 5;
  return generate(spec);
}

double relative(const ComplexVector& u, const ComplexVector& v) {
  return (u - v).norm() / v.norm();
}

}  // namespace

TEST(Dsm1ClosedForm, ScalarLongTime) {
  const SelfadjointModel m = decompose_selfadjoint(LinearOperator::identity(1));
  const ComplexVector u = dsm1_closed_form(m, Vector::Ones(1), 0.1, 200.0);
  EXPECT_LE(std::abs(u(0) - 1.0 / cd{1.0, 0.1}), 1e-8);
  EXPECT_NEAR(std::abs(u(0) - 1.0), 0.1 / std::sqrt(1.01), 1e-8);
}

TEST(Dsm1ClosedForm, ZeroTimeAndNullMode) {
  const auto op = LinearOperator::diagonal((Vector(2) << 1.0, 0.0).finished());
  const SelfadjointModel m = decompose_selfadjoint(op);
  EXPECT_EQ(dsm1_closed_form(m, (Vector(2) << 1, 0).finished(), 0.5, 0.0).norm(), 0.0);
  for (double t : {0.5, 5.0, 50.0})
    EXPECT_EQ(dsm1_closed_form(m, (Vector(2) << 1, 0).finished(), 0.5, t)(1), cd(0.0));
}

TEST(Dsm1Integrate, StepHalvingFourthOrder) {
  const auto op = LinearOperator::identity(1);
  const SelfadjointModel m = decompose_selfadjoint(op);
  const Vector g = Vector::Ones(1);
  const ComplexVector exact = dsm1_closed_form(m, g, 0.1, 2.0);
  const double e1 = (dsm1_integrate(op, g, 0.1, 2.0, 0.2).terminal() - exact).norm();
  const double e2 = (dsm1_integrate(op, g, 0.1, 2.0, 0.1).terminal() - exact).norm();
  EXPECT_GE(e1 / e2, 16.0 * 0.7);
  EXPECT_LE(e1 / e2, 16.0 * 1.3);
}

TEST(Dsm1Integrate, ZeroDataZeroTrajectory) {
  const Trajectory tr = dsm1_integrate(LinearOperator::identity(3), Vector::Zero(3), 0.2, 5.0, 0.1);
  for (const auto& s : tr.states) EXPECT_EQ(s.norm(), 0.0);
  EXPECT_EQ(tr.times.front(), 0.0);
  EXPECT_EQ(tr.times.back(), 5.0);
  EXPECT_EQ(tr.times.size(), tr.states.size());
  EXPECT_EQ(tr.times.size(), tr.residuals.size());
}

TEST(Dsm1Integrate, DiagonalMatchesClosedForm) {
  const auto op = LinearOperator::diagonal((Vector(2) << 1.0, 0.25).finished());
  const Vector g = (Vector(2) << 0.3, -1.2).finished();
  const ComplexVector exact = dsm1_closed_form(decompose_selfadjoint(op), g, 0.05, 50.0);
  const Trajectory tr = dsm1_integrate(op, g, 0.05, 50.0, 1e-2);
  EXPECT_LE((tr.terminal() - exact).norm(), 1e-6);
  for (std::size_t i = 1; i < tr.times.size(); ++i) EXPECT_GT(tr.times[i], tr.times[i - 1]);
}

TEST(Dsm1Integrate, DefaultStepRelativeFidelity) {
  const ForwardProblem p = hilbert10();
  const double a = 0.01;
  const SelfadjointModel m = decompose_selfadjoint(p.op);
  const double step = default_step(m.eigenvalues(0), a);
  // Stopping time of the δ = 1e−4 schedule: a = δ^{1/2}, t = δ^{−3/4}.
  const ComplexVector exact = dsm1_closed_form(m, p.exact_data, a, 1000.0);
  TrajectoryOptions opts;
  opts.record_every = 1000000;
  const Trajectory tr = dsm1_integrate(p.op, p.exact_data, a, 1000.0, step, opts);
  EXPECT_LE(relative(tr.terminal(), exact), 1e-6);
}

TEST(Dsm1Integrate, InstabilityGuard) {
  EXPECT_THROW(dsm1_integrate(LinearOperator::identity(1), Vector::Ones(1), 0.1, 200.0, 3.5),
               ConvergenceError);
}

TEST(Dsm1Integrate, NoisePropagationBound) {
  const ForwardProblem p = hilbert10();
  const double a = 0.05, delta = 1e-3;
  const NoisyData noisy = add_noise(p, delta, 9);
  const SelfadjointModel m = decompose_selfadjoint(p.op);
  for (double t : {1.0, 10.0, 100.0, 1000.0}) {
    const ComplexVector gap =
        dsm1_closed_form(m, noisy.data, a, t) - dsm1_closed_form(m, p.exact_data, a, t);
    EXPECT_LE(gap.norm(), 2 * delta / a + 1e-9);
  }
}

TEST(Dsm1Solve, ScheduleArithmetic) {
  const ForwardProblem p = diagonal_problem(20, 0.5);
  const SolveReport r = dsm1_solve(p, add_noise(p, 1e-4, 1));
  EXPECT_NEAR(r.a_chosen, 1e-2, 1e-16);
  EXPECT_NEAR(*r.stop_time, 1e3, 1e-9);
  EXPECT_NEAR(std::exp(-r.a_chosen * *r.stop_time) / r.a_chosen, 4.54e-3, 1e-5);
  EXPECT_TRUE(r.solution_imag.has_value());
  EXPECT_EQ(r.method, "dsm1");
}

TEST(Dsm1Solve, ExactDataBound) {
  const ForwardProblem p = diagonal_problem(30, 0.5);
  const double a = 1e-2, t = 300.0;
  Dsm1Params params;
  params.a = a;
  params.t_stop = t;
  const SolveReport r = dsm1_solve(p, {p.exact_data, 0.0, 0}, params);
  // Distance to the t = ∞ limit (B + ia)⁻¹ f is at most e^{−at}/a ‖f‖.
  const Vector d = p.op.diagonal_entries();
  double bias = 0.0;
  for (Eigen::Index k = 0; k < d.size(); ++k)
    bias += a * a / (d(k) * d(k) + a * a) * std::pow(p.exact_solution(k), 2);
  EXPECT_LE(*r.error_norm, std::sqrt(bias) + std::exp(-a * t) / a * p.exact_data.norm() + 1e-12);
}

TEST(Dsm1Solve, ParameterValidation) {
  const ForwardProblem p = identity_problem();
  Dsm1Params params;
  params.mu = 0.5;
  EXPECT_THROW(dsm1_solve(p, {p.exact_data, 1e-3, 0}, params), PreconditionError);
  EXPECT_THROW(dsm1_solve(p, {p.exact_data, 0.0, 0}), PreconditionError);
}

TEST(Dsm1, DenseOperatorUsesNormalEquations) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> dist;
  Matrix a(6, 4);
  for (auto& x : a.reshaped()) x = dist(rng);
  const auto op = LinearOperator::dense(a);
  const Vector f = op.apply(Vector::Ones(4));
  const FlowSystem sys = make_flow_system(op, f);
  EXPECT_TRUE(sys.reduced);
  EXPECT_TRUE(sys.op.is_selfadjoint());
  EXPECT_LE((sys.data - op.apply_adjoint(f)).norm(), 1e-14 * sys.data.norm());
}

TEST(Dsm2, ScalarConvergesWithExactData) {
  const SelfadjointModel m = decompose_selfadjoint(LinearOperator::identity(1));
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  double prev = INFINITY;
  for (double t : {50.0, 100.0, 200.0, 500.0}) {
    const double err = std::abs(dsm2_closed_form(m, Vector::Ones(1), s, t)(0) - 1.0);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LE(prev, 0.05);
}

TEST(Dsm2, MatchesIntegratedOdeForConstantLikeCheck) {
  // With a slowly varying schedule, compare against a direct RK4 of u̇ = i(B + ia(t))u − ig.
  const auto op = LinearOperator::diagonal((Vector(2) << 1.0, 0.3).finished());
  const SelfadjointModel m = decompose_selfadjoint(op);
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  const Vector g = (Vector(2) << 0.7, -0.4).finished();
  const double t_end = 20.0, h = 1e-3;
  ComplexVector u = ComplexVector::Zero(2);
  const cd i{0.0, 1.0};
  auto rhs = [&](double t, const ComplexVector& v) -> ComplexVector {
    return i * (op.apply(v.real()).cast<cd>() + i * op.apply(v.imag()).cast<cd>()) -
           s.value(t) * v - i * g.cast<cd>();
  };
  const long n = static_cast<long>(t_end / h + 0.5);
  for (long k = 0; k < n; ++k) {
    const double t = k * h;
    const ComplexVector k1 = rhs(t, u);
    const ComplexVector k2 = rhs(t + h / 2, u + h / 2 * k1);
    const ComplexVector k3 = rhs(t + h / 2, u + h / 2 * k2);
    const ComplexVector k4 = rhs(t + h, u + h * k3);
    u += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  EXPECT_LE((dsm2_closed_form(m, g, s, t_end) - u).norm(), 1e-8);
}

TEST(Dsm2, NoisePropagationBound) {
  const ForwardProblem p = hilbert10();
  const SelfadjointModel m = decompose_selfadjoint(p.op);
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  const double delta = 1e-3;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const NoisyData noisy = add_noise(p, delta, seed);
    for (double t : {5.0, 50.0, 300.0}) {
      const ComplexVector gap =
          dsm2_closed_form(m, noisy.data, s, t) - dsm2_closed_form(m, p.exact_data, s, t);
      EXPECT_LE(gap.norm(), delta / s.value(t) + 1e-9);
    }
  }
}

TEST(Dsm2, StopTime) {
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  EXPECT_NEAR(dsm2_stop_time(s, 1e-4), 463.1588833612778, 1e-9);
  EXPECT_EQ(dsm2_stop_time(s, 4.0), 0.0);
}

TEST(Dsm2, RejectsNonPowerSchedule) {
  const ForwardProblem p = identity_problem();
  Dsm2Params params;
  params.schedule = Schedule::constant(0.1);
  EXPECT_THROW(dsm2_solve(p, {p.exact_data, 1e-3, 0}, params), PreconditionError);
}

TEST(Dsm3Integrate, ConstantScheduleFixedPoint) {
  const NoisyData exact{(Vector(2) << 1, 0).finished(), 0.0, 0};
  const double a = 0.25;
  const Trajectory tr =
      dsm3_integrate(LinearOperator::identity(2), exact, Schedule::constant(a), 40.0, 0.05);
  EXPECT_NEAR(tr.terminal()(0).real(), 1.0 / (1.0 + a), 1e-12);
  EXPECT_NEAR(std::abs(tr.terminal()(1)), 0.0, 1e-15);
  EXPECT_FALSE(tr.complex_valued);
}

TEST(Dsm3Integrate, ExponentialTransient) {
  const ForwardProblem p = hilbert10();
  const double a = 1e-3;
  const Vector limit = solve_regularized(p.op, a, p.op.apply_adjoint(p.exact_data));
  const Trajectory tr =
      dsm3_integrate(p.op, {p.exact_data, 0.0, 0}, Schedule::constant(a), 10.0, 0.05);
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double gap = (tr.states[i].real() - limit).norm();
    EXPECT_LE(gap, std::exp(-tr.times[i]) * limit.norm() * (1 + 1e-6));
  }
}

TEST(Dsm3Integrate, NoisePropagationAlongTrajectory) {
  const ForwardProblem p = hilbert10();
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  const double delta = 1e-3;
  const NoisyData noisy = add_noise(p, delta, 3);
  const Trajectory exact = dsm3_integrate(p.op, {p.exact_data, 0.0, 0}, s, 30.0, 0.05);
  const Trajectory pert = dsm3_integrate(p.op, noisy, s, 30.0, 0.05);
  ASSERT_EQ(exact.times.size(), pert.times.size());
  for (std::size_t i = 0; i < exact.times.size(); ++i) {
    const double gap = (pert.states[i] - exact.states[i]).norm();
    EXPECT_LE(gap, delta / (2 * std::sqrt(s.value(exact.times[i]))) + 1e-9);
  }
}

TEST(Dsm3Integrate, MatchesClosedFormAtDefaultStep) {
  const ForwardProblem p = hilbert10();
  const SpectralModel m = decompose(p.op);
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  const NoisyData noisy = add_noise(p, 1e-3, 2);
  const double t = 40.0;
  const Vector exact = dsm3_closed_form(m, p.op, noisy.data, s, t);
  TrajectoryOptions opts;
  opts.record_every = 1000000;
  const Trajectory tr =
      dsm3_integrate(p.op, noisy, s, t, default_step(m.max_eigenvalue(), s.value(0)), opts);
  EXPECT_LE((tr.terminal().real() - exact).norm() / exact.norm(), 1e-6);
}

TEST(Dsm3Solve, StopTimeArithmetic) {
  EXPECT_NEAR(dsm3_stop_time(Schedule::power(1.0, 1.0, 0.75), 1e-3), 463.1588833612778, 1e-6);
}

TEST(Dsm3Solve, HilbertSweepErrorDecreasing) {
  const ForwardProblem p = hilbert10();
  const SpectralModel m = decompose(p.op);
  double prev = INFINITY;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
    const SolveReport r = dsm3_solve(p, m, add_noise(p, delta, 8));
    EXPECT_LT(*r.error_norm, prev);
    prev = *r.error_norm;
  }
}

TEST(Dsm3Solve, IntegratorBackendAgrees) {
  const ForwardProblem p = hilbert10();
  const SpectralModel m = decompose(p.op);
  const NoisyData noisy = add_noise(p, 1e-1, 8);
  Dsm3Params params;
  const SolveReport closed = dsm3_solve(p, m, noisy, params);
  params.backend = FlowBackend::Integrator;
  const SolveReport integ = dsm3_solve(p, m, noisy, params);
  EXPECT_LE((closed.solution - integ.solution).norm(), 1e-6 * closed.solution.norm());
}

TEST(Dsm3Solve, ZeroNoiseNeedsHorizon) {
  const ForwardProblem p = diagonal_problem(20, 1.0);
  const SpectralModel m = decompose(p.op);
  EXPECT_THROW(dsm3_solve(p, m, {p.exact_data, 0.0, 0}), PreconditionError);
  Dsm3Params params;
  params.t_stop = 1e6;
  const SolveReport r = dsm3_solve(p, m, {p.exact_data, 0.0, 0}, params);
  EXPECT_LT(*r.error_norm, 1e-2);
}

TEST(DsmFlows, ExactDataErrorDecreasesInTime) {
  const ForwardProblem p = diagonal_problem(50, 1.0);
  const SpectralModel m = decompose(p.op);
  const SelfadjointModel sm = decompose_selfadjoint(p.op);
  const Schedule s = Schedule::power(1.0, 1.0, 0.75);
  // Window-averaged errors over successive decades of t, after a burn-in.
  auto window = [&](auto&& err, double t0) {
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += err(t0 * (1.0 + 0.5 * i));
    return acc / 5;
  };
  auto e2 = [&](double t) {
    const ComplexVector u = dsm2_closed_form(sm, p.exact_data, s, t);
    return std::sqrt((u.real() - p.exact_solution).squaredNorm() + u.imag().squaredNorm());
  };
  auto e3 = [&](double t) {
    return (dsm3_closed_form(m, p.op, p.exact_data, s, t) - p.exact_solution).norm();
  };
  double prev2 = INFINITY, prev3 = INFINITY;
  for (double t0 : {1e2, 1e3, 1e4}) {
    const double w2 = window(e2, t0), w3 = window(e3, t0);
    EXPECT_LT(w2, prev2);
    EXPECT_LT(w3, prev3);
    prev2 = w2;
    prev3 = w3;
  }
}

TEST(DsmDiscrepancy, IdentityComposition) {
  const ForwardProblem p = identity_problem();
  const SpectralModel m = decompose(p.op);
  const SolveReport r = dsm_discrepancy_stop(p, m, {p.exact_data, 0.1, 0}, {}, {});
  EXPECT_NEAR(r.a_chosen, 0.15 / 0.85, 1e-9);
  EXPECT_NEAR(*r.stop_time, std::pow(0.85 / 0.15, 4.0 / 3.0) - 1.0, 1e-6);
  EXPECT_NEAR(*r.stop_time, 9.1, 0.05);
}

TEST(DsmDiscrepancy, HilbertSweep) {
  const ForwardProblem p = hilbert10();
  const SpectralModel m = decompose(p.op);
  double prev_t = -1.0, prev_err = INFINITY;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const SolveReport r = dsm_discrepancy_stop(p, m, add_noise(p, delta, 6), {}, {});
    EXPECT_GT(*r.stop_time, prev_t);
    EXPECT_LT(*r.error_norm, prev_err);
    prev_t = *r.stop_time;
    prev_err = *r.error_norm;
  }
}

TEST(DsmDiscrepancy, RejectsConstantSchedule) {
  const ForwardProblem p = identity_problem();
  Dsm3Params params;
  params.schedule = Schedule::constant(0.1);
  EXPECT_THROW(dsm_discrepancy_stop(p, decompose(p.op), {p.exact_data, 0.1, 0}, params, {}),
               PreconditionError);
}
