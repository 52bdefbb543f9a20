#pragma once

#include "regkit/operators.hpp"
#include "regkit/report.hpp"
#include "regkit/schedule.hpp"
#include "regkit/spectral.hpp"
#include "regkit/variational.hpp"

#include <optional>
#include <string>
#include <vector>

namespace regkit {

// Dynamical systems method. Three flows are provided:
//
//   v1:  u̇ = i(B + ia) u − i g,            a constant,        u(0) = 0
//   v2:  u̇ = i(B + ia(t)) u − i g,         a(t) decaying,     u(0) = 0
//   v3:  u̇ = −u + T_{a(t)}⁻¹ Aᵀ f_δ,                          u(0) = 0
//
// v1 and v2 need a selfadjoint B. make_flow_system() uses A itself when it is
// selfadjoint and otherwise the normal equations T u = Aᵀ f.
// Every flow has a spectral closed form (the default backend) and an
// RK4 integrator used for cross-validation and matrix-free runs.

struct Trajectory {
  std::vector<double> times;
  std::vector<ComplexVector> states;  // imaginary parts are zero for v3
  std::vector<double> residuals;      // ‖B u − g‖ (v1) or ‖A u − f_δ‖ (v3)
  std::optional<std::vector<double>> errors_vs_y;
  std::string method;
  bool complex_valued = true;

  const ComplexVector& terminal() const { return states.back(); }
};

struct TrajectoryOptions {
  long record_every = 1;              // keep every k-th step (the last step is always kept)
  std::optional<Vector> reference;    // y, enables errors_vs_y
};

/// Selfadjoint operator and data the complex flows act on.
struct FlowSystem {
  LinearOperator op;
  Vector data;
  bool reduced = false;  // true when op = AᵀA and data = Aᵀf
};

FlowSystem make_flow_system(const LinearOperator& op, const Vector& f);

/// Step used when none is given: min(0.1, 0.1 / (1 + s_max + a)).
double default_step(double spectral_radius, double a);

// ---- v1: constant a ------------------------------------------------------

/// u(t) = Σ_k (s_k + ia)⁻¹ (1 − e^{i(s_k+ia)t}) ⟨g, e_k⟩ e_k.
ComplexVector dsm1_closed_form(const SelfadjointModel& model, const Vector& g, double a, double t);

Trajectory dsm1_integrate(const LinearOperator& b_op, const Vector& g, double a, double t_end,
                          double step, const TrajectoryOptions& opts = {});

struct Dsm1Params {
  double gamma = 0.5;  // a = δ^γ
  double mu = 0.75;    // t_δ = δ^{−μ}, μ > γ
  std::optional<double> a;       // required when δ = 0
  std::optional<double> t_stop;  // required when δ = 0
  void validate() const;
};

SolveReport dsm1_solve(const ForwardProblem& problem, const NoisyData& noisy,
                       const Dsm1Params& params = {});

// ---- v2: decaying a(t) in the complex flow -------------------------------

/// u(t) = −i ∫₀ᵗ e^{iB(t−s) − ∫ₛᵗ a(p)dp} g ds, evaluated mode-wise by
/// adaptive Gauss–Kronrod quadrature with absolute tolerance rel_tol·‖g‖.
ComplexVector dsm2_closed_form(const SelfadjointModel& model, const Vector& g,
                               const Schedule& sched, double t, double rel_tol = 1e-10);

struct Dsm2Params {
  Schedule schedule = Schedule::power(1.0, 1.0, 0.75);
  std::optional<double> t_stop;  // default a⁻¹(√δ); required when δ = 0
};

/// t_δ = a⁻¹(√δ) (0 when √δ ≥ a(0)).
double dsm2_stop_time(const Schedule& sched, double delta);

SolveReport dsm2_solve(const ForwardProblem& problem, const NoisyData& noisy,
                       const Dsm2Params& params = {});

// ---- v3: regularized-inverse flow ----------------------------------------

/// u(t) = ∫₀ᵗ e^{−(t−s)} T_{a(s)}⁻¹ Aᵀ f ds computed on the T-spectrum.
Vector dsm3_closed_form(const SpectralModel& model, const LinearOperator& op, const Vector& f,
                        const Schedule& sched, double t, double rel_tol = 1e-10);

Trajectory dsm3_integrate(const LinearOperator& op, const NoisyData& noisy, const Schedule& sched,
                          double t_end, double step, const TrajectoryOptions& opts = {});

enum class FlowBackend { ClosedForm, Integrator };

struct Dsm3Params {
  Schedule schedule = Schedule::power(1.0, 1.0, 0.75);
  std::optional<double> t_stop;  // default a⁻¹(δ^{2/3}); required when δ = 0
  FlowBackend backend = FlowBackend::ClosedForm;
  std::optional<double> step;    // integrator step, default_step() otherwise
};

/// t_δ = a⁻¹(δ^{2/3}) (0 when δ^{2/3} ≥ a(0)).
double dsm3_stop_time(const Schedule& sched, double delta);

SolveReport dsm3_solve(const ForwardProblem& problem, const SpectralModel& model,
                       const NoisyData& noisy, const Dsm3Params& params = {});

/// Stops the v3 flow where a(t_δ) equals the discrepancy-principle parameter.
SolveReport dsm_discrepancy_stop(const ForwardProblem& problem, const SpectralModel& model,
                                 const NoisyData& noisy, const Dsm3Params& params,
                                 const DiscrepancyConfig& cfg);

}  // namespace regkit
