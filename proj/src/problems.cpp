#include "regkit/problems.hpp"

#include "regkit/errors.hpp"
#include "regkit/numerics.hpp"
#include "regkit/spectral.hpp"

#include <array>
#include <cmath>
#include <random>

namespace regkit {

namespace {

constexpr std::array<std::pair<Family, const char*>, 4> kFamilies = {{
    {Family::DiagonalPower, "diagonal_power"},
    {Family::Hilbert, "hilbert"},
    {Family::FredholmGauss, "fredholm_gauss"},
    {Family::CounterexampleT8, "counterexample_t8"},
}};

Vector standard_normal(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  Vector v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

// 8-point Gauss–Legendre on [−1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.960289856497536231684, -0.796666477413626739592, -0.525532409916328985818,
    -0.183434642495649804939, 0.183434642495649804939,  0.525532409916328985818,
    0.796666477413626739592,  0.960289856497536231684};
constexpr std::array<double, 8> kGlWeights = {
    0.101228536290376259153, 0.222381034453374470544, 0.313706645877887287338,
    0.362683783378361982965, 0.362683783378361982965, 0.313706645877887287338,
    0.222381034453374470544, 0.101228536290376259153};

/// Galerkin matrix of k(x,t) = exp(−(x−t)²/(2σ²)) on [0,1] with orthonormal
/// piecewise-constant basis functions on n cells.
Matrix gaussian_kernel_matrix(Eigen::Index n, double sigma) {
  const double h = 1.0 / static_cast<double>(n);
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (int p = 0; p < 8; ++p) {
        const double x = (static_cast<double>(i) + 0.5 * (kGlNodes[p] + 1.0)) * h;
        for (int q = 0; q < 8; ++q) {
          const double t = (static_cast<double>(j) + 0.5 * (kGlNodes[q] + 1.0)) * h;
          const double d = x - t;
          acc += kGlWeights[p] * kGlWeights[q] * std::exp(-d * d / (2.0 * sigma * sigma));
        }
      }
      // (1/h)·∫∫ = (1/h)·(h/2)²·Σ w w k
      m(i, j) = acc * h / 4.0;
      m(j, i) = m(i, j);
    }
  }
  return m;
}

LinearOperator build_operator(const ProblemSpec& spec) {
  const Eigen::Index n = spec.size;
  switch (spec.family) {
    case Family::DiagonalPower:
    case Family::CounterexampleT8: {
      const double p = spec.family == Family::CounterexampleT8 ? 0.5 : spec.power_p;
      Vector d(n);
      for (Eigen::Index k = 0; k < n; ++k) d(k) = std::pow(static_cast<double>(k + 1), -p);
      return LinearOperator::diagonal(std::move(d));
    }
    case Family::Hilbert: {
      Matrix h(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) h(i, j) = 1.0 / static_cast<double>(i + j + 1);
      return LinearOperator::symmetric(std::move(h));
    }
    case Family::FredholmGauss:
      return LinearOperator::symmetric(gaussian_kernel_matrix(n, spec.sigma));
  }
  throw PreconditionError("invalid problem family");
}

}  // namespace

std::string to_string(Family family) {
  for (const auto& [f, name] : kFamilies)
    if (f == family) return name;
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (const auto& [f, n] : kFamilies)
    if (name == n) return f;
  std::string valid;
  for (const auto& [f, n] : kFamilies) valid += (valid.empty() ? "" : ", ") + std::string(n);
  throw PreconditionError("unknown problem family '" + std::string(name) + "'; valid families: " +
                          valid);
}

void ProblemSpec::validate() const {
  if (size < 1) throw PreconditionError("problem size must be at least 1");
  if (family == Family::DiagonalPower && !(power_p > 0.0))
    throw PreconditionError("diagonal_power family needs p > 0");
  if (source_gamma && !(*source_gamma > 0.0))
    throw PreconditionError("source-condition exponent must be positive");
  if (family == Family::FredholmGauss && !(sigma > 0.0))
    throw PreconditionError("kernel width σ must be positive");
}

ForwardProblem generate(const ProblemSpec& spec) {
  spec.validate();
  LinearOperator op = build_operator(spec);
  const SpectralModel model = decompose(op);
  const Vector z = standard_normal(op.cols(), spec.seed);

  Vector y;
  if (spec.source_gamma) {
    // y = |A|^γ z = V diag(s^{γ/2}) Vᵀ z with ‖z‖ = 1.
    const Vector c = model.coefficients(z / z.norm());
    const Vector filt = model.eigenvalues.array().pow(0.5 * *spec.source_gamma);
    y = model.basis * filt.cwiseProduct(c);
  } else {
    Vector c = model.coefficients(z);
    for (Eigen::Index k = 0; k < c.size(); ++k)
      if (model.eigenvalues(k) == 0.0) c(k) = 0.0;
    y = model.basis * c;
    y /= y.norm();
  }
  Vector f = op.apply(y);
  const Eigen::Index null_dim = model.null_dim();
  return ForwardProblem{std::move(op), std::move(y), std::move(f), null_dim};
}

NoisyData add_noise(const ForwardProblem& problem, double delta, std::uint64_t seed) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw PreconditionError("noise level must be ≥ 0");
  const Vector& f = problem.exact_data;
  if (delta == 0.0) return NoisyData{f, 0.0, 0};
  const Vector e = standard_normal(f.size(), seed);
  Vector fd = f + (delta / e.norm()) * e;
  // One rescaling pass so the realized perturbation norm matches δ after rounding.
  const Vector realized = fd - f;
  fd = f + realized * (delta / realized.norm());
  return NoisyData{std::move(fd), delta, seed};
}

void check_problem(const ForwardProblem& problem) {
  const Vector& y = problem.exact_solution;
  const Vector& f = problem.exact_data;
  const double mismatch = (problem.op.apply(y) - f).norm();
  if (mismatch > 1e-12 * std::max(1.0, f.norm()))
    throw InconsistentDataError("‖A y − f‖ = " + std::to_string(mismatch) + " exceeds tolerance");
  const SpectralModel model = decompose(problem.op);
  const double null_part = model.null_component_norm(y);
  if (null_part > 1e-10 * y.norm())
    throw InconsistentDataError("exact solution has a null-space component of norm " +
                                std::to_string(null_part));
}

double counterexample_series(double a, long terms, bool tail_correction) {
  CompensatedSum acc;
  for (long j = 1; j <= terms; ++j) {
    const double d = 1.0 + a * static_cast<double>(j);
    acc.add(1.0 / (d * d));
  }
  if (tail_correction) acc.add(1.0 / (a * (1.0 + a * static_cast<double>(terms))));
  return acc.value();
}

CounterexampleResult counterexample_t8(long terms, double C, double delta, bool tail_correction) {
  if (!(C > 1.0 && C < 2.0)) throw PreconditionError("constant C must lie in (1, 2)");
  if (!(delta > 0.0)) throw PreconditionError("noise level δ must be positive");
  if (terms < 1) throw PreconditionError("at least one series term is required");
  const double target = C * C * delta * delta;
  // a² S(a) increases from 0 towards π²/6 (+ 1/J with the tail) as a grows.
  auto above = [&](double a) { return a * a * counterexample_series(a, terms, tail_correction) >= target; };
  double lo = 1e-30;
  double hi = 1e3;
  if (above(lo) || !above(hi))
    throw ConvergenceError("counterexample equation not bracketed in [1e-30, 1e3] for δ = " +
                           std::to_string(delta));
  CounterexampleResult out;
  out.a = bisect_log(lo, hi, 1e-14, above);
  out.series = counterexample_series(out.a, terms, tail_correction);
  out.relative_residual = std::abs(out.a * out.a * out.series - target) / target;
  out.ratio = delta / std::sqrt(out.a);
  return out;
}

}  // namespace regkit
