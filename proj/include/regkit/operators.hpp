#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>

namespace regkit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;

/// Finite-dimensional bounded linear operator A: R^cols → R^rows.
///
/// Three storage kinds are supported. Diagonal and symmetric operators are
/// selfadjoint, so apply() and apply_adjoint() coincide for them.
class LinearOperator {
 public:
  enum class Kind { Dense, Diagonal, Symmetric };

  static LinearOperator dense(Matrix entries);
  static LinearOperator diagonal(Vector entries);
  /// Throws PreconditionError unless entry(i,j) == entry(j,i) bitwise.
  static LinearOperator symmetric(Matrix entries);
  static LinearOperator identity(Eigen::Index n);

  Kind kind() const { return kind_; }
  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  bool is_selfadjoint() const { return kind_ != Kind::Dense; }

  /// A u.
  Vector apply(const Vector& u) const;
  /// Aᵀ v.
  Vector apply_adjoint(const Vector& v) const;

  /// Dense matrix stored for Dense/Symmetric kinds. Throws for Diagonal.
  const Matrix& matrix() const;
  /// Diagonal entries. Throws for non-diagonal kinds.
  const Vector& diagonal_entries() const;

  Matrix to_dense() const;
  /// T = AᵀA as a dense matrix.
  Matrix gram() const;
  /// Q = AAᵀ as a dense matrix.
  Matrix co_gram() const;
  /// Aᵀ as an operator (same kind for selfadjoint kinds).
  LinearOperator transposed() const;

 private:
  LinearOperator(Kind kind, Eigen::Index rows, Eigen::Index cols, Matrix m, Vector d)
      : kind_(kind), rows_(rows), cols_(cols), matrix_(std::move(m)), diag_(std::move(d)) {}

  Kind kind_;
  Eigen::Index rows_;
  Eigen::Index cols_;
  Matrix matrix_;
  Vector diag_;
};

/// Exact problem A y = f with y the minimal-norm solution.
struct ForwardProblem {
  LinearOperator op;
  Vector exact_solution;  // y
  Vector exact_data;      // f = A y
  Eigen::Index null_dim = 0;
};

/// Perturbed data f_δ with ‖f_δ − f‖ ≤ δ.
struct NoisyData {
  Vector data;
  double delta = 0.0;
  std::uint64_t seed = 0;
};

enum class RegularizedBackend { Auto, Direct, ConjugateGradient };

struct RegularizedSolveOptions {
  RegularizedBackend backend = RegularizedBackend::Auto;
  /// Auto uses the dense factorization below this column count.
  Eigen::Index dense_threshold = 2000;
  double cg_rel_tol = 1e-12;
  int cg_max_iter = 0;  // 0 → 10·cols
};

/// Solver for (AᵀA + aI) u = rhs with the factorization kept between calls.
/// The operator must outlive the solver.
class RegularizedSolver {
 public:
  RegularizedSolver(const LinearOperator& op, double a, RegularizedSolveOptions opts = {});
  ~RegularizedSolver();
  RegularizedSolver(RegularizedSolver&&) noexcept;
  RegularizedSolver& operator=(RegularizedSolver&&) noexcept;

  Vector solve(const Vector& rhs) const;
  double a() const { return a_; }
  /// Conjugate-gradient iterations used by the last solve (0 for direct solves).
  int last_iterations() const { return last_iterations_; }

 private:
  struct Factorization;
  const LinearOperator* op_;
  double a_;
  RegularizedSolveOptions opts_;
  std::unique_ptr<Factorization> factor_;
  mutable int last_iterations_ = 0;
};

/// Unique u with (AᵀA + aI) u = rhs.
Vector solve_regularized(const LinearOperator& op, double a, const Vector& rhs,
                         RegularizedSolveOptions opts = {});

/// Replaces A u = f by T u = Aᵀ f, T = AᵀA, keeping y.
ForwardProblem reduce_to_selfadjoint(const ForwardProblem& problem);

/// ‖(AᵀA + aI) u − rhs‖.
double regularized_residual(const LinearOperator& op, double a, const Vector& u,
                            const Vector& rhs);

}  // namespace regkit
