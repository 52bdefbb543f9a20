#include "regkit/operators.hpp"

#include "regkit/errors.hpp"

#include <cmath>
#include <string>

namespace regkit {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw PreconditionError(std::string(what) + ": entries must be finite");
}

void require_size(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
}

}  // namespace

LinearOperator LinearOperator::dense(Matrix entries) {
  require_finite(entries, "dense operator");
  const auto r = entries.rows();
  const auto c = entries.cols();
  return LinearOperator(Kind::Dense, r, c, std::move(entries), Vector());
}

LinearOperator LinearOperator::diagonal(Vector entries) {
  require_finite(entries, "diagonal operator");
  const auto n = entries.size();
  return LinearOperator(Kind::Diagonal, n, n, Matrix(), std::move(entries));
}

LinearOperator LinearOperator::symmetric(Matrix entries) {
  if (entries.rows() != entries.cols())
    throw DimensionError("symmetric operator must be square");
  require_finite(entries, "symmetric operator");
  for (Eigen::Index j = 0; j < entries.cols(); ++j)
    for (Eigen::Index i = j + 1; i < entries.rows(); ++i)
      if (entries(i, j) != entries(j, i))
        throw PreconditionError("symmetric operator: entry(" + std::to_string(i) + "," +
                                std::to_string(j) + ") differs from its transpose");
  const auto n = entries.rows();
  return LinearOperator(Kind::Symmetric, n, n, std::move(entries), Vector());
}

LinearOperator LinearOperator::identity(Eigen::Index n) {
  return symmetric(Matrix::Identity(n, n));
}

Vector LinearOperator::apply(const Vector& u) const {
  require_size(u.size(), cols_, "apply");
  if (kind_ == Kind::Diagonal) return diag_.cwiseProduct(u);
  return matrix_ * u;
}

Vector LinearOperator::apply_adjoint(const Vector& v) const {
  require_size(v.size(), rows_, "apply_adjoint");
  switch (kind_) {
    case Kind::Diagonal:
      return diag_.cwiseProduct(v);
    case Kind::Symmetric:
      return matrix_ * v;
    case Kind::Dense:
      break;
  }
  return matrix_.transpose() * v;
}

const Matrix& LinearOperator::matrix() const {
  if (kind_ == Kind::Diagonal) throw PreconditionError("diagonal operator has no dense storage");
  return matrix_;
}

const Vector& LinearOperator::diagonal_entries() const {
  if (kind_ != Kind::Diagonal) throw PreconditionError("operator is not diagonal");
  return diag_;
}

Matrix LinearOperator::to_dense() const {
  if (kind_ == Kind::Diagonal) return diag_.asDiagonal();
  return matrix_;
}

Matrix LinearOperator::gram() const {
  if (kind_ == Kind::Diagonal) return diag_.cwiseAbs2().asDiagonal();
  Matrix t = Matrix::Zero(cols_, cols_);
  t.selfadjointView<Eigen::Lower>().rankUpdate(matrix_.transpose());
  return t.selfadjointView<Eigen::Lower>();
}

Matrix LinearOperator::co_gram() const {
  if (kind_ == Kind::Diagonal) return diag_.cwiseAbs2().asDiagonal();
  Matrix q = Matrix::Zero(rows_, rows_);
  q.selfadjointView<Eigen::Lower>().rankUpdate(matrix_);
  return q.selfadjointView<Eigen::Lower>();
}

LinearOperator LinearOperator::transposed() const {
  if (is_selfadjoint()) return *this;
  return dense(matrix_.transpose());
}

struct RegularizedSolver::Factorization {
  Eigen::LLT<Matrix> llt;
};

RegularizedSolver::RegularizedSolver(const LinearOperator& op, double a,
                                     RegularizedSolveOptions opts)
    : op_(&op), a_(a), opts_(opts) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw PreconditionError("regularization parameter a must be positive, got " +
                            std::to_string(a));
  if (op.kind() == LinearOperator::Kind::Diagonal) return;

  const bool direct =
      opts_.backend == RegularizedBackend::Direct ||
      (opts_.backend == RegularizedBackend::Auto && op.cols() < opts_.dense_threshold);
  if (!direct) return;

  Matrix ta = op.gram();
  ta.diagonal().array() += a;
  factor_ = std::make_unique<Factorization>();
  factor_->llt.compute(ta);
  if (factor_->llt.info() != Eigen::Success)
    throw ConvergenceError("Cholesky factorization of AᵀA + aI failed (a = " +
                           std::to_string(a) + ")");
}

RegularizedSolver::~RegularizedSolver() = default;
RegularizedSolver::RegularizedSolver(RegularizedSolver&&) noexcept = default;
RegularizedSolver& RegularizedSolver::operator=(RegularizedSolver&&) noexcept = default;

Vector RegularizedSolver::solve(const Vector& rhs) const {
  require_size(rhs.size(), op_->cols(), "solve_regularized");
  last_iterations_ = 0;
  if (op_->kind() == LinearOperator::Kind::Diagonal &&
      opts_.backend != RegularizedBackend::ConjugateGradient) {
    return rhs.array() / (op_->diagonal_entries().array().square() + a_);
  }
  if (factor_) return factor_->llt.solve(rhs);

  // Conjugate gradients on the normal equations, matrix-free.
  const double rhs_norm = rhs.norm();
  Vector u = Vector::Zero(rhs.size());
  if (rhs_norm == 0.0) return u;
  const int max_iter = opts_.cg_max_iter > 0 ? opts_.cg_max_iter
                                             : static_cast<int>(10 * op_->cols() + 10);
  Vector r = rhs;
  Vector p = r;
  double rr = r.squaredNorm();
  const double stop = opts_.cg_rel_tol * rhs_norm;
  int it = 0;
  for (; it < max_iter && std::sqrt(rr) > stop; ++it) {
    const Vector tp = op_->apply_adjoint(op_->apply(p)) + a_ * p;
    const double alpha = rr / p.dot(tp);
    u += alpha * p;
    r -= alpha * tp;
    const double rr_new = r.squaredNorm();
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  last_iterations_ = it;
  const double true_res = regularized_residual(*op_, a_, u, rhs);
  if (true_res > 1e-10 * rhs_norm)
    throw ConvergenceError("conjugate gradients stalled: relative residual " +
                           std::to_string(true_res / rhs_norm));
  return u;
}

Vector solve_regularized(const LinearOperator& op, double a, const Vector& rhs,
                         RegularizedSolveOptions opts) {
  return RegularizedSolver(op, a, opts).solve(rhs);
}

double regularized_residual(const LinearOperator& op, double a, const Vector& u,
                            const Vector& rhs) {
  return (op.apply_adjoint(op.apply(u)) + a * u - rhs).norm();
}

ForwardProblem reduce_to_selfadjoint(const ForwardProblem& problem) {
  const LinearOperator& a = problem.op;
  LinearOperator t = a.kind() == LinearOperator::Kind::Diagonal
                         ? LinearOperator::diagonal(a.diagonal_entries().cwiseAbs2())
                         : LinearOperator::symmetric(a.gram());
  return ForwardProblem{std::move(t), problem.exact_solution, a.apply_adjoint(problem.exact_data),
                        problem.null_dim};
}

}  // namespace regkit
