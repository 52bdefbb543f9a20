#include "regkit/spectral.hpp"

#include "regkit/errors.hpp"
#include "regkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace regkit {

namespace {

void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw PreconditionError(std::string(what) + ": parameter a must be positive, got " +
                            std::to_string(a));
}

/// Clamps tiny eigenvalues to zero and returns the threshold used.
double clamp_spectrum(Vector& s) {
  const double s_max = s.size() ? std::max(s.maxCoeff(), 0.0) : 0.0;
  const double threshold = kNullThreshold * s_max;
  for (auto& v : s)
    if (v < threshold || v < 0.0) v = 0.0;
  return threshold;
}

SpectralModel decompose_diagonal(const Vector& d) {
  const Eigen::Index n = d.size();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return std::abs(d(i)) > std::abs(d(j)); });

  SpectralModel m;
  m.singular_values.resize(n);
  m.basis = Matrix::Zero(n, n);
  m.co_basis = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index i = order[k];
    m.singular_values(k) = std::abs(d(i));
    m.basis(i, k) = 1.0;
    m.co_basis(i, k) = d(i) < 0.0 ? -1.0 : 1.0;
  }
  m.eigenvalues = m.singular_values.cwiseAbs2();
  m.zero_threshold = clamp_spectrum(m.eigenvalues);
  m.co_eigenvalues = m.eigenvalues;
  return m;
}

}  // namespace

Eigen::Index SpectralModel::null_dim() const {
  return static_cast<Eigen::Index>((eigenvalues.array() == 0.0).count());
}

Eigen::Index SpectralModel::co_null_dim() const {
  return static_cast<Eigen::Index>((co_eigenvalues.array() == 0.0).count());
}

double SpectralModel::null_component_norm(const Vector& v) const {
  const Vector c = coefficients(v);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (eigenvalues(k) == 0.0) acc += c(k) * c(k);
  return std::sqrt(acc);
}

double SpectralModel::co_null_component_norm(const Vector& v) const {
  const Vector c = co_coefficients(v);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < c.size(); ++k)
    if (co_eigenvalues(k) == 0.0) acc += c(k) * c(k);
  return std::sqrt(acc);
}

SpectralModel decompose(const LinearOperator& op) {
  if (op.kind() == LinearOperator::Kind::Diagonal) return decompose_diagonal(op.diagonal_entries());

  Eigen::BDCSVD<Matrix> svd(op.matrix(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.info() != Eigen::Success)
    throw ConvergenceError("singular value decomposition did not converge");

  const Eigen::Index m = op.rows();
  const Eigen::Index n = op.cols();
  const Eigen::Index r = std::min(m, n);

  SpectralModel model;
  model.singular_values = svd.singularValues();
  model.basis = svd.matrixV();
  model.co_basis = svd.matrixU();
  model.eigenvalues = Vector::Zero(n);
  model.co_eigenvalues = Vector::Zero(m);
  model.eigenvalues.head(r) = model.singular_values.head(r).cwiseAbs2();
  model.zero_threshold = clamp_spectrum(model.eigenvalues);
  model.co_eigenvalues.head(r) = model.eigenvalues.head(r);
  return model;
}

SelfadjointModel decompose_selfadjoint(const LinearOperator& op) {
  SelfadjointModel model;
  if (op.kind() == LinearOperator::Kind::Diagonal) {
    const Vector& d = op.diagonal_entries();
    const Eigen::Index n = d.size();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index i, Eigen::Index j) { return d(i) > d(j); });
    model.eigenvalues.resize(n);
    model.basis = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      model.eigenvalues(k) = d(order[k]);
      model.basis(order[k], k) = 1.0;
    }
    return model;
  }
  if (op.kind() != LinearOperator::Kind::Symmetric)
    throw PreconditionError("decompose_selfadjoint requires a symmetric or diagonal operator");

  Eigen::SelfAdjointEigenSolver<Matrix> es(op.matrix());
  if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver did not converge");
  // Eigen returns ascending order.
  model.eigenvalues = es.eigenvalues().reverse();
  model.basis = es.eigenvectors().rowwise().reverse();
  return model;
}

Vector minimal_norm_solution(const SpectralModel& model, const LinearOperator& op,
                             const Vector& f) {
  if (f.size() != op.rows()) throw DimensionError("minimal_norm_solution: data length mismatch");
  const double outside = model.co_null_component_norm(f);
  if (outside > 1e-8 * f.norm())
    throw InconsistentDataError("data has a component of norm " + std::to_string(outside) +
                                " outside the range of A");
  // y = Σ σ_k⁻¹ ⟨f, u_k⟩ v_k avoids squaring the conditioning through Aᵀf.
  const Vector beta = model.co_coefficients(f);
  Vector w = Vector::Zero(model.basis.cols());
  for (Eigen::Index k = 0; k < model.singular_values.size(); ++k)
    if (model.eigenvalues(k) > 0.0) w(k) = beta(k) / model.singular_values(k);
  return model.basis * w;
}

double eta(const SpectralModel& model, const Vector& y, double a) {
  require_positive(a, "eta");
  const Vector c = model.coefficients(y);
  std::vector<double> terms(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double filt = a / (model.eigenvalues(k) + a);
    terms[k] = filt * filt * c(k) * c(k);
  }
  return std::sqrt(std::max(0.0, spectral_sum(std::move(terms))));
}

// h and the Tikhonov filter use the unclamped σ_k², so that h(a) is the
// squared residual of spectral_tikhonov() for the operator itself.
double discrepancy_h(const SpectralModel& model, const Vector& f_delta, double a) {
  require_positive(a, "discrepancy_h");
  const Vector c = model.co_coefficients(f_delta);
  const Eigen::Index r = model.singular_values.size();
  std::vector<double> terms(c.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const double q = k < r ? model.singular_values(k) * model.singular_values(k) : 0.0;
    const double filt = a / (q + a);
    terms[k] = filt * filt * c(k) * c(k);
  }
  return spectral_sum(std::move(terms));
}

double gamma_norm_bound(const SpectralModel& model, double a) {
  require_positive(a, "gamma_norm_bound");
  double best = 0.0;
  for (double s : model.eigenvalues) best = std::max(best, std::sqrt(s) / (s + a));
  return best;
}

Vector spectral_tikhonov(const SpectralModel& model, const Vector& f, double a) {
  require_positive(a, "spectral_tikhonov");
  if (f.size() != model.co_basis.rows()) throw DimensionError("spectral_tikhonov: data length mismatch");
  const Eigen::Index r = model.singular_values.size();
  const Vector beta = model.co_coefficients(f);
  Vector w = Vector::Zero(model.basis.cols());
  for (Eigen::Index k = 0; k < r; ++k) {
    const double sigma = model.singular_values(k);
    w(k) = sigma / (sigma * sigma + a) * beta(k);
  }
  return model.basis * w;
}

}  // namespace regkit
