#pragma once

#include "regkit/operators.hpp"

namespace regkit {

/// Eigendecomposition of T = AᵀA and Q = AAᵀ, obtained from the SVD of A.
///
/// The resolution of the identity of T is represented by the columns of
/// `basis`; spectral integrals ∫ φ(s) d(E_s v, v) become Σ_k φ(s_k) ⟨v, e_k⟩².
/// Eigenvalues below `zero_threshold` are stored as exactly 0 and their
/// eigenvectors span the numerical null space N.
struct SpectralModel {
  Vector eigenvalues;      // s_k of T, nonincreasing, length cols
  Matrix basis;            // orthonormal eigenvectors of T (columns)
  Vector co_eigenvalues;   // q_k of Q, nonincreasing, length rows
  Matrix co_basis;         // orthonormal eigenvectors of Q (columns)
  Vector singular_values;  // raw singular values of A, before clamping
  double zero_threshold = 0.0;

  Eigen::Index null_dim() const;
  Eigen::Index co_null_dim() const;
  double max_eigenvalue() const { return eigenvalues.size() ? eigenvalues(0) : 0.0; }

  /// Coefficients ⟨v, e_k⟩ in the T-eigenbasis.
  Vector coefficients(const Vector& v) const { return basis.transpose() * v; }
  /// Coefficients ⟨v, e_k⟩ in the Q-eigenbasis.
  Vector co_coefficients(const Vector& v) const { return co_basis.transpose() * v; }

  /// ‖P_N v‖.
  double null_component_norm(const Vector& v) const;
  /// ‖P_{N*} v‖ with N* = N(Aᵀ) = N(Q).
  double co_null_component_norm(const Vector& v) const;
};

/// Relative threshold below which eigenvalues of T count as zero.
inline constexpr double kNullThreshold = 1e-12;

SpectralModel decompose(const LinearOperator& op);

/// Eigendecomposition of a selfadjoint operator B itself (signed spectrum),
/// used by the complex-valued flows.
struct SelfadjointModel {
  Vector eigenvalues;  // nonincreasing, may be negative
  Matrix basis;
};

SelfadjointModel decompose_selfadjoint(const LinearOperator& op);

/// y = Σ_{s_k>0} s_k⁻¹ ⟨Aᵀf, e_k⟩ e_k. Throws InconsistentDataError when f has
/// a component outside range(A) larger than 1e−8‖f‖.
Vector minimal_norm_solution(const SpectralModel& model, const LinearOperator& op,
                             const Vector& f);

/// η(a) = ‖T_a⁻¹T y − y‖.
double eta(const SpectralModel& model, const Vector& y, double a);

/// h(a, δ) = ‖(A T_a⁻¹ Aᵀ − I) f_δ‖² evaluated on the spectrum of Q.
double discrepancy_h(const SpectralModel& model, const Vector& f_delta, double a);

/// max_k √s_k / (s_k + a), the operator norm of T_a⁻¹Aᵀ.
double gamma_norm_bound(const SpectralModel& model, double a);

/// T_a⁻¹Aᵀ f computed spectrally (the exact Tikhonov minimizer).
Vector spectral_tikhonov(const SpectralModel& model, const Vector& f, double a);

}  // namespace regkit
