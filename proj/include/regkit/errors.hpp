#pragma once

#include <stdexcept>
#include <string>

namespace regkit {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Vector or matrix sizes do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A method was called outside the range where it is defined
/// (nonpositive regularization parameter, ‖f_δ‖ ≤ Cδ, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A factorization, eigensolver, root finder or quadrature did not converge.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Data are inconsistent with the operator (e.g. f outside the range of A).
class InconsistentDataError : public Error {
 public:
  using Error::Error;
};

/// An approximate minimizer failed its F-value certificate.
class CertificationError : public Error {
 public:
  CertificationError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  /// F(u) − (m + (C² − 1 − b)δ²); positive when certification failed.
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

}  // namespace regkit
