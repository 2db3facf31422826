#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace annulus {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical thresholds shared by every module.
///   eq_tol     entrywise / operator-norm equality threshold
///   psd_tol    how negative an eigenvalue may be and still count as >= 0
///   kernel_tol relative singular-value cutoff for rank / kernel decisions
struct ToleranceConfig {
  double eq_tol = 1e-10;
  double psd_tol = 1e-10;
  double kernel_tol = 1e-8;

  void validate() const;
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong shape, non-finite entries, bad parameters.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// An operator that must be invertible is numerically singular.
class SingularMatrixError : public Error {
 public:
  SingularMatrixError(const std::string& what, double smallest_sv)
      : Error(what), smallest_singular_value(smallest_sv) {}
  double smallest_singular_value = 0.0;
};

class NonHermitianError : public Error {
 public:
  using Error::Error;
};

/// A required class membership certificate failed.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// A decision depends on a kernel/cluster dimension that is not stable
/// under perturbation of the cutoff.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

}  // namespace annulus
