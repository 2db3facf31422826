#pragma once

#include "annulus/types.hpp"

namespace annulus {

struct HermitianEig {
  RealVector eigenvalues;      // ascending
  ComplexMatrix eigenvectors;  // unitary, columns phase-fixed
};

struct PolarDecomposition {
  ComplexMatrix unitary;   // U
  ComplexMatrix positive;  // D = (T*T)^{1/2}
};

struct PsdCheck {
  bool psd = false;
  double min_eigenvalue = 0.0;
};

void require_square(const ComplexMatrix& a, const char* who);
void require_finite(const ComplexMatrix& a, const char* who);

ComplexMatrix adjoint(const ComplexMatrix& a);

/// max |a_ij - b_ij|; convenience for tests and residual reporting.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized as
/// (A + A*)/2 before solving; inputs farther than eq_tol from Hermitian are
/// rejected. Eigenvalues come back ascending and each eigenvector has its
/// first nonzero component rotated to the positive real axis so repeated
/// runs produce identical bases.
HermitianEig hermitian_eig(const ComplexMatrix& a, const ToleranceConfig& tol = {});

/// Hermitian square root of a PSD matrix, eigenvalues clamped at zero.
ComplexMatrix hermitian_sqrt(const ComplexMatrix& a, const ToleranceConfig& tol = {});

/// T = U D with U unitary and D = (T*T)^{1/2} positive definite.
/// Throws SingularMatrixError when the smallest singular value of T is
/// below kernel_tol.
PolarDecomposition polar_decompose(const ComplexMatrix& t, const ToleranceConfig& tol = {});

/// Orthonormal basis (as columns) of the numerical kernel: right singular
/// vectors whose singular value is <= tol * max(sigma_max, or 1 if A = 0).
ComplexMatrix null_space(const ComplexMatrix& a, double tol);

double operator_norm(const ComplexMatrix& a);
double smallest_singular_value(const ComplexMatrix& a);

/// PSD test with witness: true iff the smallest eigenvalue of the
/// (symmetrized) input is >= -tol.
PsdCheck is_psd(const ComplexMatrix& a, double tol, const ToleranceConfig& cfg = {});

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

/// n-th integer power, negative exponents via LU solve of the inverse.
ComplexMatrix matrix_power(const ComplexMatrix& a, int n);

}  // namespace annulus
