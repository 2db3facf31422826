#include "annulus/matrix_core.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace annulus {

void ToleranceConfig::validate() const {
  auto in_range = [](double v) { return v >= 0.0 && v < 1.0; };
  if (!in_range(eq_tol) || !in_range(psd_tol) || !in_range(kernel_tol)) {
    throw InvalidInputError("tolerances must lie in [0, 1)");
  }
}

void require_square(const ComplexMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InvalidInputError(std::string(who) + ": matrix must be square and nonempty, got " +
                            std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

void require_finite(const ComplexMatrix& a, const char* who) {
  if (!a.allFinite()) {
    throw InvalidInputError(std::string(who) + ": matrix has NaN/Inf entries");
  }
}

ComplexMatrix adjoint(const ComplexMatrix& a) { return a.adjoint(); }

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInputError("max_abs_diff: shape mismatch");
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

namespace {

// Rotate each column so its first component of nonnegligible magnitude is
// real positive; deterministic tie-breaking for repeated eigenvalues.
void fix_phases(ComplexMatrix& q) {
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    Eigen::Index pivot = -1;
    double best = 0.0;
    for (Eigen::Index r = 0; r < q.rows(); ++r) {
      double m = std::abs(q(r, c));
      if (m > 1e-12) {
        pivot = r;
        break;
      }
      if (m > best) {
        best = m;
        pivot = r;
      }
    }
    if (pivot < 0) continue;
    Complex z = q(pivot, c);
    double m = std::abs(z);
    if (m > 0.0) q.col(c) *= std::conj(z) / m;
  }
}

}  // namespace

HermitianEig hermitian_eig(const ComplexMatrix& a, const ToleranceConfig& tol) {
  require_square(a, "hermitian_eig");
  require_finite(a, "hermitian_eig");
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double herm_gap = max_abs_diff(a, a.adjoint().eval());
  if (herm_gap > tol.eq_tol * scale) {
    throw NonHermitianError("hermitian_eig: input is not Hermitian (|A - A*| = " +
                            std::to_string(herm_gap) + ")");
  }
  ComplexMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw Error("hermitian_eig: eigensolver failed to converge");
  }
  HermitianEig out{solver.eigenvalues(), solver.eigenvectors()};
  fix_phases(out.eigenvectors);
  return out;
}

ComplexMatrix hermitian_sqrt(const ComplexMatrix& a, const ToleranceConfig& tol) {
  HermitianEig eig = hermitian_eig(a, tol);
  RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
}

PolarDecomposition polar_decompose(const ComplexMatrix& t, const ToleranceConfig& tol) {
  require_square(t, "polar_decompose");
  require_finite(t, "polar_decompose");
  double sv_min = smallest_singular_value(t);
  if (sv_min <= tol.kernel_tol) {
    throw SingularMatrixError("polar_decompose: matrix is numerically singular", sv_min);
  }
  HermitianEig eig = hermitian_eig((t.adjoint() * t).eval(), tol);
  RealVector roots = eig.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  ComplexMatrix d = eig.eigenvectors * roots.asDiagonal() * eig.eigenvectors.adjoint();
  ComplexMatrix d_inv =
      eig.eigenvectors * roots.cwiseInverse().asDiagonal() * eig.eigenvectors.adjoint();
  return PolarDecomposition{t * d_inv, d};
}

ComplexMatrix null_space(const ComplexMatrix& a, double tol) {
  require_finite(a, "null_space");
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = sv.size() > 0 ? sv(0) : 0.0;
  double cutoff = tol * (top > 0.0 ? top : 1.0);
  Eigen::Index keep_from = sv.size();
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) {
      keep_from = i;
      break;
    }
  }
  Eigen::Index rank_def = a.cols() - keep_from;
  ComplexMatrix basis = svd.matrixV().rightCols(rank_def);
  fix_phases(basis);
  return basis;
}

double operator_norm(const ComplexMatrix& a) {
  require_finite(a, "operator_norm");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double smallest_singular_value(const ComplexMatrix& a) {
  require_finite(a, "smallest_singular_value");
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& sv = svd.singularValues();
  return sv.size() > 0 ? sv(sv.size() - 1) : 0.0;
}

PsdCheck is_psd(const ComplexMatrix& a, double tol, const ToleranceConfig& cfg) {
  HermitianEig eig = hermitian_eig(a, cfg);
  double min_eig = eig.eigenvalues.size() > 0 ? eig.eigenvalues(0) : 0.0;
  return PsdCheck{min_eig >= -tol, min_eig};
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

ComplexMatrix matrix_power(const ComplexMatrix& a, int n) {
  require_square(a, "matrix_power");
  Eigen::Index dim = a.rows();
  ComplexMatrix base = a;
  if (n < 0) {
    Eigen::PartialPivLU<ComplexMatrix> lu(a);
    base = lu.inverse();
  }
  ComplexMatrix out = ComplexMatrix::Identity(dim, dim);
  for (int k = 0; k < std::abs(n); ++k) out = out * base;
  return out;
}

}  // namespace annulus
