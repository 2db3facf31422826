#pragma once

#include <string>
#include <vector>

#include "annulus/operator_classes.hpp"

namespace annulus {

/// T_j = U_j D_j with U_j unitary and D_j = (T_j*T_j)^{1/2}; for a doubly
/// commuting tuple the factors commute across entries.
struct UDFactorization {
  double r = 0.5;
  std::vector<ComplexMatrix> unitaries;
  std::vector<ComplexMatrix> positives;
  /// False when some entry fails the C1r certificate; the factorization is
  /// still valid, but spec(D_j) need not sit inside [r, 1].
  bool all_c1r = true;

  int arity() const { return static_cast<int>(unitaries.size()); }
  Eigen::Index dim() const { return unitaries.empty() ? 0 : unitaries.front().rows(); }

  /// Worst residual over reconstruction, unitarity and the cross-entry
  /// commutation relations (T_iD_j, D_iD_j, U_iU_j, U_iD_j for i != j).
  double relation_residual(const OperatorTuple& source) const;
};

UDFactorization ud_factorize(const OperatorTuple& tuple, const ToleranceConfig& tol = {});

/// A joint eigenspace of the commuting positives: per-entry eigenvalue and
/// an orthonormal basis slice of the common eigenbasis.
struct JointCluster {
  std::vector<double> eigenvalues;  // one per tuple entry
  int first_column = 0;
  int rank = 0;
};

/// Simultaneous spectral data for D_1, ..., D_d: one unitary whose columns
/// are joint eigenvectors, the joint clusters, and per-entry spectral
/// projections P_{j,a} with eigenvalues listed ascending.
struct SpectralResolution {
  ComplexMatrix basis;
  std::vector<JointCluster> joint;
  std::vector<std::vector<double>> eigenvalues;        // [entry][alpha]
  std::vector<std::vector<ComplexMatrix>> projections;  // [entry][alpha]
  bool ambiguous = false;
  std::vector<std::string> notes;

  int arity() const { return static_cast<int>(eigenvalues.size()); }
  /// max residual over idempotence, sum-to-identity, mutual orthogonality
  /// and cross-entry commutation of the projections.
  double projection_residual() const;
};

/// Gap below which two eigenvalues fall into one cluster.
inline constexpr double kClusterGap = 1e-8;

SpectralResolution joint_spectral_resolution(const UDFactorization& fact, double r,
                                             const ToleranceConfig& tol = {});

/// Nearest point of the dyadic midpoint grid
/// { r + (k + 1/2) (1-r) / 2^m : k = 0 .. 2^m - 1 }  (a subset of (r, 1)).
double dyadic_snap_value(double lambda, double r, int level);

/// The tuple with every eigenvalue of D_j snapped onto the level-m grid:
/// D_{m,j} = s_m(D_j), T_{m,j} = U_j D_{m,j}. Keeps both approximation
/// bounds as measured values.
struct DyadicApproximation {
  int level = 0;
  double bound = 0.0;  // 2^{-m}
  std::vector<ComplexMatrix> snapped_positives;
  std::vector<ComplexMatrix> snapped_ops;
  std::vector<double> op_deltas;   // ||T_{m,j} - T_j||
  std::vector<double> inv_deltas;  // ||T_{m,j}^{-1} - T_j^{-1}||

  OperatorTuple snapped_tuple(double r) const;
};

/// Requires spec(D_j) within [r - eq_tol, 1 + eq_tol].
DyadicApproximation snap_spectrum(const UDFactorization& fact, double r, int level,
                                  const ToleranceConfig& tol = {});

}  // namespace annulus
