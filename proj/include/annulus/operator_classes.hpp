#pragma once

#include <array>
#include <vector>

#include "annulus/matrix_core.hpp"
#include "annulus/types.hpp"

namespace annulus {

/// d invertible operators on a common finite-dimensional space together
/// with the inner radius r of the annulus they are measured against.
struct OperatorTuple {
  double r = 0.5;
  std::vector<ComplexMatrix> ops;

  int arity() const { return static_cast<int>(ops.size()); }
  Eigen::Index dim() const { return ops.empty() ? 0 : ops.front().rows(); }

  /// Checks r in (kernel_tol, 1 - kernel_tol), equal square dims, finite
  /// entries, and invertibility of every entry.
  void validate(const ToleranceConfig& tol = {}) const;
};

// Four membership certificates per operator:
//   C1r      : ||T|| <= 1 and ||r T^{-1}|| <= 1
//   QAr      : ||rT|| <= 1 and ||r T^{-1}|| <= 1
//   ExactC1r : T*T = P0 + r^2 P1      (defect exactly zero)
//   ExactQAr : T*T = r^2 P0 + r^{-2} P1
enum class ClassTag { C1r, QAr, ExactC1r, ExactQAr };

const char* class_tag_name(ClassTag tag);

struct ClassCertificate {
  ClassTag tag = ClassTag::C1r;
  bool member = false;
  // Norm route witnesses: (||T||, ||rT^{-1}||) for the C-classes,
  // (||rT||, ||rT^{-1}||) for the QA-classes.
  double witness_norm = 0.0;
  double witness_inv_norm = 0.0;
  // Defect route witness: smallest eigenvalue of the defect matrix.
  double defect_min_eig = 0.0;
  // Exact classes only: ||defect|| and the distance of spec(T*T) from the
  // admissible two-point set.
  double defect_residual_norm = 0.0;
  double spectrum_residual = 0.0;
};

/// (1 + r^2) I - T*T - r^2 T^{-1} T^{-*}; PSD exactly on the C1r class.
ComplexMatrix defect_c1r(const ComplexMatrix& t, double r, const ToleranceConfig& tol = {});

/// (r^{-2} + r^2) I - T*T - T^{-1} T^{-*}; PSD exactly on the QAr class.
ComplexMatrix defect_qar(const ComplexMatrix& t, double r, const ToleranceConfig& tol = {});

/// All four certificates, in the order C1r, QAr, ExactC1r, ExactQAr.
std::array<ClassCertificate, 4> classify(const ComplexMatrix& t, double r,
                                         const ToleranceConfig& tol = {});

const ClassCertificate& certificate_for(const std::array<ClassCertificate, 4>& certs,
                                        ClassTag tag);

/// T in C1r  <->  r^{-1/2} T in QA_{sqrt(r)}.
std::pair<ComplexMatrix, double> scale_c1r_to_qa(const ComplexMatrix& t, double r,
                                                 const ToleranceConfig& tol = {});

/// T in QAr  <->  r T in C_{1, r^2}.
std::pair<ComplexMatrix, double> qa_to_c1r(const ComplexMatrix& t, double r,
                                           const ToleranceConfig& tol = {});

struct CommutationCheck {
  bool doubly_commuting = false;
  double max_residual = 0.0;  // worst of |T_iT_j - T_jT_i|, |T_iT_j* - T_j*T_i|
};

CommutationCheck is_doubly_commuting(const OperatorTuple& tuple, const ToleranceConfig& tol = {});

void validate_radius(double r, const ToleranceConfig& tol);

}  // namespace annulus
