#pragma once

#include <string>
#include <vector>

#include "annulus/operator_classes.hpp"

namespace annulus {

/// Orbit word p(T) = T^{n_1} T^{*m_1} ... T^{n_k} T^{*m_k}.
struct WordSpec {
  std::vector<int> n;  // nonnegative
  std::vector<int> m;  // nonnegative, same length

  int length() const;  // total letter count sum(n) + sum(m)
  void validate() const;
};

ComplexMatrix word_operator(const ComplexMatrix& t, const WordSpec& word);

/// Hermitian defect along the orbit word:
///   (1+r^2) p*p - (Tp)*(Tp) - r^2 (T^{-*}p)*(T^{-*}p) = p* defect(T) p.
/// PSD whenever T is a C1r member. Words longer than 6 letters per slot
/// vector are rejected.
ComplexMatrix word_defect(const ComplexMatrix& t, double r, const WordSpec& word,
                          const ToleranceConfig& tol = {});

inline constexpr int kMaxWordSlots = 6;

/// Block labels: per tuple entry, 0 = exact part (the restriction lies in
/// the exact class), 1 = completely-non-exact part.
struct DecompositionBlock {
  ComplexMatrix basis;            // dim x s orthonormal columns (s may be 0)
  std::vector<int> label;         // omega, one symbol per entry
  Eigen::Index dimension() const { return basis.cols(); }
  // Certificates of the restrictions, one value per tuple entry: for label
  // 0 the exact-class spectrum residual, for label 1 the smallest defect
  // eigenvalue of the restriction (the c.n.u. witness).
  std::vector<double> certificates;
};

struct DecompositionResult {
  std::vector<DecompositionBlock> blocks;  // lexicographic label order, 2^d blocks
  double projector_sum_residual = 0.0;
  double projector_orth_residual = 0.0;
  double reduction_residual = 0.0;  // worst ||(I - Pi) T_j Pi||, same for T_j*
  bool ambiguous = false;
  std::vector<std::string> notes;

  ComplexMatrix projector(std::size_t block_index) const;
};

/// Largest subspace of ker(defect) invariant under both T and T*; the
/// fixed-point iteration M_{i+1} = { x in M_i : Tx, T*x in M_i } starting
/// from M_0 = ker(defect) terminates within dim steps.
ComplexMatrix largest_reducing_kernel(const ComplexMatrix& t, const ComplexMatrix& defect,
                                      double kernel_tol);

/// Canonical split H = H_exact + H_cnu of a single C1r member.
DecompositionResult canonical_decompose(const ComplexMatrix& t, double r,
                                        const ToleranceConfig& tol = {});

struct CrossReductionReport {
  bool ok = false;
  double reduction_residual = 0.0;   // worst ||(I-Pi) B Pi||, ||(I-Pi) B* Pi||
  double commutator_residual = 0.0;  // worst ||[word_defect(A), B]|| over short words
};

/// The exact part of A reduces every operator that doubly commutes with A.
CrossReductionReport cross_reduction_check(const ComplexMatrix& a, const ComplexMatrix& b,
                                           double r, const ToleranceConfig& tol = {});

/// 2^d joint decomposition of a doubly commuting C1r tuple, one block per
/// label vector, empty blocks retained.
DecompositionResult tuple_decompose(const OperatorTuple& tuple, const ToleranceConfig& tol = {});

/// Quantum-annulus variant: decomposes (r T_j) at radius r^2 and keeps the
/// resulting projections (scaling by a constant does not move subspaces).
DecompositionResult tuple_decompose_qa(const OperatorTuple& tuple,
                                       const ToleranceConfig& tol = {});

}  // namespace annulus
