#pragma once

#include <optional>
#include <vector>

#include "annulus/conformal.hpp"
#include "annulus/spectral_factor.hpp"

namespace annulus {

/// Matrix-valued boundary symbol family
///   F_j(z) = U_j * sum_a v_{j,a}(z) P_{j,a}
/// with F_j(0) = T_j, pairwise double commutation at every z, and boundary
/// singular values on {inner_r, 1}.
struct SymbolFamily {
  double inner_r = 0.5;  // class radius of the symbols
  Eigen::Index dim = 0;
  std::vector<ComplexMatrix> unitaries;                       // U_j
  std::vector<std::vector<ComplexMatrix>> projections;        // P_{j,a}
  std::vector<std::vector<RecenteredSymbolParams>> symbols;   // per (j,a)
  std::vector<double> exceptional_angles;                     // all (j,a) pullbacks

  /// The tuple the symbols reproduce at z = 0 (snapped when snapping ran).
  OperatorTuple represented;
  int snap_level = 0;        // 0 = no snapping
  double snap_bound = 0.0;   // 2^{-m} when snapped
  double max_op_delta = 0.0;   // worst measured ||T_m - T||
  double max_inv_delta = 0.0;  // worst measured ||T_m^{-1} - T^{-1}||

  int arity() const { return static_cast<int>(unitaries.size()); }
  ComplexMatrix evaluate(int j, Complex z) const;
  ComplexMatrix evaluate_inverse(int j, Complex z) const;
};

/// Builds the symbol family; requires every eigenvalue of (T_j*T_j)^{1/2}
/// strictly inside (r, 1) (farther than eq_tol from both endpoints).
SymbolFamily build_symbols(const OperatorTuple& tuple, const ToleranceConfig& tol = {});

/// Same, but spectra touching the endpoints are first moved strictly
/// inside by dyadic snapping at the given level.
SymbolFamily build_symbols_auto(const OperatorTuple& tuple, int snap_level = 20,
                                const ToleranceConfig& tol = {});

inline constexpr double kGoldenOffsetStart = 0.3819660112501051;
inline constexpr double kGoldenRatioStep = 0.6180339887498949;
inline constexpr int kOffsetRetries = 64;
/// Nodes are never placed closer than this (in radians) to an exceptional
/// point, matching the exceptional neighbourhood radius of the scalar map.
inline constexpr double kClearanceFloor = 1e-9;

/// Quadrature discretization of the multiplication-operator dilation:
/// nodes zeta_k = exp(2 pi i (k + theta0)/N), equal weights 1/N, block
/// diagonal M_j = diag_k blocks[j][k], and the isometry V h = (h, ..., h)/sqrt(N).
struct DilationModel {
  int node_count = 0;
  double theta0 = 0.0;
  double min_clearance = 0.0;   // achieved node-to-exceptional-point distance
  bool clearance_met = false;   // true when >= pi/(4N)
  std::vector<Complex> nodes;
  std::vector<std::vector<ComplexMatrix>> blocks;      // [entry][node]
  std::vector<std::vector<ComplexMatrix>> inv_blocks;  // [entry][node]
  Eigen::Index dim = 0;

  ClassTag node_class = ClassTag::ExactC1r;
  double class_r = 0.5;      // radius parameter of the node-class identity
  double modulus_sq_lo = 0.0, modulus_sq_hi = 1.0;
  double scale = 1.0;        // r^{-1} on the quantum-annulus route

  int snap_level = 0;
  double snap_bound = 0.0;
  double max_op_delta = 0.0;
  double max_inv_delta = 0.0;

  int arity() const { return static_cast<int>(blocks.size()); }

  /// V* M_1^{n_1} ... M_d^{n_d} V = (1/N) sum_k prod_j blocks[j][k]^{n_j},
  /// accumulated in fixed node order.
  ComplexMatrix compressed_power(const std::vector<int>& powers) const;
};

DilationModel build_dilation(const SymbolFamily& sym, int node_count,
                             const ToleranceConfig& tol = {});

struct NodeClassReport {
  double spectrum_residual = 0.0;  // worst |eig(F*F) - {lo, hi}| over nodes
  double defect_residual = 0.0;    // worst exact-class defect norm over nodes
};

/// Exactness of the node class: every block's Gram spectrum sits on the
/// admissible two-point set and the exact-class defect vanishes.
NodeClassReport verify_node_class(const DilationModel& model);

/// Worst double-commutation residual of the blocks over all nodes.
double node_double_commutation(const DilationModel& model);

struct MomentEntry {
  std::vector<int> powers;
  double error = 0.0;  // ||T^n - V* M^n V||
};

inline constexpr int kMaxMomentPower = 12;

/// Full error table over powers n in [-max_power, max_power]^d, measured
/// against the given tuple.
std::vector<MomentEntry> verify_moments(const DilationModel& model, const OperatorTuple& tuple,
                                        int max_power);

double max_moment_error(const std::vector<MomentEntry>& table);

/// Quantum-annulus dilation by scaling: builds the C_{1, r^2} model of
/// (r T_1, ..., r T_d) and rescales the node blocks by r^{-1}; the scaled
/// blocks satisfy the exact quantum-annulus identity node-wise.
DilationModel dilate_qar(const OperatorTuple& tuple, int node_count, int snap_level = 20,
                         const ToleranceConfig& tol = {});

}  // namespace annulus
