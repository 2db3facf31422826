#include "annulus/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

namespace annulus {

int WordSpec::length() const {
  int total = 0;
  for (int v : n) total += v;
  for (int v : m) total += v;
  return total;
}

void WordSpec::validate() const {
  if (n.size() != m.size()) throw InvalidInputError("word: n and m must have equal length");
  if (n.empty()) throw InvalidInputError("word: empty slot vectors");
  if (static_cast<int>(n.size()) > kMaxWordSlots) {
    throw InvalidInputError("word: at most " + std::to_string(kMaxWordSlots) + " slots");
  }
  for (int v : n) {
    if (v < 0) throw InvalidInputError("word: exponents must be nonnegative");
  }
  for (int v : m) {
    if (v < 0) throw InvalidInputError("word: exponents must be nonnegative");
  }
}

ComplexMatrix word_operator(const ComplexMatrix& t, const WordSpec& word) {
  word.validate();
  require_square(t, "word_operator");
  ComplexMatrix acc = ComplexMatrix::Identity(t.rows(), t.rows());
  ComplexMatrix tstar = t.adjoint();
  for (std::size_t s = 0; s < word.n.size(); ++s) {
    for (int p = 0; p < word.n[s]; ++p) acc = acc * t;
    for (int p = 0; p < word.m[s]; ++p) acc = acc * tstar;
  }
  return acc;
}

ComplexMatrix word_defect(const ComplexMatrix& t, double r, const WordSpec& word,
                          const ToleranceConfig& tol) {
  validate_radius(r, tol);
  double sv = smallest_singular_value(t);
  if (sv <= tol.kernel_tol) {
    throw SingularMatrixError("word_defect: matrix is numerically singular", sv);
  }
  ComplexMatrix p = word_operator(t, word);
  ComplexMatrix tp = t * p;
  ComplexMatrix inv_adj_p = t.adjoint().partialPivLu().solve(p);  // T^{-*} p
  ComplexMatrix defect = (1.0 + r * r) * (p.adjoint() * p) - tp.adjoint() * tp -
                         (r * r) * (inv_adj_p.adjoint() * inv_adj_p);
  return 0.5 * (defect + defect.adjoint().eval());
}

namespace {

// Kernel with the cutoff taken on the unit operator scale,
// kernel_tol * max(1, sigma_max): class defects of members can be
// numerically zero, and a cutoff relative to their own vanishing norm
// would discard the kernel entirely.
ComplexMatrix unit_scale_kernel(const ComplexMatrix& a, double kernel_tol) {
  double top = operator_norm(a);
  if (top <= 0.0) return null_space(a, kernel_tol);
  return null_space(a, kernel_tol * std::max(1.0, top) / top);
}

}  // namespace

ComplexMatrix largest_reducing_kernel(const ComplexMatrix& t, const ComplexMatrix& defect,
                                      double kernel_tol) {
  require_square(t, "largest_reducing_kernel");
  const Eigen::Index n = t.rows();
  ComplexMatrix basis = unit_scale_kernel(defect, kernel_tol);
  for (Eigen::Index iter = 0; iter <= n; ++iter) {
    if (basis.cols() == 0) return basis;
    ComplexMatrix proj = basis * basis.adjoint();
    ComplexMatrix off = ComplexMatrix::Identity(n, n) - proj;
    ComplexMatrix constraints(2 * n, basis.cols());
    constraints.topRows(n) = off * (t * basis);
    constraints.bottomRows(n) = off * (t.adjoint() * basis);
    ComplexMatrix keep = unit_scale_kernel(constraints, kernel_tol);
    if (keep.cols() == basis.cols()) return basis;
    basis = basis * keep;
    // re-orthonormalize to stop rounding drift across iterations
    Eigen::HouseholderQR<ComplexMatrix> qr(basis);
    ComplexMatrix q = qr.householderQ();
    basis = q.leftCols(basis.cols());
  }
  return basis;
}

namespace {

ComplexMatrix orthocomplement(const ComplexMatrix& basis, Eigen::Index n) {
  if (basis.cols() == 0) return ComplexMatrix::Identity(n, n);
  if (basis.cols() == n) return ComplexMatrix(n, 0);
  Eigen::HouseholderQR<ComplexMatrix> qr(basis);
  ComplexMatrix q = qr.householderQ();
  return q.rightCols(n - basis.cols());
}

struct CanonicalSplit {
  ComplexMatrix exact;  // basis of the maximal exact-class reducing subspace
  ComplexMatrix cnu;    // orthocomplement
  bool ambiguous = false;
  std::string note;
};

CanonicalSplit canonical_split(const ComplexMatrix& t, double r, const ToleranceConfig& tol) {
  ComplexMatrix defect = defect_c1r(t, r, tol);
  CanonicalSplit split;
  split.exact = largest_reducing_kernel(t, defect, tol.kernel_tol);
  split.cnu = orthocomplement(split.exact, t.rows());
  // kernel decisions must not hinge on the exact cutoff value
  Eigen::Index lo = largest_reducing_kernel(t, defect, tol.kernel_tol / 10.0).cols();
  Eigen::Index hi = largest_reducing_kernel(t, defect, tol.kernel_tol * 10.0).cols();
  if (lo != split.exact.cols() || hi != split.exact.cols()) {
    split.ambiguous = true;
    split.note = "exact-part dimension unstable under 10x kernel cutoff perturbation (" +
                 std::to_string(lo) + " / " + std::to_string(split.exact.cols()) + " / " +
                 std::to_string(hi) + ")";
  }
  return split;
}

void require_c1r_member(const ComplexMatrix& t, double r, const ToleranceConfig& tol,
                        const char* who) {
  const auto certs = classify(t, r, tol);
  const auto& cert = certificate_for(certs, ClassTag::C1r);
  if (!cert.member) {
    throw MembershipError(std::string(who) + ": operator is not a C1r member (||T|| = " +
                          std::to_string(cert.witness_norm) + ", ||rT^-1|| = " +
                          std::to_string(cert.witness_inv_norm) + ")");
  }
}

double exact_restriction_residual(const ComplexMatrix& restricted, double r,
                                  const ToleranceConfig& tol) {
  const auto certs = classify(restricted, r, tol);
  return certificate_for(certs, ClassTag::ExactC1r).spectrum_residual;
}

double cnu_witness(const ComplexMatrix& restricted, double r, const ToleranceConfig& tol) {
  return hermitian_eig(defect_c1r(restricted, r, tol), tol).eigenvalues(0);
}

void measure_residuals(DecompositionResult& result, const std::vector<ComplexMatrix>& ops) {
  const Eigen::Index n = ops.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (std::size_t b = 0; b < result.blocks.size(); ++b) {
    ComplexMatrix proj = result.projector(b);
    sum += proj;
    ComplexMatrix off = ComplexMatrix::Identity(n, n) - proj;
    for (const auto& op : ops) {
      result.reduction_residual =
          std::max(result.reduction_residual, operator_norm((off * op * proj).eval()));
      result.reduction_residual =
          std::max(result.reduction_residual, operator_norm((off * op.adjoint() * proj).eval()));
    }
    for (std::size_t c = b + 1; c < result.blocks.size(); ++c) {
      result.projector_orth_residual =
          std::max(result.projector_orth_residual,
                   operator_norm((proj * result.projector(c)).eval()));
    }
  }
  result.projector_sum_residual =
      operator_norm((sum - ComplexMatrix::Identity(n, n)).eval());
}

}  // namespace

ComplexMatrix DecompositionResult::projector(std::size_t block_index) const {
  const auto& b = blocks.at(block_index);
  if (b.basis.cols() == 0) {
    return ComplexMatrix::Zero(b.basis.rows(), b.basis.rows());
  }
  return b.basis * b.basis.adjoint();
}

DecompositionResult canonical_decompose(const ComplexMatrix& t, double r,
                                        const ToleranceConfig& tol) {
  require_c1r_member(t, r, tol, "canonical_decompose");
  CanonicalSplit split = canonical_split(t, r, tol);

  DecompositionResult result;
  result.ambiguous = split.ambiguous;
  if (split.ambiguous) result.notes.push_back(split.note);

  DecompositionBlock exact;
  exact.basis = split.exact;
  exact.label = {0};
  if (exact.dimension() > 0) {
    ComplexMatrix restricted = exact.basis.adjoint() * t * exact.basis;
    double res = exact_restriction_residual(restricted, r, tol);
    exact.certificates.push_back(res);
    if (res > 1e-9) {
      result.ambiguous = true;
      result.notes.push_back("exact-part restriction misses the exact class by " +
                             std::to_string(res));
    }
  }

  DecompositionBlock cnu;
  cnu.basis = split.cnu;
  cnu.label = {1};
  if (cnu.dimension() > 0) {
    ComplexMatrix restricted = cnu.basis.adjoint() * t * cnu.basis;
    cnu.certificates.push_back(cnu_witness(restricted, r, tol));
    ComplexMatrix inner =
        largest_reducing_kernel(restricted, defect_c1r(restricted, r, tol), tol.kernel_tol);
    if (inner.cols() != 0) {
      result.ambiguous = true;
      result.notes.push_back("non-exact part still carries an exact reducing subspace of dim " +
                             std::to_string(inner.cols()));
    }
  }

  result.blocks.push_back(std::move(exact));
  result.blocks.push_back(std::move(cnu));
  measure_residuals(result, {t});
  return result;
}

CrossReductionReport cross_reduction_check(const ComplexMatrix& a, const ComplexMatrix& b,
                                           double r, const ToleranceConfig& tol) {
  OperatorTuple pair;
  pair.r = r;
  pair.ops = {a, b};
  CommutationCheck comm = is_doubly_commuting(pair, tol);
  if (!comm.doubly_commuting) {
    throw InvalidInputError("cross_reduction_check: pair is not doubly commuting (residual " +
                            std::to_string(comm.max_residual) + ")");
  }
  require_c1r_member(a, r, tol, "cross_reduction_check");
  require_c1r_member(b, r, tol, "cross_reduction_check");

  CrossReductionReport report;
  ComplexMatrix basis = largest_reducing_kernel(a, defect_c1r(a, r, tol), tol.kernel_tol);
  const Eigen::Index n = a.rows();
  ComplexMatrix proj = basis.cols() > 0 ? ComplexMatrix(basis * basis.adjoint())
                                        : ComplexMatrix(ComplexMatrix::Zero(n, n));
  ComplexMatrix off = ComplexMatrix::Identity(n, n) - proj;
  report.reduction_residual = std::max(operator_norm((off * b * proj).eval()),
                                       operator_norm((off * b.adjoint() * proj).eval()));

  // every word defect of A commutes with B and B*: spot-check all words of
  // length <= 3 (letter strings over {T, T*})
  for (int len = 0; len <= 3; ++len) {
    for (int mask = 0; mask < (1 << len); ++mask) {
      WordSpec word;
      word.n.assign(1, 0);
      word.m.assign(1, 0);
      // decode bits into alternating exponent slots
      for (int pos = 0; pos < len; ++pos) {
        bool star = (mask >> pos) & 1;
        if (!star) {
          if (word.m.back() > 0) {
            word.n.push_back(0);
            word.m.push_back(0);
          }
          word.n.back() += 1;
        } else {
          word.m.back() += 1;
        }
      }
      ComplexMatrix delta = word_defect(a, r, word, tol);
      report.commutator_residual =
          std::max(report.commutator_residual, operator_norm((delta * b - b * delta).eval()));
      report.commutator_residual = std::max(
          report.commutator_residual,
          operator_norm((delta * b.adjoint() - b.adjoint() * delta).eval()));
    }
  }
  report.ok = report.reduction_residual <= 1e-9 && report.commutator_residual <= 1e-9;
  return report;
}

namespace {

void decompose_recursive(const OperatorTuple& tuple, const ComplexMatrix& ambient_basis,
                         int entry, std::vector<int> label, const ToleranceConfig& tol,
                         DecompositionResult& result) {
  const int d = tuple.arity();
  if (entry == d) {
    DecompositionBlock block;
    block.basis = ambient_basis;
    block.label = label;
    if (block.dimension() > 0) {
      for (int j = 0; j < d; ++j) {
        ComplexMatrix restricted = ambient_basis.adjoint() * tuple.ops[j] * ambient_basis;
        if (label[j] == 0) {
          block.certificates.push_back(exact_restriction_residual(restricted, tuple.r, tol));
        } else {
          block.certificates.push_back(cnu_witness(restricted, tuple.r, tol));
        }
      }
    }
    result.blocks.push_back(std::move(block));
    return;
  }

  const Eigen::Index s = ambient_basis.cols();
  if (s == 0) {
    // the whole branch is trivial; still emit every label underneath
    std::vector<int> next = label;
    next.push_back(0);
    decompose_recursive(tuple, ambient_basis, entry + 1, next, tol, result);
    next.back() = 1;
    decompose_recursive(tuple, ambient_basis, entry + 1, next, tol, result);
    return;
  }

  ComplexMatrix restricted = ambient_basis.adjoint() * tuple.ops[entry] * ambient_basis;
  try {
    require_c1r_member(restricted, tuple.r, tol, "tuple_decompose");
  } catch (const MembershipError& err) {
    throw AmbiguityError("tuple_decompose: restriction of entry " + std::to_string(entry) +
                         " failed its class certificate, tolerance breakdown: " + err.what());
  }
  CanonicalSplit split = canonical_split(restricted, tuple.r, tol);
  if (split.ambiguous) {
    result.ambiguous = true;
    result.notes.push_back("entry " + std::to_string(entry) + ": " + split.note);
  }
  std::vector<int> next = label;
  next.push_back(0);
  decompose_recursive(tuple, (ambient_basis * split.exact).eval(), entry + 1, next, tol, result);
  next.back() = 1;
  decompose_recursive(tuple, (ambient_basis * split.cnu).eval(), entry + 1, next, tol, result);
}

}  // namespace

DecompositionResult tuple_decompose(const OperatorTuple& tuple, const ToleranceConfig& tol) {
  CommutationCheck comm = is_doubly_commuting(tuple, tol);
  if (!comm.doubly_commuting) {
    throw InvalidInputError("tuple_decompose: tuple is not doubly commuting (residual " +
                            std::to_string(comm.max_residual) + ")");
  }
  for (int j = 0; j < tuple.arity(); ++j) {
    require_c1r_member(tuple.ops[j], tuple.r, tol, "tuple_decompose");
  }
  DecompositionResult result;
  ComplexMatrix eye = ComplexMatrix::Identity(tuple.dim(), tuple.dim());
  decompose_recursive(tuple, eye, 0, {}, tol, result);
  measure_residuals(result, tuple.ops);
  return result;
}

DecompositionResult tuple_decompose_qa(const OperatorTuple& tuple, const ToleranceConfig& tol) {
  OperatorTuple scaled;
  scaled.r = tuple.r * tuple.r;
  for (const auto& op : tuple.ops) scaled.ops.push_back(tuple.r * op);
  return tuple_decompose(scaled, tol);
}

}  // namespace annulus
