#include "annulus/spectral_factor.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace annulus {

UDFactorization ud_factorize(const OperatorTuple& tuple, const ToleranceConfig& tol) {
  CommutationCheck comm = is_doubly_commuting(tuple, tol);
  if (!comm.doubly_commuting) {
    throw InvalidInputError("ud_factorize: tuple is not doubly commuting (residual " +
                            std::to_string(comm.max_residual) + ")");
  }
  UDFactorization fact;
  fact.r = tuple.r;
  for (const auto& t : tuple.ops) {
    PolarDecomposition pd = polar_decompose(t, tol);
    fact.unitaries.push_back(pd.unitary);
    fact.positives.push_back(pd.positive);
    const auto certs = classify(t, tuple.r, tol);
    if (!certificate_for(certs, ClassTag::C1r).member) fact.all_c1r = false;
  }
  return fact;
}

double UDFactorization::relation_residual(const OperatorTuple& source) const {
  double worst = 0.0;
  const int d = arity();
  const Eigen::Index n = dim();
  ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (int j = 0; j < d; ++j) {
    const ComplexMatrix& u = unitaries[j];
    const ComplexMatrix& p = positives[j];
    worst = std::max(worst, operator_norm((u * p - source.ops[j]).eval()));
    worst = std::max(worst, operator_norm((u.adjoint() * u - eye).eval()));
    for (int i = 0; i < d; ++i) {
      if (i == j) continue;
      worst = std::max(worst, operator_norm((source.ops[i] * p - p * source.ops[i]).eval()));
      worst = std::max(worst,
                       operator_norm((positives[i] * p - p * positives[i]).eval()));
      worst = std::max(worst,
                       operator_norm((unitaries[i] * u - u * unitaries[i]).eval()));
      worst = std::max(worst, operator_norm((unitaries[i] * p - p * unitaries[i]).eval()));
    }
  }
  return worst;
}

namespace {

struct Block {
  int first = 0;
  int size = 0;
};

struct Clustering {
  std::vector<double> reps;      // cluster means, ascending
  std::vector<int> assignment;   // per input index
};

Clustering cluster_with_assignment(const std::vector<double>& values, double gap) {
  std::vector<std::size_t> order(values.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  Clustering out;
  out.assignment.assign(values.size(), -1);
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < order.size() &&
           (j == i || values[order[j]] - values[order[j - 1]] <= gap)) {
      sum += values[order[j]];
      ++j;
    }
    int id = static_cast<int>(out.reps.size());
    for (std::size_t k = i; k < j; ++k) out.assignment[order[k]] = id;
    out.reps.push_back(sum / static_cast<double>(j - i));
    i = j;
  }
  return out;
}

}  // namespace

SpectralResolution joint_spectral_resolution(const UDFactorization& fact, double /*r*/,
                                             const ToleranceConfig& tol) {
  const int d = fact.arity();
  const Eigen::Index n = fact.dim();
  if (d == 0 || n == 0) throw InvalidInputError("joint_spectral_resolution: empty factorization");
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      double res =
          operator_norm((fact.positives[i] * fact.positives[j] -
                         fact.positives[j] * fact.positives[i]).eval());
      if (res > tol.eq_tol) {
        throw InvalidInputError("joint_spectral_resolution: positives do not commute (residual " +
                                std::to_string(res) + ")");
      }
    }
  }

  SpectralResolution out;
  out.basis = ComplexMatrix::Identity(n, n);

  // Sequential diagonalization: refine within each block so that every
  // already-processed entry stays diagonal on it.
  std::vector<Block> blocks{Block{0, static_cast<int>(n)}};
  std::vector<std::vector<double>> column_values(d, std::vector<double>(n, 0.0));
  for (int j = 0; j < d; ++j) {
    std::vector<Block> next;
    for (const Block& b : blocks) {
      ComplexMatrix qb = out.basis.middleCols(b.first, b.size);
      ComplexMatrix compressed = qb.adjoint() * fact.positives[j] * qb;
      HermitianEig eig = hermitian_eig(compressed, tol);
      out.basis.middleCols(b.first, b.size) = qb * eig.eigenvectors;
      int start = b.first;
      int len = 1;
      for (int c = 1; c <= b.size; ++c) {
        bool split = c == b.size ||
                     eig.eigenvalues(c) - eig.eigenvalues(c - 1) > kClusterGap;
        if (split) {
          next.push_back(Block{start, len});
          start = b.first + c;
          len = 1;
        } else {
          ++len;
        }
      }
      for (int c = 0; c < b.size; ++c) column_values[j][b.first + c] = eig.eigenvalues(c);
    }
    blocks = next;
  }

  // Joint clusters in basis order; per-block eigenvalues are averaged per
  // entry so each cluster carries one representative tuple.
  for (const Block& b : blocks) {
    JointCluster jc;
    jc.first_column = b.first;
    jc.rank = b.size;
    for (int j = 0; j < d; ++j) {
      double sum = 0.0;
      for (int c = 0; c < b.size; ++c) sum += column_values[j][b.first + c];
      jc.eigenvalues.push_back(sum / b.size);
    }
    out.joint.push_back(jc);
  }

  // Per-entry resolutions: cluster the per-column values of entry j and
  // assemble the spectral projections from the matching basis columns.
  out.eigenvalues.resize(d);
  out.projections.resize(d);
  for (int j = 0; j < d; ++j) {
    Clustering cl = cluster_with_assignment(column_values[j], kClusterGap);
    for (std::size_t a = 0; a + 1 < cl.reps.size(); ++a) {
      if (cl.reps[a + 1] - cl.reps[a] < 10.0 * kClusterGap) {
        out.ambiguous = true;
        out.notes.push_back("entry " + std::to_string(j) + ": clusters at " +
                            std::to_string(cl.reps[a]) + " and " + std::to_string(cl.reps[a + 1]) +
                            " are separated by less than 10x the cluster gap");
      }
    }
    out.eigenvalues[j] = cl.reps;
    for (std::size_t a = 0; a < cl.reps.size(); ++a) {
      ComplexMatrix proj = ComplexMatrix::Zero(n, n);
      for (Eigen::Index c = 0; c < n; ++c) {
        if (cl.assignment[static_cast<std::size_t>(c)] == static_cast<int>(a)) {
          proj += out.basis.col(c) * out.basis.col(c).adjoint();
        }
      }
      out.projections[j].push_back(0.5 * (proj + proj.adjoint().eval()));
    }
  }
  return out;
}

double SpectralResolution::projection_residual() const {
  double worst = 0.0;
  const int d = arity();
  if (d == 0) return 0.0;
  const Eigen::Index n = basis.rows();
  ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (int j = 0; j < d; ++j) {
    ComplexMatrix sum = ComplexMatrix::Zero(n, n);
    for (std::size_t a = 0; a < projections[j].size(); ++a) {
      const ComplexMatrix& p = projections[j][a];
      sum += p;
      worst = std::max(worst, operator_norm((p * p - p).eval()));
      worst = std::max(worst, operator_norm((p - p.adjoint().eval()).eval()));
      for (std::size_t b = a + 1; b < projections[j].size(); ++b) {
        worst = std::max(worst, operator_norm((p * projections[j][b]).eval()));
      }
      for (int i = 0; i < d; ++i) {
        if (i == j) continue;
        for (const ComplexMatrix& q : projections[i]) {
          worst = std::max(worst, operator_norm((p * q - q * p).eval()));
        }
      }
    }
    worst = std::max(worst, operator_norm((sum - eye).eval()));
  }
  return worst;
}

double dyadic_snap_value(double lambda, double r, int level) {
  if (level < 1 || level > 52) {
    throw InvalidInputError("dyadic_snap_value: level must lie in [1, 52]");
  }
  double cells = std::ldexp(1.0, level);  // 2^m
  double step = (1.0 - r) / cells;
  double guess = std::clamp(std::floor((lambda - r) / step), 0.0, cells - 1.0);
  // scan the neighbouring midpoints; ties resolve toward the lower one
  double best = r + (guess + 0.5) * step;
  for (double k : {guess - 1.0, guess + 1.0}) {
    if (k < 0.0 || k > cells - 1.0) continue;
    double mid = r + (k + 0.5) * step;
    if (std::abs(lambda - mid) < std::abs(lambda - best)) best = mid;
  }
  return best;
}

DyadicApproximation snap_spectrum(const UDFactorization& fact, double r, int level,
                                  const ToleranceConfig& tol) {
  const int d = fact.arity();
  DyadicApproximation out;
  out.level = level;
  out.bound = std::ldexp(1.0, -level);
  for (int j = 0; j < d; ++j) {
    HermitianEig eig = hermitian_eig(fact.positives[j], tol);
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
      double lam = eig.eigenvalues(i);
      if (lam < r - tol.eq_tol || lam > 1.0 + tol.eq_tol) {
        throw InvalidInputError("snap_spectrum: eigenvalue " + std::to_string(lam) +
                                " of entry " + std::to_string(j) + " lies outside [r, 1]");
      }
    }
    RealVector snapped(eig.eigenvalues.size());
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i) {
      snapped(i) = dyadic_snap_value(eig.eigenvalues(i), r, level);
    }
    ComplexMatrix dm =
        eig.eigenvectors * snapped.asDiagonal() * eig.eigenvectors.adjoint();
    dm = 0.5 * (dm + dm.adjoint().eval());
    ComplexMatrix tm = fact.unitaries[j] * dm;
    out.snapped_positives.push_back(dm);
    out.snapped_ops.push_back(tm);
    ComplexMatrix orig = fact.unitaries[j] * fact.positives[j];
    out.op_deltas.push_back(operator_norm((tm - orig).eval()));
    Eigen::PartialPivLU<ComplexMatrix> lu_m(tm), lu_o(orig);
    out.inv_deltas.push_back(operator_norm((lu_m.inverse() - lu_o.inverse()).eval()));
  }
  return out;
}

OperatorTuple DyadicApproximation::snapped_tuple(double r) const {
  OperatorTuple t;
  t.r = r;
  t.ops = snapped_ops;
  return t;
}

}  // namespace annulus
