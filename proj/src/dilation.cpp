#include "annulus/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/LU>

namespace annulus {

ComplexMatrix SymbolFamily::evaluate(int j, Complex z) const {
  ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
  for (std::size_t a = 0; a < symbols[j].size(); ++a) {
    acc += recentered_symbol(symbols[j][a], z) * projections[j][a];
  }
  return unitaries[j] * acc;
}

ComplexMatrix SymbolFamily::evaluate_inverse(int j, Complex z) const {
  ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
  for (std::size_t a = 0; a < symbols[j].size(); ++a) {
    acc += (1.0 / recentered_symbol(symbols[j][a], z)) * projections[j][a];
  }
  return acc * unitaries[j].adjoint();
}

namespace {

SymbolFamily assemble_symbols(const UDFactorization& fact, const OperatorTuple& represented,
                              double r, const ToleranceConfig& tol) {
  SpectralResolution res = joint_spectral_resolution(fact, r, tol);
  SymbolFamily sym;
  sym.inner_r = r;
  sym.dim = fact.dim();
  sym.unitaries = fact.unitaries;
  sym.represented = represented;
  const int d = fact.arity();
  sym.projections.resize(d);
  sym.symbols.resize(d);
  for (int j = 0; j < d; ++j) {
    for (std::size_t a = 0; a < res.eigenvalues[j].size(); ++a) {
      double lam = res.eigenvalues[j][a];
      if (lam <= r + tol.eq_tol || lam >= 1.0 - tol.eq_tol) {
        throw InvalidInputError("build_symbols: eigenvalue " + std::to_string(lam) +
                                " of entry " + std::to_string(j) +
                                " is not strictly inside (r, 1); snap the spectrum first");
      }
      RecenteredSymbolParams params = make_recentered_symbol(lam, r);
      sym.projections[j].push_back(res.projections[j][a]);
      sym.symbols[j].push_back(params);
      for (Complex e : exceptional_points(params.w0)) {
        sym.exceptional_angles.push_back(std::arg(e));
      }
    }
  }
  return sym;
}

}  // namespace

SymbolFamily build_symbols(const OperatorTuple& tuple, const ToleranceConfig& tol) {
  UDFactorization fact = ud_factorize(tuple, tol);
  return assemble_symbols(fact, tuple, tuple.r, tol);
}

SymbolFamily build_symbols_auto(const OperatorTuple& tuple, int snap_level,
                                const ToleranceConfig& tol) {
  UDFactorization fact = ud_factorize(tuple, tol);
  bool boundary = false;
  for (const auto& dpos : fact.positives) {
    RealVector eigs = hermitian_eig(dpos, tol).eigenvalues;
    for (Eigen::Index i = 0; i < eigs.size(); ++i) {
      if (eigs(i) <= tuple.r + tol.eq_tol || eigs(i) >= 1.0 - tol.eq_tol) boundary = true;
    }
  }
  if (!boundary) return assemble_symbols(fact, tuple, tuple.r, tol);

  DyadicApproximation snap = snap_spectrum(fact, tuple.r, snap_level, tol);
  OperatorTuple snapped = snap.snapped_tuple(tuple.r);
  UDFactorization snapped_fact;
  snapped_fact.r = tuple.r;
  snapped_fact.unitaries = fact.unitaries;
  snapped_fact.positives = snap.snapped_positives;
  SymbolFamily sym = assemble_symbols(snapped_fact, snapped, tuple.r, tol);
  sym.snap_level = snap_level;
  sym.snap_bound = snap.bound;
  sym.max_op_delta = *std::max_element(snap.op_deltas.begin(), snap.op_deltas.end());
  sym.max_inv_delta = *std::max_element(snap.inv_deltas.begin(), snap.inv_deltas.end());
  return sym;
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Angular distance from every node exp(2 pi i (k + theta)/N) to the worst
// exceptional angle; O(#angles) via the fractional grid position.
double min_clearance_for(double theta, int n_nodes, const std::vector<double>& angles) {
  double best = std::numeric_limits<double>::infinity();
  const double spacing = 2.0 * M_PI / n_nodes;
  for (double psi : angles) {
    double u = psi / spacing - theta;
    double frac = u - std::floor(u);
    double dist = std::min(frac, 1.0 - frac) * spacing;
    best = std::min(best, dist);
  }
  return best;
}

}  // namespace

DilationModel build_dilation(const SymbolFamily& sym, int node_count, const ToleranceConfig& tol) {
  if (node_count < 16 || !power_of_two(node_count)) {
    throw InvalidInputError("build_dilation: node count must be a power of two >= 16");
  }
  const double target = M_PI / (4.0 * node_count);

  // Deterministic golden-ratio offset search. The strict pi/(4N) clearance
  // is kept when one of the probes reaches it; otherwise the probe with the
  // largest clearance wins, provided it stays above the exceptional
  // neighbourhood floor.
  double best_theta = -1.0;
  double best_clear = -1.0;
  bool met = false;
  for (int t = 0; t < kOffsetRetries; ++t) {
    double theta = std::fmod(kGoldenOffsetStart + t * kGoldenRatioStep, 1.0);
    if (theta < 0.1 || theta >= 0.9) continue;
    double clear = min_clearance_for(theta, node_count, sym.exceptional_angles);
    if (clear > best_clear) {
      best_clear = clear;
      best_theta = theta;
    }
    if (clear >= target) {
      met = true;
      break;
    }
  }
  if (best_theta < 0.0 || best_clear < kClearanceFloor) {
    throw Error("build_dilation: no admissible node offset after " +
                std::to_string(kOffsetRetries) + " retries (exceptional points too crowded)");
  }

  DilationModel model;
  model.node_count = node_count;
  model.theta0 = best_theta;
  model.min_clearance = best_clear;
  model.clearance_met = met;
  model.dim = sym.dim;
  model.node_class = ClassTag::ExactC1r;
  model.class_r = sym.inner_r;
  model.modulus_sq_lo = sym.inner_r * sym.inner_r;
  model.modulus_sq_hi = 1.0;
  model.snap_level = sym.snap_level;
  model.snap_bound = sym.snap_bound;
  model.max_op_delta = sym.max_op_delta;
  model.max_inv_delta = sym.max_inv_delta;

  const int d = sym.arity();
  model.nodes.resize(node_count);
  model.blocks.assign(d, {});
  model.inv_blocks.assign(d, {});
  for (int k = 0; k < node_count; ++k) {
    model.nodes[k] = std::polar(1.0, 2.0 * M_PI * (k + best_theta) / node_count);
  }
  for (int j = 0; j < d; ++j) {
    model.blocks[j].reserve(node_count);
    model.inv_blocks[j].reserve(node_count);
    for (int k = 0; k < node_count; ++k) {
      model.blocks[j].push_back(sym.evaluate(j, model.nodes[k]));
      model.inv_blocks[j].push_back(sym.evaluate_inverse(j, model.nodes[k]));
    }
  }
  (void)tol;
  return model;
}

NodeClassReport verify_node_class(const DilationModel& model) {
  NodeClassReport report;
  const double r = model.class_r;
  const Eigen::Index n = model.dim;
  ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const bool qa = model.node_class == ClassTag::ExactQAr;
  const double defect_const = qa ? (1.0 / (r * r) + r * r) : (1.0 + r * r);
  const double inv_weight = qa ? 1.0 : r * r;
  for (int j = 0; j < model.arity(); ++j) {
    for (int k = 0; k < model.node_count; ++k) {
      const ComplexMatrix& f = model.blocks[j][k];
      const ComplexMatrix& finv = model.inv_blocks[j][k];
      ComplexMatrix gram = f.adjoint() * f;
      RealVector eigs = hermitian_eig(gram).eigenvalues;
      for (Eigen::Index i = 0; i < eigs.size(); ++i) {
        double dist = std::min(std::abs(eigs(i) - model.modulus_sq_lo),
                               std::abs(eigs(i) - model.modulus_sq_hi));
        report.spectrum_residual = std::max(report.spectrum_residual, dist);
      }
      ComplexMatrix defect =
          defect_const * eye - gram - inv_weight * (finv * finv.adjoint());
      report.defect_residual = std::max(report.defect_residual, operator_norm(defect));
    }
  }
  return report;
}

double node_double_commutation(const DilationModel& model) {
  double worst = 0.0;
  for (int i = 0; i < model.arity(); ++i) {
    for (int j = i + 1; j < model.arity(); ++j) {
      for (int k = 0; k < model.node_count; ++k) {
        const ComplexMatrix& a = model.blocks[i][k];
        const ComplexMatrix& b = model.blocks[j][k];
        worst = std::max(worst, operator_norm((a * b - b * a).eval()));
        worst = std::max(worst, operator_norm((a * b.adjoint() - b.adjoint() * a).eval()));
      }
    }
  }
  return worst;
}

ComplexMatrix DilationModel::compressed_power(const std::vector<int>& powers) const {
  if (static_cast<int>(powers.size()) != arity()) {
    throw InvalidInputError("compressed_power: wrong number of exponents");
  }
  for (int p : powers) {
    if (std::abs(p) > kMaxMomentPower) {
      throw InvalidInputError("compressed_power: |exponent| capped at " +
                              std::to_string(kMaxMomentPower));
    }
  }
  ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < node_count; ++k) {
    ComplexMatrix prod = ComplexMatrix::Identity(dim, dim);
    for (int j = 0; j < arity(); ++j) {
      const ComplexMatrix& base = powers[j] >= 0 ? blocks[j][k] : inv_blocks[j][k];
      for (int p = 0; p < std::abs(powers[j]); ++p) prod = prod * base;
    }
    acc += prod;
  }
  return acc / static_cast<double>(node_count);
}

std::vector<MomentEntry> verify_moments(const DilationModel& model, const OperatorTuple& tuple,
                                        int max_power) {
  if (max_power < 0 || max_power > kMaxMomentPower) {
    throw InvalidInputError("verify_moments: max_power must lie in [0, " +
                            std::to_string(kMaxMomentPower) + "]");
  }
  const int d = model.arity();
  if (tuple.arity() != d || tuple.dim() != model.dim) {
    throw InvalidInputError("verify_moments: tuple does not match the model");
  }
  const int width = 2 * max_power + 1;

  // Per-entry powers of T_j once.
  std::vector<std::vector<ComplexMatrix>> t_powers(d);
  for (int j = 0; j < d; ++j) {
    t_powers[j].resize(width);
    for (int p = -max_power; p <= max_power; ++p) {
      t_powers[j][p + max_power] = matrix_power(tuple.ops[j], p);
    }
  }

  std::size_t table_size = 1;
  for (int j = 0; j < d; ++j) table_size *= width;
  std::vector<ComplexMatrix> table(table_size, ComplexMatrix::Zero(model.dim, model.dim));

  // Accumulate node by node in fixed order so results are reproducible.
  std::vector<std::vector<ComplexMatrix>> f_powers(d, std::vector<ComplexMatrix>(width));
  for (int k = 0; k < model.node_count; ++k) {
    for (int j = 0; j < d; ++j) {
      f_powers[j][max_power] = ComplexMatrix::Identity(model.dim, model.dim);
      for (int p = 1; p <= max_power; ++p) {
        f_powers[j][max_power + p] = f_powers[j][max_power + p - 1] * model.blocks[j][k];
        f_powers[j][max_power - p] = f_powers[j][max_power - p + 1] * model.inv_blocks[j][k];
      }
    }
    for (std::size_t idx = 0; idx < table_size; ++idx) {
      std::size_t rem = idx;
      ComplexMatrix prod = f_powers[0][rem % width];
      rem /= width;
      for (int j = 1; j < d; ++j) {
        prod = prod * f_powers[j][rem % width];
        rem /= width;
      }
      table[idx] += prod;
    }
  }

  std::vector<MomentEntry> out;
  out.reserve(table_size);
  for (std::size_t idx = 0; idx < table_size; ++idx) {
    MomentEntry entry;
    std::size_t rem = idx;
    ComplexMatrix truth = ComplexMatrix::Identity(model.dim, model.dim);
    for (int j = 0; j < d; ++j) {
      int p = static_cast<int>(rem % width) - max_power;
      rem /= width;
      entry.powers.push_back(p);
      truth = truth * t_powers[j][p + max_power];
    }
    entry.error =
        operator_norm((truth - table[idx] / static_cast<double>(model.node_count)).eval());
    out.push_back(std::move(entry));
  }
  return out;
}

double max_moment_error(const std::vector<MomentEntry>& table) {
  double worst = 0.0;
  for (const auto& e : table) worst = std::max(worst, e.error);
  return worst;
}

DilationModel dilate_qar(const OperatorTuple& tuple, int node_count, int snap_level,
                         const ToleranceConfig& tol) {
  tuple.validate(tol);
  for (int j = 0; j < tuple.arity(); ++j) {
    const auto certs = classify(tuple.ops[j], tuple.r, tol);
    if (!certificate_for(certs, ClassTag::QAr).member) {
      throw MembershipError("dilate_qar: entry " + std::to_string(j) +
                            " is not a quantum-annulus member at r = " + std::to_string(tuple.r));
    }
  }
  const double r = tuple.r;
  OperatorTuple scaled;
  scaled.r = r * r;
  for (const auto& op : tuple.ops) scaled.ops.push_back(r * op);

  SymbolFamily sym = build_symbols_auto(scaled, snap_level, tol);
  DilationModel model = build_dilation(sym, node_count, tol);
  const double inv_r = 1.0 / r;
  for (int j = 0; j < model.arity(); ++j) {
    for (int k = 0; k < model.node_count; ++k) {
      model.blocks[j][k] *= inv_r;
      model.inv_blocks[j][k] *= r;
    }
  }
  model.scale = inv_r;
  model.node_class = ClassTag::ExactQAr;
  model.class_r = r;
  model.modulus_sq_lo = r * r;
  model.modulus_sq_hi = 1.0 / (r * r);
  return model;
}

}  // namespace annulus
