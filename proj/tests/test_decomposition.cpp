#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "annulus/decomposition.hpp"
#include "test_helpers.hpp"

using namespace annulus;
using namespace annulus::testing;

TEST_CASE("the empty word defect equals the base defect") {
  SeededRng rng(107);
  ComplexMatrix t = random_scaled(rng, 4, 0.55, 0.95);
  double r = 0.5;
  WordSpec empty{{0}, {0}};
  CHECK(max_abs_diff(word_defect(t, r, empty), defect_c1r(t, r)) <= 1e-13);
}

TEST_CASE("word defects vanish on exact members") {
  SeededRng rng(109);
  double r = 0.4;
  ComplexMatrix t = normal_with_moduli(rng, {1.0, r, 1.0, r});
  for (const WordSpec& w : words_up_to(4)) {
    CHECK(operator_norm(word_defect(t, r, w)) <= 1e-12);
  }
}

TEST_CASE("word defect on a diagonal member matches scalar arithmetic") {
  double r = 0.5;
  ComplexMatrix t = diag({0.5, 0.8});
  WordSpec w{{1}, {0}};
  // p = T, so the defect is diag(t_i^2 * scalar_defect(t_i))
  double d1 = 1.0 + r * r - 0.25 - r * r / 0.25;
  double d2 = 1.0 + r * r - 0.64 - r * r / 0.64;
  ComplexMatrix expected = diag({0.25 * d1, 0.64 * d2});
  CHECK(max_abs_diff(word_defect(t, r, w), expected) <= 1e-13);
}

TEST_CASE("word guards") {
  ComplexMatrix t = diag({0.8, 0.9});
  WordSpec too_long;
  too_long.n.assign(7, 1);
  too_long.m.assign(7, 0);
  CHECK_THROWS_AS(word_defect(t, 0.5, too_long, {}), InvalidInputError);
  WordSpec negative{{-1}, {0}};
  CHECK_THROWS_AS(word_operator(t, negative), InvalidInputError);
}

TEST_CASE("canonical decomposition of a diagonal instance") {
  double r = 0.5;
  ComplexMatrix t = diag({r, 1.0, 0.8});
  DecompositionResult dec = canonical_decompose(t, r);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(dec.blocks[0].label == std::vector<int>{0});
  CHECK(dec.blocks[1].label == std::vector<int>{1});
  CHECK(dec.blocks[0].dimension() == 2);
  CHECK(dec.blocks[1].dimension() == 1);
  ComplexMatrix expected_exact = diag({1.0, 1.0, 0.0});
  CHECK(max_abs_diff(dec.projector(0), expected_exact) <= 1e-12);
  CHECK(dec.projector(1)(2, 2).real() == doctest::Approx(1.0));
  CHECK(dec.projector_sum_residual <= 1e-10);
  CHECK(dec.reduction_residual <= 1e-9);
  CHECK_FALSE(dec.ambiguous);
  // block certificates: exact residual then cnu witness
  CHECK(dec.blocks[0].certificates[0] <= 1e-9);
  CHECK(dec.blocks[1].certificates[0] > 1e-3);
}

TEST_CASE("exact members have no completely-non-exact part") {
  SeededRng rng(113);
  double r = 0.35;
  ComplexMatrix t = normal_with_moduli(rng, {1.0, r, r, 1.0});
  DecompositionResult dec = canonical_decompose(t, r);
  CHECK(dec.blocks[0].dimension() == 4);
  CHECK(dec.blocks[1].dimension() == 0);
}

TEST_CASE("membership is required") {
  CHECK_THROWS_AS(canonical_decompose(diag({1.2, 0.8}), 0.5), MembershipError);
}

TEST_CASE("fixed point equals the bounded-word oracle on random members") {
  SeededRng rng(127);
  double r = 0.5;
  for (int rep = 0; rep < 12; ++rep) {
    ComplexMatrix t;
    if (rep % 2 == 0) {
      Eigen::Index exact_dim = rep % 4;  // 0 or 2
      std::vector<double> moduli;
      for (Eigen::Index i = 0; i < exact_dim; ++i) moduli.push_back(i % 2 == 0 ? 1.0 : r);
      while (moduli.size() < 5) moduli.push_back(rng.uniform(r + 0.05, 0.95));
      t = normal_with_moduli(rng, moduli);
    } else {
      t = mixed_nonnormal_member(rng, r, rep % 3).first;
    }
    ComplexMatrix iterative = largest_reducing_kernel(t, defect_c1r(t, r), 1e-8);
    ComplexMatrix oracle = word_oracle_subspace(t, r, 10, 1e-8);
    REQUIRE(iterative.cols() == oracle.cols());
    CHECK(subspace_gap(iterative, oracle) <= 1e-8);
  }
}

TEST_CASE("known exact part is recovered for block-built members") {
  SeededRng rng(131);
  double r = 0.5;
  for (Eigen::Index exact_dim : {0, 1, 2}) {
    auto [t, exact_basis] = mixed_nonnormal_member(rng, r, exact_dim);
    DecompositionResult dec = canonical_decompose(t, r);
    REQUIRE(dec.blocks[0].dimension() == exact_dim);
    if (exact_dim > 0) {
      CHECK(subspace_gap(dec.blocks[0].basis, exact_basis) <= 1e-9);
    }
  }
}

TEST_CASE("orbit maximality of the exact part") {
  SeededRng rng(137);
  double r = 0.5;
  ComplexMatrix t = mixed_normal_member(rng, r, 3, 2);
  ComplexMatrix basis = largest_reducing_kernel(t, defect_c1r(t, r), 1e-8);
  HermitianEig eig = hermitian_eig(defect_c1r(t, r));
  const Eigen::Index n = t.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eig.eigenvalues(i) > 1e-8) continue;
    // eigenvector with tiny defect whose {T, T*} orbit stays in the kernel
    ComplexVector x = eig.eigenvectors.col(i);
    bool orbit_in_kernel = true;
    std::vector<ComplexVector> frontier{x};
    ComplexMatrix defect = defect_c1r(t, r);
    for (int depth = 0; depth < static_cast<int>(n) && orbit_in_kernel; ++depth) {
      std::vector<ComplexVector> next;
      for (const auto& v : frontier) {
        for (const ComplexVector& w : {ComplexVector(t * v), ComplexVector(t.adjoint() * v)}) {
          if ((defect * w).norm() > 1e-8 * std::max(1.0, w.norm())) {
            orbit_in_kernel = false;
            break;
          }
          next.push_back(w / std::max(1e-300, w.norm()));
        }
        if (!orbit_in_kernel) break;
      }
      frontier = next;
    }
    if (orbit_in_kernel) {
      ComplexMatrix proj = basis * basis.adjoint();
      CHECK((x - proj * x).norm() <= 1e-8);
    }
  }
}

TEST_CASE("decomposition projectors are unitary-conjugation covariant") {
  SeededRng rng(139);
  double r = 0.5;
  ComplexMatrix t = mixed_normal_member(rng, r, 2, 3);
  ComplexMatrix q = random_unitary(rng, 5);
  DecompositionResult base = canonical_decompose(t, r);
  DecompositionResult conj = canonical_decompose((q * t * q.adjoint()).eval(), r);
  for (std::size_t b = 0; b < 2; ++b) {
    CHECK(operator_norm(
              (conj.projector(b) - q * base.projector(b) * q.adjoint()).eval()) <= 1e-9);
  }
}

TEST_CASE("near-cutoff defect eigenvalues are flagged ambiguous") {
  double r = 0.5;
  // modulus tuned so the smallest defect eigenvalue sits at the kernel
  // cutoff: flagged rather than silently classified
  double eps = 1e-8 / (1.0 - r * r);
  ComplexMatrix t = diag({1.0 - eps, 0.8});
  DecompositionResult dec = canonical_decompose(t, r);
  CHECK(dec.ambiguous);
  CHECK_FALSE(dec.notes.empty());
}

TEST_CASE("cross reduction: identity and tensor pairs") {
  SeededRng rng(149);
  double r = 0.5;
  ComplexMatrix a = mixed_normal_member(rng, r, 2, 2);
  CrossReductionReport trivial = cross_reduction_check(a, ComplexMatrix::Identity(4, 4), r);
  CHECK(trivial.ok);

  ComplexMatrix a0 = mixed_normal_member(rng, r, 1, 1);
  ComplexMatrix b0 = mixed_normal_member(rng, r, 1, 1);
  ComplexMatrix big_a = kron(a0, ComplexMatrix::Identity(2, 2));
  ComplexMatrix big_b = kron(ComplexMatrix::Identity(2, 2), b0);
  CrossReductionReport tensor = cross_reduction_check(big_a, big_b, r);
  CHECK(tensor.ok);
  CHECK(tensor.reduction_residual <= 1e-10);
  CHECK(tensor.commutator_residual <= 1e-9);
}

TEST_CASE("cross reduction rejects merely commuting pairs") {
  // commuting but not doubly commuting: a Jordan-type member against its
  // own square
  double r = 0.3;
  ComplexMatrix a = 0.55 * mat2(1.0, 1.0, 0.0, 1.0);
  ComplexMatrix b = a * a * (1.0 / 0.55);
  CHECK(operator_norm((a * b - b * a).eval()) <= 1e-14);
  CHECK_THROWS_AS(cross_reduction_check(a, b, r), InvalidInputError);
}

TEST_CASE("tuple decomposition of the diagonal pair example") {
  double r = 0.5;
  OperatorTuple tuple;
  tuple.r = r;
  tuple.ops = {diag({r, r, 0.8, 0.8}), diag({1.0, 0.7, 1.0, 0.7})};
  DecompositionResult dec = tuple_decompose(tuple);
  REQUIRE(dec.blocks.size() == 4);
  // lexicographic label order with coordinates 1..4
  CHECK(dec.blocks[0].label == std::vector<int>{0, 0});
  CHECK(dec.blocks[1].label == std::vector<int>{0, 1});
  CHECK(dec.blocks[2].label == std::vector<int>{1, 0});
  CHECK(dec.blocks[3].label == std::vector<int>{1, 1});
  for (std::size_t b = 0; b < 4; ++b) {
    REQUIRE(dec.blocks[b].dimension() == 1);
    CHECK(std::abs(dec.blocks[b].basis(static_cast<Eigen::Index>(b), 0)) ==
          doctest::Approx(1.0));
  }
  CHECK(dec.projector_sum_residual <= 1e-10);
  CHECK(dec.projector_orth_residual <= 1e-10);
  CHECK(dec.reduction_residual <= 1e-9);
}

TEST_CASE("all-exact tuples occupy the single all-exact block") {
  SeededRng rng(151);
  double r = 0.4;
  ComplexMatrix q = random_unitary(rng, 4);
  auto make = [&](std::vector<double> moduli) {
    ComplexVector d(4);
    for (int i = 0; i < 4; ++i) {
      d(i) = std::polar(moduli[static_cast<std::size_t>(i)], rng.uniform(0.0, 2.0 * M_PI));
    }
    return ComplexMatrix(q * d.asDiagonal() * q.adjoint());
  };
  OperatorTuple tuple;
  tuple.r = r;
  tuple.ops = {make({1.0, r, 1.0, r}), make({r, r, 1.0, 1.0})};
  DecompositionResult dec = tuple_decompose(tuple);
  CHECK(dec.blocks[0].dimension() == 4);
  for (std::size_t b = 1; b < dec.blocks.size(); ++b) CHECK(dec.blocks[b].dimension() == 0);
}

TEST_CASE("tensor pairs factor block dimensions multiply") {
  SeededRng rng(157);
  double r = 0.5;
  ComplexMatrix a0 = mixed_normal_member(rng, r, 1, 2);  // split 1 + 2
  ComplexMatrix b0 = mixed_normal_member(rng, r, 2, 1);  // split 2 + 1
  DecompositionResult da = canonical_decompose(a0, r);
  DecompositionResult db = canonical_decompose(b0, r);

  OperatorTuple tuple = gen_tensor_tuple({a0, b0}, r);
  DecompositionResult dec = tuple_decompose(tuple);
  REQUIRE(dec.blocks.size() == 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      Eigen::Index expected = da.blocks[static_cast<std::size_t>(i)].dimension() *
                              db.blocks[static_cast<std::size_t>(j)].dimension();
      CHECK(dec.blocks[static_cast<std::size_t>(2 * i + j)].dimension() == expected);
    }
  }
}

TEST_CASE("entry order only permutes the labels") {
  SeededRng rng(163);
  double r = 0.5;
  ComplexMatrix a0 = mixed_normal_member(rng, r, 1, 1);
  ComplexMatrix b0 = mixed_normal_member(rng, r, 1, 1);
  OperatorTuple fwd = gen_tensor_tuple({a0, b0}, r);
  OperatorTuple rev;
  rev.r = r;
  rev.ops = {fwd.ops[1], fwd.ops[0]};
  DecompositionResult dec_fwd = tuple_decompose(fwd);
  DecompositionResult dec_rev = tuple_decompose(rev);
  // block (i, j) of the forward order matches block (j, i) of the reversed
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      ComplexMatrix p_fwd = dec_fwd.projector(static_cast<std::size_t>(2 * i + j));
      ComplexMatrix p_rev = dec_rev.projector(static_cast<std::size_t>(2 * j + i));
      CHECK(operator_norm((p_fwd - p_rev).eval()) <= 1e-9);
    }
  }
}

TEST_CASE("block restrictions certify their labels") {
  SeededRng rng(167);
  double r = 0.5;
  ComplexMatrix a0 = mixed_normal_member(rng, r, 2, 2);
  ComplexMatrix b0 = mixed_normal_member(rng, r, 1, 3);
  OperatorTuple tuple = gen_tensor_tuple({a0, b0}, r);
  DecompositionResult dec = tuple_decompose(tuple);
  for (const auto& block : dec.blocks) {
    if (block.dimension() == 0) continue;
    for (int j = 0; j < tuple.arity(); ++j) {
      ComplexMatrix restricted =
          block.basis.adjoint() * tuple.ops[j] * block.basis;
      if (block.label[static_cast<std::size_t>(j)] == 0) {
        CHECK(block.certificates[static_cast<std::size_t>(j)] <= 1e-9);
        CHECK(certificate_for(classify(restricted, r), ClassTag::ExactC1r).member);
      } else {
        ComplexMatrix inner =
            largest_reducing_kernel(restricted, defect_c1r(restricted, r), 1e-8);
        CHECK(inner.cols() == 0);
      }
    }
  }
}

TEST_CASE("non doubly commuting tuples are rejected") {
  OperatorTuple bad;
  bad.r = 0.3;
  bad.ops = {0.55 * mat2(1.0, 1.0, 0.0, 1.0), diag({1.0, 0.9})};
  CHECK_THROWS_AS(tuple_decompose(bad), InvalidInputError);
}

TEST_CASE("quantum annulus variant decomposes the scaled tuple") {
  double r = 0.5;
  OperatorTuple tuple;
  tuple.r = r;
  // moduli r and 1/r are the exact quantum-annulus pair; 1.1 is interior
  tuple.ops = {diag({r, 2.0, 1.1})};
  DecompositionResult dec = tuple_decompose_qa(tuple);
  REQUIRE(dec.blocks.size() == 2);
  CHECK(dec.blocks[0].dimension() == 2);
  CHECK(dec.blocks[1].dimension() == 1);
  ComplexMatrix expected = diag({1.0, 1.0, 0.0});
  CHECK(max_abs_diff(dec.projector(0), expected) <= 1e-10);
}

TEST_CASE("sarason members decompose as purely non-exact under both routes") {
  ComplexMatrix s = gen_sarason(SarasonShiftSpec{0.3, 0.5, 2});
  OperatorTuple tuple;
  tuple.r = 0.5;
  tuple.ops = {s};
  DecompositionResult dec = tuple_decompose(tuple);
  CHECK(dec.blocks[0].dimension() == 0);
  CHECK(dec.blocks[1].dimension() == 5);

  OperatorTuple qa;
  qa.r = std::sqrt(0.5);
  qa.ops = {std::pow(0.5, -0.25) * s};  // scaled member of QA_{sqrt(r)}
  DecompositionResult qdec = tuple_decompose_qa(qa);
  CHECK(qdec.blocks[0].dimension() == 0);
  CHECK(qdec.blocks[1].dimension() == 5);
}
