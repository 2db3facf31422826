#include <doctest.h>

#include <cmath>

#include "annulus/instances.hpp"
#include "annulus/operator_classes.hpp"
#include "test_helpers.hpp"

using namespace annulus;
using namespace annulus::testing;

TEST_CASE("defect_c1r vanishes exactly on two-point moduli") {
  for (double r : {0.3, 0.5, 0.9}) {
    ComplexMatrix t = diag({1.0, r});
    CHECK(operator_norm(defect_c1r(t, r)) <= 1e-14);
  }
}

TEST_CASE("defect_c1r scalar family values") {
  // member r^{1/(2n)} I has gram r^{1/n}, so the defect is
  // (1 - r^{1/n}) (1 - r^2 r^{-1/n})
  for (double r : {0.25, 0.5}) {
    for (int n = 1; n <= 6; ++n) {
      ComplexMatrix t = gen_scalar_family(n, r, 1);
      double expected = (1.0 - std::pow(r, 1.0 / n)) * (1.0 - r * r * std::pow(r, -1.0 / n));
      CHECK(std::abs(defect_c1r(t, r)(0, 0).real() - expected) <= 1e-14);
    }
  }
  // spot values: n = 1 gives (1-r)^2, n = 2 gives (1-sqrt(r))(1-r^2/sqrt(r))
  CHECK(defect_c1r(gen_scalar_family(1, 0.5, 1), 0.5)(0, 0).real() == doctest::Approx(0.25));
  CHECK(defect_c1r(gen_scalar_family(1, 0.25, 1), 0.25)(0, 0).real() ==
        doctest::Approx(0.5625));
  CHECK(defect_c1r(gen_scalar_family(2, 0.5, 1), 0.5)(0, 0).real() ==
        doctest::Approx((1.0 - std::sqrt(0.5)) * (1.0 - 0.25 / std::sqrt(0.5))));
}

TEST_CASE("defect_c1r is PSD on generated members") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    OperatorTuple tuple = gen_normal_tuple(seed, 1, 5, 0.5);
    PsdCheck check = is_psd(defect_c1r(tuple.ops[0], 0.5), 1e-10);
    CHECK(check.psd);
    CHECK(check.min_eigenvalue >= -1e-10);
  }
}

TEST_CASE("defect_qar closed forms") {
  double r = 0.5;
  CHECK(operator_norm(defect_qar(diag({r, 1.0 / r}), r)) <= 1e-14);
  ComplexMatrix d = defect_qar(ComplexMatrix::Identity(2, 2), r);
  CHECK(max_abs_diff(d, (2.25 * ComplexMatrix::Identity(2, 2)).eval()) <= 1e-14);

  SeededRng rng(2);
  ComplexMatrix u = random_unitary(rng, 4);
  ComplexMatrix du = defect_qar(u, 0.7);
  double expected = 1.0 / 0.49 + 0.49 - 2.0;
  CHECK(max_abs_diff(du, (expected * ComplexMatrix::Identity(4, 4)).eval()) <= 1e-12);
  CHECK(is_psd(du, 1e-10).psd);
}

TEST_CASE("classify on landmark inputs") {
  double r = 0.5;
  auto certs = classify(diag({1.0, r}), r);
  CHECK(certificate_for(certs, ClassTag::ExactC1r).member);
  CHECK(certificate_for(certs, ClassTag::C1r).member);
  CHECK_FALSE(certificate_for(certs, ClassTag::ExactQAr).member);

  auto qa_certs = classify(diag({r, 1.0 / r}), r);
  CHECK(certificate_for(qa_certs, ClassTag::ExactQAr).member);
  CHECK(certificate_for(qa_certs, ClassTag::QAr).member);
  CHECK_FALSE(certificate_for(qa_certs, ClassTag::C1r).member);

  auto scalar_certs = classify((0.8 * ComplexMatrix::Identity(2, 2)).eval(), r);
  const auto& c1r = certificate_for(scalar_certs, ClassTag::C1r);
  CHECK(c1r.member);
  CHECK(c1r.witness_norm == doctest::Approx(0.8));
  CHECK(c1r.witness_inv_norm == doctest::Approx(0.625));
  CHECK_FALSE(certificate_for(scalar_certs, ClassTag::ExactC1r).member);
}

TEST_CASE("norm route and defect route agree") {
  SeededRng rng(23);
  for (int rep = 0; rep < 60; ++rep) {
    double r = 0.3 + 0.2 * (rep % 3);
    // singular values straddle the class boundary so both members and
    // non-members appear
    ComplexMatrix t = random_scaled(rng, 4, r * 0.7, 1.3);
    auto certs = classify(t, r);
    const auto& c = certificate_for(certs, ClassTag::C1r);
    bool defect_route = c.defect_min_eig >= -1e-10;
    CHECK(c.member == defect_route);
    const auto& q = certificate_for(certs, ClassTag::QAr);
    bool qa_defect_route = q.defect_min_eig >= -1e-10;
    CHECK(q.member == qa_defect_route);
  }
}

TEST_CASE("exact membership implies membership") {
  SeededRng rng(31);
  double r = 0.4;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> moduli;
    for (int i = 0; i < 4; ++i) moduli.push_back(rng.uniform(0.0, 1.0) < 0.5 ? r : 1.0);
    ComplexMatrix t = normal_with_moduli(rng, moduli);
    auto certs = classify(t, r);
    CHECK(certificate_for(certs, ClassTag::ExactC1r).member);
    CHECK(certificate_for(certs, ClassTag::C1r).member);
  }
}

TEST_CASE("scaling correspondence on the diagonal example") {
  double r = 0.25;
  auto [s, r_prime] = scale_c1r_to_qa(diag({1.0, r}), r);
  CHECK(r_prime == doctest::Approx(0.5));
  CHECK(max_abs_diff(s, diag({2.0, 0.5})) <= 1e-14);
  auto certs = classify(s, r_prime);
  CHECK(certificate_for(certs, ClassTag::ExactQAr).member);
}

TEST_CASE("scaling correspondence preserves membership both ways") {
  SeededRng rng(37);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    double r = 0.3 + 0.1 * (seed % 5);
    OperatorTuple tuple = gen_normal_tuple(seed, 1, 4, r);
    const ComplexMatrix& t = tuple.ops[0];
    auto [s, r_prime] = scale_c1r_to_qa(t, r);
    bool lhs = certificate_for(classify(t, r), ClassTag::C1r).member;
    bool rhs = certificate_for(classify(s, r_prime), ClassTag::QAr).member;
    CHECK(lhs == rhs);
    CHECK(lhs);
  }
  // also on generic non-members
  for (int rep = 0; rep < 50; ++rep) {
    double r = 0.5;
    ComplexMatrix t = random_scaled(rng, 3, 0.2, 1.6);
    auto [s, r_prime] = scale_c1r_to_qa(t, r);
    CHECK(certificate_for(classify(t, r), ClassTag::C1r).member ==
          certificate_for(classify(s, r_prime), ClassTag::QAr).member);
  }
}

TEST_CASE("scaling round-trip returns the original pair") {
  SeededRng rng(41);
  ComplexMatrix t = random_scaled(rng, 3, 0.5, 0.9);
  double r = 0.36;
  auto [s, r_prime] = scale_c1r_to_qa(t, r);
  auto [back, r_back] = qa_to_c1r(s, r_prime);
  CHECK(max_abs_diff(back, t) <= 1e-14);
  CHECK(std::abs(r_back - r) <= 1e-15);
}

TEST_CASE("is_doubly_commuting basics") {
  OperatorTuple single;
  single.r = 0.5;
  single.ops = {diag({0.8, 0.9})};
  CommutationCheck one = is_doubly_commuting(single);
  CHECK(one.doubly_commuting);
  CHECK(one.max_residual == 0.0);

  std::vector<ComplexMatrix> factors = {gen_sarason(SarasonShiftSpec{0.3, 0.5, 1}),
                                        gen_scalar_family(1, 0.5, 2)};
  OperatorTuple tensor = gen_tensor_tuple(factors, 0.5);
  CommutationCheck tc = is_doubly_commuting(tensor);
  CHECK(tc.doubly_commuting);
  CHECK(tc.max_residual <= 1e-13);
}

TEST_CASE("non-commuting pair is rejected with the residual") {
  // scaled Jordan block is a C1r member at r = 0.3 but does not commute
  // with diag(1, 0.9)
  OperatorTuple pair;
  pair.r = 0.3;
  pair.ops = {0.55 * mat2(1.0, 1.0, 0.0, 1.0), diag({1.0, 0.9})};
  CHECK(certificate_for(classify(pair.ops[0], 0.3), ClassTag::C1r).member);
  CommutationCheck check = is_doubly_commuting(pair);
  CHECK_FALSE(check.doubly_commuting);
  CHECK(check.max_residual > 1e-3);
}

TEST_CASE("is_doubly_commuting is order and conjugation invariant") {
  SeededRng rng(47);
  OperatorTuple tuple = gen_normal_tuple(5, 2, 4, 0.5);
  CommutationCheck fwd = is_doubly_commuting(tuple);
  std::swap(tuple.ops[0], tuple.ops[1]);
  CommutationCheck rev = is_doubly_commuting(tuple);
  CHECK(std::abs(fwd.max_residual - rev.max_residual) <= 1e-14);

  ComplexMatrix q = random_unitary(rng, 4);
  OperatorTuple conj = tuple;
  for (auto& op : conj.ops) op = q * op * q.adjoint();
  CommutationCheck after = is_doubly_commuting(conj);
  CHECK(after.doubly_commuting == rev.doubly_commuting);
  CHECK(std::abs(after.max_residual - rev.max_residual) <= 1e-12);
}

TEST_CASE("defect spectrum is invariant under unitary conjugation") {
  SeededRng rng(53);
  ComplexMatrix t = random_scaled(rng, 4, 0.5, 0.95);
  ComplexMatrix q = random_unitary(rng, 4);
  double r = 0.45;
  RealVector base = hermitian_eig(defect_c1r(t, r)).eigenvalues;
  RealVector conj = hermitian_eig(defect_c1r((q * t * q.adjoint()).eval(), r)).eigenvalues;
  for (Eigen::Index i = 0; i < base.size(); ++i) {
    CHECK(std::abs(base(i) - conj(i)) <= 1e-12);
  }
}

TEST_CASE("radius validation") {
  ComplexMatrix t = diag({0.8, 0.9});
  CHECK_THROWS_AS(classify(t, 0.0), InvalidInputError);
  CHECK_THROWS_AS(classify(t, 1.0), InvalidInputError);
  CHECK_THROWS_AS(defect_c1r(t, -0.5), InvalidInputError);
  CHECK_THROWS_AS(defect_c1r(diag({1.0, 0.0}), 0.5), SingularMatrixError);
}
