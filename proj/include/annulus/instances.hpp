#pragma once

#include <cstdint>
#include <vector>

#include "annulus/operator_classes.hpp"

namespace annulus {

/// Finite model of the annulus-boundary weighted shift: a cyclic shift on
/// the basis e_{-N}, ..., e_N with weights
///   alpha_n = sqrt((1 + r^{2(alpha+n+1)}) / (1 + r^{2(alpha+n)}))
/// and wrap weight sqrt(r) closing e_N back to e_{-N}. All weights lie in
/// (r, 1), so the operator is an invertible completely-non-exact member of
/// the C1r class.
struct SarasonShiftSpec {
  double alpha = 0.0;     // weight exponent, in [0, 1)
  double r = 0.5;
  int half_width = 1;     // dimension = 2 * half_width + 1

  void validate() const;
};

double sarason_weight(double alpha, double r, int n);

ComplexMatrix gen_sarason(const SarasonShiftSpec& spec);

/// r^{1/(2n)} I: a scalar completely-non-exact C1r member for every n >= 1.
ComplexMatrix gen_scalar_family(int n, double r, Eigen::Index dim);

/// Deterministic splitmix/xoshiro-free generator: all randomness is drawn
/// through this so generated instances are bit-reproducible across
/// platforms regardless of the standard library's distribution code.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);
  double uniform();                        // [0, 1)
  double uniform(double lo, double hi);
  Complex gaussian_pair();                 // standard complex gaussian
 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
};

ComplexMatrix random_unitary(SeededRng& rng, Eigen::Index dim);

/// d commuting normal operators sharing one random eigenbasis, with moduli
/// drawn from [r + 0.01, 0.99]; doubly commuting and in C1r by construction.
OperatorTuple gen_normal_tuple(std::uint64_t seed, int d, Eigen::Index dim, double r);

/// T_j = I x ... x A_j x ... x I on the tensor product space; requires each
/// factor to be a C1r member at radius r.
OperatorTuple gen_tensor_tuple(const std::vector<ComplexMatrix>& factors, double r,
                               const ToleranceConfig& tol = {});

}  // namespace annulus
