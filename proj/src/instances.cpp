#include "annulus/instances.hpp"

#include <cmath>

#include <Eigen/QR>

namespace annulus {

void SarasonShiftSpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw InvalidInputError("sarason: alpha must lie in [0, 1)");
  }
  validate_radius(r, ToleranceConfig{});
  if (half_width < 1) throw InvalidInputError("sarason: half_width must be >= 1");
}

double sarason_weight(double alpha, double r, int n) {
  double a = std::pow(r, 2.0 * (alpha + n));
  return std::sqrt((1.0 + a * r * r) / (1.0 + a));
}

ComplexMatrix gen_sarason(const SarasonShiftSpec& spec) {
  spec.validate();
  const int nn = spec.half_width;
  const Eigen::Index dim = 2 * nn + 1;
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  // basis order e_{-N}, ..., e_N; column j holds the image of e_{j-N}
  for (int n = -nn; n < nn; ++n) {
    s(n + nn + 1, n + nn) = sarason_weight(spec.alpha, spec.r, n);
  }
  s(0, dim - 1) = std::sqrt(spec.r);  // wrap e_N -> sqrt(r) e_{-N}
  return s;
}

ComplexMatrix gen_scalar_family(int n, double r, Eigen::Index dim) {
  if (n < 1) throw InvalidInputError("gen_scalar_family: n must be >= 1");
  validate_radius(r, ToleranceConfig{});
  if (dim < 1) throw InvalidInputError("gen_scalar_family: dim must be >= 1");
  return std::pow(r, 1.0 / (2.0 * n)) * ComplexMatrix::Identity(dim, dim);
}

// splitmix64; fixed here rather than <random> so that the byte-identical
// regeneration contract does not depend on the standard library.
SeededRng::SeededRng(std::uint64_t seed) : state_(seed) {}

std::uint64_t SeededRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

Complex SeededRng::gaussian_pair() {
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double mag = std::sqrt(-2.0 * std::log(u1));
  return Complex(mag * std::cos(2.0 * M_PI * u2), mag * std::sin(2.0 * M_PI * u2));
}

ComplexMatrix random_unitary(SeededRng& rng, Eigen::Index dim) {
  ComplexMatrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.gaussian_pair();
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r_fac = qr.matrixQR().triangularView<Eigen::Upper>();
  // normalize so the factorization is unique: positive diagonal of R
  for (Eigen::Index j = 0; j < dim; ++j) {
    Complex d = r_fac(j, j);
    double m = std::abs(d);
    if (m > 0) q.col(j) *= d / m;
  }
  return q;
}

OperatorTuple gen_normal_tuple(std::uint64_t seed, int d, Eigen::Index dim, double r) {
  if (d < 1) throw InvalidInputError("gen_normal_tuple: d must be >= 1");
  if (dim < 1) throw InvalidInputError("gen_normal_tuple: dim must be >= 1");
  validate_radius(r, ToleranceConfig{});
  SeededRng rng(seed);
  ComplexMatrix q = random_unitary(rng, dim);
  OperatorTuple tuple;
  tuple.r = r;
  for (int j = 0; j < d; ++j) {
    ComplexVector diag(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      double modulus = rng.uniform(r + 0.01, 0.99);
      double phase = rng.uniform(0.0, 2.0 * M_PI);
      diag(i) = std::polar(modulus, phase);
    }
    tuple.ops.push_back(q * diag.asDiagonal() * q.adjoint());
  }
  return tuple;
}

OperatorTuple gen_tensor_tuple(const std::vector<ComplexMatrix>& factors, double r,
                               const ToleranceConfig& tol) {
  if (factors.empty()) throw InvalidInputError("gen_tensor_tuple: no factors");
  validate_radius(r, tol);
  for (std::size_t j = 0; j < factors.size(); ++j) {
    const auto certs = classify(factors[j], r, tol);
    if (!certificate_for(certs, ClassTag::C1r).member) {
      throw MembershipError("gen_tensor_tuple: factor " + std::to_string(j) +
                            " is not a C1r member at r = " + std::to_string(r));
    }
  }
  OperatorTuple tuple;
  tuple.r = r;
  const int d = static_cast<int>(factors.size());
  for (int j = 0; j < d; ++j) {
    ComplexMatrix acc = ComplexMatrix::Identity(1, 1);
    for (int i = 0; i < d; ++i) {
      const ComplexMatrix& piece =
          (i == j) ? factors[i]
                   : ComplexMatrix(ComplexMatrix::Identity(factors[i].rows(), factors[i].rows()));
      acc = kron(acc, piece);
    }
    tuple.ops.push_back(acc);
  }
  return tuple;
}

}  // namespace annulus
