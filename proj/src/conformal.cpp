#include "annulus/conformal.hpp"

#include <cmath>

#include "annulus/operator_classes.hpp"

namespace annulus {

AnnulusMapParams::AnnulusMapParams(double r_in) : r(r_in) {
  validate_radius(r_in, ToleranceConfig{});
  c = -std::log(r);
  d = 0.5 * std::log(r);
}

Complex annulus_map(Complex z, double r) {
  AnnulusMapParams p(r);
  if (std::abs(z) > 1.0 + 1e-12) {
    throw InvalidInputError("annulus_map: point outside the closed disk");
  }
  if (std::abs(z - 1.0) < kExceptionalRadius || std::abs(z + 1.0) < kExceptionalRadius) {
    throw InvalidInputError("annulus_map: exceptional point (logarithmic singularity at +-1)");
  }
  // (1+z)/(1-z) maps D to the right half-plane, so the principal branch
  // never meets its cut.
  Complex w = std::log((1.0 + z) / (1.0 - z)) / M_PI;
  return std::exp(Complex(0.0, 1.0) * p.c * w + p.d);
}

Complex annulus_preimage(double lambda, double r) {
  AnnulusMapParams p(r);
  if (!(lambda > r && lambda < 1.0)) {
    throw InvalidInputError("annulus_preimage: lambda must lie in (r, 1), got " +
                            std::to_string(lambda));
  }
  double y = std::tan(0.5 * M_PI * (std::log(lambda) - 0.5 * std::log(r)) / std::log(r));
  Complex w(0.0, y);
  Complex check = annulus_map(w, r);
  if (std::abs(check - lambda) > 1e-10) {
    throw Error("annulus_preimage: round-trip check failed");
  }
  return w;
}

Complex mobius(Complex w0, Complex z) {
  if (std::abs(w0) >= 1.0) {
    throw InvalidInputError("mobius: center must lie in the open disk");
  }
  Complex denom = 1.0 - std::conj(w0) * z;
  if (std::abs(denom) < 1e-300) {
    throw InvalidInputError("mobius: evaluation at the pole");
  }
  return (w0 - z) / denom;
}

RecenteredSymbolParams make_recentered_symbol(double lambda, double r) {
  return RecenteredSymbolParams{annulus_preimage(lambda, r), lambda, r};
}

Complex recentered_symbol(const RecenteredSymbolParams& params, Complex z) {
  return annulus_map(mobius(params.w0, z), params.r);
}

std::array<Complex, 2> exceptional_points(Complex w0) {
  return {mobius(w0, Complex(1.0, 0.0)), mobius(w0, Complex(-1.0, 0.0))};
}

}  // namespace annulus
