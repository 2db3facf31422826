#pragma once

#include <array>

#include "annulus/types.hpp"

namespace annulus {

/// Parameters of the analytic surjection v : D -> A_r used as the scalar
/// building block of every boundary symbol. The map is the composition of
/// z -> (1/pi) Log((1+z)/(1-z)) (disk to the strip |Im| < 1/2) with
/// w -> exp(i c w + d), c = -log r, d = (log r)/2, so that
///   v(0) = sqrt(r), |v| = r on the upper boundary arc, |v| = 1 on the
/// lower one, and r <= |v| <= 1 throughout the closed disk.
struct AnnulusMapParams {
  double r;
  double c;  // -log r
  double d;  // (log r)/2

  explicit AnnulusMapParams(double r_in);
};

/// Radius of the boundary neighbourhoods around the logarithmic
/// singularities (z = +-1 and their Moebius pullbacks) that are treated as
/// exceptional.
inline constexpr double kExceptionalRadius = 1e-9;

Complex annulus_map(Complex z, double r);

/// The unique purely imaginary w in D with v(w) = lambda, lambda in (r, 1).
Complex annulus_preimage(double lambda, double r);

/// Disk automorphism z -> (w0 - z)/(1 - conj(w0) z); an involution.
Complex mobius(Complex w0, Complex z);

struct RecenteredSymbolParams {
  Complex w0;     // preimage of lambda
  double lambda;  // target value at the origin
  double r;
};

/// Builds the recentering of v with value lambda at the origin.
RecenteredSymbolParams make_recentered_symbol(double lambda, double r);

/// v(mobius(w0, z)): equals lambda at z = 0, boundary moduli in {r, 1}.
Complex recentered_symbol(const RecenteredSymbolParams& params, Complex z);

/// The two boundary points where the recentered symbol has no continuous
/// extension: the Moebius images of +-1.
std::array<Complex, 2> exceptional_points(Complex w0);

}  // namespace annulus
