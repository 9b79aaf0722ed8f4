// Scalar special functions used by the limiting crossover distributions:
// half-integer polylogarithms, the complementary error function of a
// complex argument, and cached Gauss-Legendre rules for the quadrature
// cross-checks.
#pragma once

#include <vector>

#include "core/numeric.hpp"

namespace ptasep {

// Gauss-Legendre nodes (ascending) and weights on [-1, 1], computed in
// extended precision by Newton iteration on the Legendre recurrence and
// cached per order.  Thread-safe.
struct GaussLegendre {
  std::vector<long double> nodes;
  std::vector<long double> weights;
};
const GaussLegendre& gauss_legendre(int n);

// Integrates fn over [a, b] with `panels` equal Gauss-Legendre panels of
// `order` points each.  The integrand must be smooth on [a, b].
template <typename Fn>
lcplx gl_integrate(Fn&& fn, long double a, long double b, int panels,
                   int order) {
  const GaussLegendre& gl = gauss_legendre(order);
  KahanCSum acc;
  const long double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const long double lo = a + width * p;
    for (int i = 0; i < order; ++i) {
      const long double u = lo + width * 0.5L * (gl.nodes[i] + 1.0L);
      acc.add(fn(u) * (gl.weights[i] * width * 0.5L));
    }
  }
  return acc.value_l();
}

// Complementary error function for complex argument, relative error well
// below 1e-12 on the whole plane.  Maclaurin series where it is free of
// harmful cancellation (|Re zeta| <= 2.5), a modified-Lentz continued
// fraction with exact exp(-zeta^2) prefactor for Re zeta > 2.5, and the
// reflection cerfc(-zeta) = 2 - cerfc(zeta) for Re zeta < 0.
lcplx cerfc(lcplx zeta);

// Polylogarithm Li_s for the half-integer orders s = twice_s / 2 with
// twice_s in {1, 3, 5}.  Defined for w off the ray [1, inf).
//   - polylog_series: the defining power series, valid for |w| < 1;
//   - polylog_integral: the integral continuation (substitution x = u^2,
//     Gauss-Legendre panels, Gaussian tail cutoff), valid off the ray;
//   - polylog: dispatch -- series for |w| <= 0.8, integral otherwise.
// Throws BranchCut if w lies on [1, inf); SeriesStall if the series fails
// to meet tolerance within its term budget.
lcplx polylog_series(int twice_s, lcplx w);
lcplx polylog_integral(int twice_s, lcplx w);
lcplx polylog(int twice_s, lcplx w);

}  // namespace ptasep
