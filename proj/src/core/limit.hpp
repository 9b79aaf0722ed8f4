// Limiting crossover distributions of the relaxation scale: F1 for the
// flat start and F2 for the step start.  Both are contour averages over a
// circle |z| = r < 1 of
//
//     exp(x*A1(z) + tau*A2(z) + ...) * det(I - K_z),
//
// where K_z is a discrete kernel living on the solutions of
// e^{-xi^2/2} = z with Re(xi) < 0.  The node set is truncated adaptively;
// the z-average reuses the shared trapezoid driver.
#pragma once

#include <vector>

#include "core/quadrature.hpp"

namespace ptasep {

// Evaluation settings: the z-circle quadrature plus the truncation policy
// for the discrete node set (half-count m, i.e. branch indices -m..m).
// Starting from node_start, each contour point checks m against m+4 and
// doubles m until the determinant moves by less than node_tol, throwing
// TruncationUnstable beyond node_cap.
struct LimitOptions {
  QuadratureSpec quad{64, 0.5, true, 4096, 1};
  int node_start = 12;
  int node_cap = 192;
  double node_tol = 1e-9;

  void validate() const;
};

struct LimitPoint {
  double value = 0.0;
  double imag_residue = 0.0;  // |Im| of the contour average
  double quad_delta = 0.0;    // |change| on the last z-node doubling
  int m_used = 0;             // largest accepted node half-count
  int nodes_used = 0;         // z-circle points actually used
};

// F1(x; tau): the crossover law reached from the flat start.
LimitPoint limit_cdf_flat(double x, double tau, const LimitOptions& opt = {});

// F2(x; tau, gamma): the crossover law reached from the step start; gamma
// is the relative tag position, and the value is 1-periodic and even in it.
LimitPoint limit_cdf_step(double x, double tau, double gamma,
                          const LimitOptions& opt = {});

// --- building blocks, exposed so tests can validate them directly ---

// The 2m+1 solutions of e^{-xi^2/2} = z with Re(xi) < 0 for branch indices
// k = -m..m (ascending):  xi_k = -sqrt(-2 Log z - 4 pi i k).  All lie in
// the sector arg(xi) in (3pi/4, 5pi/4).  Requires 0 < |z| < 1.
std::vector<lcplx> limit_nodes(lcplx z, int m);

// The x- and tau-independent part of the kernel exponent at a node xi:
//   -(1/sqrt(2 pi)) * int_{-inf}^{xi} Li_{1/2}(e^{-w^2/2}) dw
// evaluated by term-wise integration of the polylog series,
//   -(1/2) sum_{j>=1} erfc(-xi sqrt(j/2)) / j,
// truncated when a term falls below 1e-14 (geometric decay at rate |z|).
lcplx psi_series(lcplx xi);

// The scalar prefactor ingredients: A1 = -Li_{3/2}(z)/sqrt(2 pi),
// A2 = -Li_{5/2}(z)/sqrt(2 pi), A3 = -log(1-z)/4, and B from b_series.
struct LimitConstants {
  lcplx a1, a2, a3, b;
};
LimitConstants limit_constants(lcplx z);

// B(z) = sum_{n>=2} c_n z^n with c_n = (1/(4 pi n)) sum_{k=1}^{n-1}
// (k(n-k))^{-1/2}; requires |z| <= 0.95 and truncates when |c_n z^n|
// drops below 1e-14.
lcplx b_series(lcplx z);

// det(I - K) for the flat kernel on the truncated node set:
//   K(xi1, xi2) = e^{Psi(xi1) + Psi(xi2)} / (xi1 (xi1 + xi2)),
//   Psi(xi) = -tau xi^3/3 + x xi + psi_series(xi).
lcplx flat_limit_det(lcplx z, double x, double tau, int m);

// det(I - K) for the step kernel on the truncated node set:
//   K(xi1, xi2) = sum_eta e^{Phi(xi1) + Phi(eta) + gamma (xi1^2 - eta^2)/2}
//                 / (xi1 eta (xi1 + eta)(eta + xi2)),
//   Phi(xi) = -tau xi^3/3 + x xi + 2 psi_series(xi),
// with the eta-sum over the same truncated set.
lcplx step_limit_det(lcplx z, double x, double tau, double gamma, int m);

}  // namespace ptasep
