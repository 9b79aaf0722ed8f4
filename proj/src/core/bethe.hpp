#pragma once

#include <complex>
#include <vector>

#include "core/numeric.hpp"
#include "core/ring.hpp"

namespace ptasep {

// Spectrum of w^N (w+1)^(L-N) = z^L in the normalized variable
// qhat(w) := (-w/rho)^N ((w+1)/(1-rho))^(L-N), so that qhat(w) = zhat with
// |zhat| < 1.  Nothing of magnitude r0^L is ever formed.  The L roots split
// into two closed contours: L-N "left" roots around -1 with Re(w) < -rho and
// N "right" roots around 0 with Re(w) > -rho.
struct BetheRoots {
  SystemShape shape;
  cplx zhat;

  // Roots in marching order: contiguous along each contour, starting from
  // the root continued in phase from the real-axis seed at phase 0.
  std::vector<cplx> left;   // size L-N
  std::vector<cplx> right;  // size N

  // Principal logs of w and w+1, cached because every downstream formula
  // reuses them across many (k, a) evaluations.
  std::vector<cplx> log_left;
  std::vector<cplx> log_left1;
  std::vector<cplx> log_right;
  std::vector<cplx> log_right1;

  double max_residual = 0.0;  // max over roots of |qhat(w) - zhat|

  // Normalized defect |qhat(w) - zhat| at an arbitrary point.
  double residual_of(cplx w) const;
};

struct SolveOptions {
  int max_newton = 48;
};

// Solves for all L roots.  Method: bisection seeds on the real axis (qhat is
// real and monotone on (-1,-rho) and (-rho,0)), phase continuation of each
// seed to arg(zhat), then marching along each contour by increments of 2*pi*i
// in log qhat with a curvature-corrected predictor and Newton refinement.
// Throws DegenerateZ for |zhat| outside (0,1), NonConvergence on failure.
BetheRoots solve_bethe_roots(const SystemShape& shape, cplx zhat,
                             const SolveOptions& opt = {});

// Flat-case (L = d*N) partner structure: v = V(u) is the unique right root
// with v(v+1)^(d-1) = u(u+1)^(d-1); U(v) collects the d-1 left preimages.
struct FlatPairing {
  int d = 0;
  std::vector<int> partner;                 // left index -> right index
  std::vector<std::vector<int>> preimages;  // right index -> left indices
};
FlatPairing flat_partner_map(const BetheRoots& roots, int d);

// Sum over right roots of the principal Log(w - v).
cplx log_prod_right(const BetheRoots& roots, cplx w);
// Sum over left roots of the principal Log(w - u).
cplx log_prod_left(const BetheRoots& roots, cplx w);
// log of d/dw [prod over right roots (w - v)] at right root j, through the
// derivative identity q'_right(v) = L v^(N-1) (v+1)^(L-N-1) (v+rho)/q_left(v).
// The imaginary part is an accumulated phase (mod 2*pi representative).
cplx log_qprime_right(const BetheRoots& roots, int j);

}  // namespace ptasep
