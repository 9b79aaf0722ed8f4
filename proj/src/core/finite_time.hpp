// Exact finite-time distributions for TASEP on a ring.
//
// Two evaluation routes are provided:
//   * direct determinants over the full root set (transition_probability,
//     one_point_general) -- O(L) x O(L) matrices, intended for small rings
//     where they double as an independent check, and
//   * condensed one-point formulas for the flat and step initial conditions
//     (one_point_flat, one_point_step) whose matrix dimension is the number
//     of roots in one half plane, usable up to L in the thousands.
//
// All routes integrate an analytic function of zhat over a circle via
// contour_average; values are exact up to quadrature, which the driver
// refines adaptively.
#pragma once

#include <cstdint>
#include <vector>

#include "quadrature.hpp"
#include "ring.hpp"

namespace ptasep {

// P_Y(X; t): probability that the configuration at time t is X, starting
// from Y at time 0.  Positions are the strictly increasing representative
// window y_1 < ... < y_N < y_1 + L, with X in lifted coordinates (x_j may
// exceed L as particles wind around).  Entries are formed over all L Bethe
// roots; supported for L <= 20 where this route doubles as a cross-check.
ProbResult transition_probability(SystemShape shape,
                                  const std::vector<int64_t>& X,
                                  const std::vector<int64_t>& Y, double t,
                                  const QuadratureSpec& spec = {});

// P_Y(x_k(t) >= a) for a general deterministic initial condition Y,
// evaluated through the one-point determinant over all roots.
// Supported for L <= 20; serves as the reference for the condensed routes.
ProbResult one_point_general(SystemShape shape, const std::vector<int64_t>& Y,
                             int64_t k, int64_t a, double t,
                             const QuadratureSpec& spec = {});

// P(x_k(t) >= a) for the flat initial condition x_j(0) = j*d on a ring of
// size L = d*N, evaluated for every a in a_list in one pass (the per-node
// root solve and pair products are shared across the batch).  sig_window is
// the significance cutoff, in e-folds, below which kernel rows/columns are
// dropped; tests double it to confirm truncation stability.
std::vector<ProbResult> one_point_flat(int64_t d, int64_t N, int64_t k,
                                       const std::vector<int64_t>& a_list,
                                       double t,
                                       const QuadratureSpec& spec = {},
                                       double sig_window = 70.0);

// P(x_k(t) >= a) for the step initial condition x_j(0) = -N + j,
// j = 1..N, batched over a_list as above.
std::vector<ProbResult> one_point_step(SystemShape shape, int64_t k,
                                       const std::vector<int64_t>& a_list,
                                       double t,
                                       const QuadratureSpec& spec = {},
                                       double sig_window = 70.0);

// Relaxation-scale parametrisation for the flat initial condition.
// Given (d, N), a tagged particle index k, rescaled time tau > 0 and
// rescaled position x, produces the event P(x_k(t) >= a) whose exact value
// is compared against the limit law at the realised coordinates.
struct FlatScaling {
  int64_t a = 0;        // integer threshold handed to one_point_flat
  double t = 0;         // physical time  tau * L^{3/2} / sqrt(rho(1-rho))
  double x_realized = 0;  // (center - a) / width: x after integer rounding
  double tau = 0;
};
FlatScaling flat_scaling(int64_t d, int64_t N, int64_t k, double tau,
                         double x);

// Relaxation-scale parametrisation for the step initial condition.  The
// physical time is quantised so that the extra relaxation parameter gamma
// is realised exactly; throws NegativeTime when the requested (tau, gamma,
// k) combination would need t < 0.
struct StepScaling {
  int64_t a = 0;
  double t = 0;
  double x_realized = 0;
  double tau = 0;
  double gamma = 0;  // realised exactly by construction
};
StepScaling step_scaling(SystemShape shape, int64_t k, double tau,
                         double gamma, double x);

// Height/current description of the same event.  For the tagged-particle
// event {x_k(t) >= i*L + m + 1} (requires i >= 1 so the threshold lies at
// least one full revolution ahead), returns the equivalent time-integrated
// current threshold: the event equals {J(t) >= current_min} where J counts
// signed jumps across the bond used by the convention below.
struct CurrentEvent {
  int64_t position_threshold = 0;  // i*L + m + 1
  int64_t current_min = 0;         // i*N + (N + 1 - k) + m * [m <= 0]
};
CurrentEvent current_from_tagged(SystemShape shape, int64_t i, int64_t m,
                                 int64_t k);

}  // namespace ptasep
