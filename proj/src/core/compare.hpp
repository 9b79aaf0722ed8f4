// Curve comparison and convergence sweeps: the statistics used to confront
// exact finite-ring distributions, sampled ensembles, and the limiting
// crossover laws with each other.
#pragma once

#include <cstdint>
#include <vector>

#include "core/finite_time.hpp"
#include "core/limit.hpp"

namespace ptasep {

// Outcome of comparing two curves tabulated on an identical grid.
//   ks_statistic  : max |F_a - F_b| with both values clamped to [0,1]
//                   (the usual statistic for distribution functions),
//   sup_pointwise : max |a - b| on the raw values,
//   pass          : ks_statistic <= threshold.
// The two statistics coincide whenever both curves already lie in [0,1].
struct CompareReport {
  double ks_statistic = 0.0;
  double sup_pointwise = 0.0;
  int64_t n_points = 0;
  bool pass = false;
};

// Requires grid_a == grid_b elementwise (exact equality); anything else
// throws GridMismatch.  Values are compared position by position.
CompareReport compare_grids(const std::vector<double>& grid_a,
                            const std::vector<double>& val_a,
                            const std::vector<double>& grid_b,
                            const std::vector<double>& val_b,
                            double threshold);

// One ring size of a convergence sweep.  sup_distance is the maximum over
// the x-grid of |exact finite-time scaled CDF - limit CDF|, where the limit
// is evaluated at the realised scaling coordinates: the integer threshold
// a = round(center - x*width) shifts x to x', and the realised rescaled
// time tau' is recovered from the (quantised) physical time t via
// tau' = t*sqrt(rho(1-rho))/L^{3/2}.
struct SweepRow {
  int64_t L = 0;
  double t = 0.0;
  double tau_realized = 0.0;
  double sup_distance = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;   // sorted by increasing L
  bool monotone = false;        // strictly decreasing sup_distance in L
};

// Flat start with spacing d on rings L in `sizes` (each must be a multiple
// of d); tagged particle k = N.  The exact curve P(x_N(t) >= a) on the
// thresholds realised from x_grid is compared against
// F_flat(tau'^{1/3} x'; tau').
SweepReport converge_sweep_flat(int64_t d, const std::vector<int64_t>& sizes,
                                double tau, const std::vector<double>& x_grid,
                                const QuadratureSpec& quad = {},
                                const LimitOptions& limit = {});

// Step start at density rho (rho*L must be an integer for every size);
// tagged particle k = N.  Compared against F_step(tau'^{1/3} x'; tau',
// gamma), with gamma realised exactly by the time quantisation.
SweepReport converge_sweep_step(double rho, const std::vector<int64_t>& sizes,
                                double tau, double gamma,
                                const std::vector<double>& x_grid,
                                const QuadratureSpec& quad = {},
                                const LimitOptions& limit = {});

}  // namespace ptasep
