#pragma once

#include <functional>
#include <vector>

#include "core/numeric.hpp"

namespace ptasep {

// Contour-average settings shared by every formula that integrates over the
// zhat-circle.  M equispaced nodes give the (spectrally accurate) trapezoid
// rule for periodic analytic integrands; adaptive mode doubles M, reusing
// previous evaluations, until the result stabilizes.
struct QuadratureSpec {
  int nodes = 128;
  double radius = 0.5;
  bool adaptive = true;
  int max_nodes = 4096;
  int threads = 1;

  void validate() const {
    if (nodes < 8 || nodes % 2 != 0) {
      throw InvalidArgument("quadrature nodes must be even and >= 8");
    }
    if (!(radius > 0.0) || !(radius < 1.0)) {
      throw InvalidArgument("quadrature radius must lie in (0,1)");
    }
    if (adaptive && max_nodes < nodes) {
      throw InvalidArgument("max_nodes must be >= nodes");
    }
    if (threads < 1) throw InvalidArgument("threads must be >= 1");
  }
};

struct ProbResult {
  double value = 0.0;
  double imag_residue = 0.0;  // |Im| of the contour average
  double quad_delta = 0.0;    // |change| on the last node doubling
  int nodes_used = 0;
};

// A node evaluation returns one integrand value per output slot (e.g. one
// per threshold a in a batch) plus an optional branch-phase monitor: if two
// angularly adjacent nodes report phases differing by >= pi, the node count
// cannot resolve the winding of the fractional-power factors and must grow.
// Values are carried in extended precision because the average can sit many
// orders of magnitude below the individual node values; the absolute noise
// floor of the reduction is (max node magnitude) * epsilon.
struct NodeEval {
  std::vector<lcplx> values;
  double branch_phase = std::numeric_limits<double>::quiet_NaN();
};

// Node functions receive the contour point in extended precision: the
// trapezoid's cancellation amplifies any node-coordinate rounding by the
// integrand's log-derivative, so zhat itself must be accurate at the
// working epsilon.
using NodeFn = std::function<NodeEval(lcplx zhat)>;

// Averages fn over M equispaced points of the circle |zhat| = radius.
// The reduction is ordered by ascending angle index (Kahan, long double), so
// results are bitwise identical for any thread count.  Throws
// QuadratureDivergence if the doubling delta stays above 1e-6 at max_nodes,
// and BranchDiscontinuity if the phase monitor jumps persist at max_nodes.
std::vector<ProbResult> contour_average(const NodeFn& fn, size_t n_slots,
                                        const QuadratureSpec& spec,
                                        double tol = 1e-9);

}  // namespace ptasep
