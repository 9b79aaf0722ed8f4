#pragma once

#include <stdexcept>
#include <string>

namespace ptasep {

// Error taxonomy for the library.  Each subclass corresponds to one failure
// mode surfaced through the C API as a distinct status code.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input outside the documented domain (bad shape, bad index, bad radius...).
struct InvalidArgument : Error {
  using Error::Error;
};

// Problem size beyond the supported envelope (L too large, oracle state
// space too big).
struct ScaleExceeded : Error {
  using Error::Error;
};

// Root refinement failed to reach the residual target.
struct NonConvergence : Error {
  using Error::Error;
};

// |zhat| outside (0,1): the two root contours merge or degenerate.
struct DegenerateZ : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Flat-case partner matching found zero or multiple candidates.
struct PairingFailure : Error {
  using Error::Error;
};

// Doubling the quadrature node count still moves the answer too much.
struct QuadratureDivergence : Error {
  using Error::Error;
};

// Phase of a fractional-power factor jumped by >= pi between adjacent
// quadrature nodes; the node count is too small to track the branch.
struct BranchDiscontinuity : Error {
  using Error::Error;
};

// Scaling helper produced t < 0.
struct NegativeTime : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Uniformization displacement counter exceeded its configured bound.
struct TruncationOverflow : Error {
  using Error::Error;
};

// A series did not meet tolerance within its iteration budget.
struct SeriesStall : Error {
  using Error::Error;
};

// Discrete-kernel truncation kept moving the determinant at the node cap.
struct TruncationUnstable : Error {
  using Error::Error;
};

// Polylog argument on the cut [1, inf).
struct BranchCut : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// Comparison inputs do not share the same grid.
struct GridMismatch : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

// init(): initial condition incompatible with the ring shape.
struct ShapeMismatch : InvalidArgument {
  using InvalidArgument::InvalidArgument;
};

}  // namespace ptasep
