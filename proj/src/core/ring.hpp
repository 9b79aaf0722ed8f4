#pragma once

#include <cmath>
#include <cstdint>

#include "core/errors.hpp"

namespace ptasep {

// Ring geometry: L sites, N particles.  The density and the contour radius
// bound r0 = rho^rho (1-rho)^(1-rho) are derived on demand; N and L stay the
// exact integers.
struct SystemShape {
  int64_t L = 0;
  int64_t N = 0;

  static constexpr int64_t kMaxL = 4096;

  SystemShape() = default;
  SystemShape(int64_t L_, int64_t N_) : L(L_), N(N_) { validate(); }

  void validate() const {
    if (N < 1 || N >= L) throw InvalidArgument("require 1 <= N < L");
    if (L > kMaxL) throw ScaleExceeded("L exceeds supported maximum 4096");
  }

  double rho() const { return static_cast<double>(N) / static_cast<double>(L); }

  double r0() const {
    const double p = rho();
    return std::exp(p * std::log(p) + (1.0 - p) * std::log1p(-p));
  }
};

}  // namespace ptasep
