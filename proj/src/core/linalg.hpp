#pragma once

#include <Eigen/Dense>
#include <limits>

#include "core/numeric.hpp"

namespace ptasep {

// log(det(A)) with row-max pre-scaling so determinants far outside the
// double range are still representable; the imaginary part is an accumulated
// phase (any 2*pi*k representative is fine: callers only exponentiate it).
// Returns real part -inf for a singular matrix.  The scalar is a template
// parameter: extended precision matters when the determinant is a large
// oscillating quantity whose contour average cancels far below its own
// magnitude, and double is the economical choice for big windowed kernels.
template <typename Real>
lcplx scaled_logdet(
    Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> A) {
  using Mat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = A.rows();
  if (n == 0) return {0.0L, 0.0L};
  constexpr long double kInf = std::numeric_limits<long double>::infinity();
  KahanSum log_re;
  KahanSum log_im;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Real m = A.row(i).cwiseAbs().maxCoeff();
    if (m == Real(0) || !std::isfinite(static_cast<double>(m))) {
      return {-kInf, 0.0L};
    }
    A.row(i) /= m;
    log_re.add(std::log(static_cast<long double>(m)));
  }
  Eigen::PartialPivLU<Mat> lu(std::move(A));
  const auto& diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::complex<Real> d = diag(i);
    const Real ad = std::abs(d);
    if (ad == Real(0)) return {-kInf, 0.0L};
    log_re.add(std::log(static_cast<long double>(ad)));
    log_im.add(static_cast<long double>(std::arg(d)));
  }
  if (lu.permutationP().determinant() < 0) log_im.add(kPi);
  return {log_re.value_l(), log_im.value_l()};
}

using MatrixXcl =
    Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace ptasep
