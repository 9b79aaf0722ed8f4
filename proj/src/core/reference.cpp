#include "core/reference.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_airy.h>

#include <Eigen/Dense>
#include <cmath>

#include "core/special.hpp"

namespace ptasep {
namespace {

// Airy function values; GSL's error handler is disabled so harmless
// underflow far in the right tail returns 0 instead of aborting.
double airy(double x) {
  static const int once = [] {
    gsl_set_error_handler_off();
    return 0;
  }();
  (void)once;
  gsl_sf_result r;
  if (gsl_sf_airy_Ai_e(x, GSL_MODE_DEFAULT, &r) != GSL_SUCCESS) return 0.0;
  return r.val;
}

double airy_deriv(double x) {
  gsl_sf_result r;
  if (gsl_sf_airy_Ai_deriv_e(x, GSL_MODE_DEFAULT, &r) != GSL_SUCCESS) {
    return 0.0;
  }
  return r.val;
}

// det(I - K) on L^2(s, inf) by Nystrom quadrature: Gauss-Legendre points
// u in (0,1) mapped through t = s + 4u/(1-u), symmetrized with the square
// roots of the mapped weights.
template <typename Kernel>
double airy_fredholm_det(double s, const Kernel& kernel) {
  constexpr int kOrder = 64;
  const GaussLegendre& gl = gauss_legendre(kOrder);
  double t[kOrder], sw[kOrder];
  for (int i = 0; i < kOrder; ++i) {
    const double u = 0.5 * (static_cast<double>(gl.nodes[i]) + 1.0);
    const double om = 1.0 - u;
    t[i] = s + 4.0 * u / om;
    const double jac = 4.0 / (om * om);
    sw[i] = std::sqrt(0.5 * static_cast<double>(gl.weights[i]) * jac);
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(kOrder, kOrder);
  for (int i = 0; i < kOrder; ++i) {
    for (int j = 0; j < kOrder; ++j) {
      m(i, j) -= sw[i] * sw[j] * kernel(t[i], t[j]);
    }
  }
  return m.determinant();
}

double gue_kernel(double x, double y) {
  if (std::abs(x - y) < 1e-7) {
    const double mid = 0.5 * (x + y);
    const double a = airy(mid), ap = airy_deriv(mid);
    return ap * ap - mid * a * a;
  }
  return (airy(x) * airy_deriv(y) - airy_deriv(x) * airy(y)) / (x - y);
}

double goe_kernel(double x, double y) { return 0.5 * airy(0.5 * (x + y)); }

}  // namespace

double reference_kernel_diag_gue(double t) { return gue_kernel(t, t); }

double reference_kernel_diag_goe(double t) { return goe_kernel(t, t); }

double reference_cdf(ReferenceFamily family, double x) {
  switch (family) {
    case ReferenceFamily::kGaussian:
      return 0.5 * std::erfc(-x / std::sqrt(2.0));
    case ReferenceFamily::kGoeTracyWidom:
      return airy_fredholm_det(x, goe_kernel);
    case ReferenceFamily::kGueTracyWidom:
      return airy_fredholm_det(x, gue_kernel);
  }
  throw InvalidArgument("unknown reference family");
}

}  // namespace ptasep
