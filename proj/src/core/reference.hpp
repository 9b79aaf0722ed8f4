// Classical reference distribution functions emitted alongside the
// crossover laws for plot comparisons: the standard Gaussian CDF and the
// GOE/GUE Tracy-Widom CDFs.  The Tracy-Widom values are Fredholm
// determinants of Airy-type kernels on (s, inf), evaluated by a Nystrom
// discretization on a rational map of a Gauss-Legendre rule; accuracy is
// far beyond plotting needs (~1e-10).
#pragma once

namespace ptasep {

enum class ReferenceFamily { kGaussian, kGoeTracyWidom, kGueTracyWidom };

double reference_cdf(ReferenceFamily family, double x);

// Diagonals of the underlying integral kernels, exposed so the right-tail
// behaviour of the determinants (1 - trace + higher order) can be
// cross-checked against direct quadrature.
double reference_kernel_diag_gue(double t);
double reference_kernel_diag_goe(double t);

}  // namespace ptasep
