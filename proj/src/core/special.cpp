#include "core/special.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace ptasep {
namespace {

constexpr long double kSqrtPiL = 1.772453850905516027298167483341145183L;

// Legendre P_n(x) and its derivative by the three-term recurrence.
void legendre(int n, long double x, long double& p, long double& dp) {
  long double p0 = 1.0L, p1 = x;
  for (int j = 2; j <= n; ++j) {
    const long double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = n * (x * p1 - p0) / (x * x - 1.0L);
}

}  // namespace

const GaussLegendre& gauss_legendre(int n) {
  if (n < 2) throw InvalidArgument("Gauss-Legendre order must be >= 2");
  static std::mutex mu;
  static std::map<int, GaussLegendre> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussLegendre gl;
  gl.nodes.resize(n);
  gl.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // i-th root from the top; the Chebyshev angle is an excellent seed.
    long double x = std::cos(kPiL * (i + 0.75L) / (n + 0.5L));
    long double p = 0.0L, dp = 0.0L;
    for (int iter = 0; iter < 100; ++iter) {
      legendre(n, x, p, dp);
      const long double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-19L * std::max(1.0L, std::abs(x))) break;
    }
    legendre(n, x, p, dp);
    const long double w = 2.0L / ((1.0L - x * x) * dp * dp);
    gl.nodes[n - 1 - i] = x;
    gl.nodes[i] = -x;
    gl.weights[n - 1 - i] = w;
    gl.weights[i] = w;
  }
  return cache.emplace(n, std::move(gl)).first->second;
}

namespace {

// Maclaurin series of erf, safe from harmful cancellation while
// |Re zeta| <= 2.5: the alternating-series swell is e^{|zeta|^2} while the
// result scale is e^{Im^2 - Re^2}, so the relative error stays near
// e^{2 Re^2} * eps.
lcplx cerfc_series(lcplx zeta) {
  const lcplx mz2 = -zeta * zeta;
  lcplx term = zeta;  // zeta * (-zeta^2)^n / n!
  KahanCSum sum;
  sum.add(term);
  long double largest = std::abs(term);
  for (int n = 1; n < 100000; ++n) {
    term *= mz2 / static_cast<long double>(n);
    const lcplx contrib = term / static_cast<long double>(2 * n + 1);
    sum.add(contrib);
    largest = std::max(largest, std::abs(term));
    if (std::abs(contrib) < 1e-26L * std::max(1.0L, largest)) {
      return lcplx(1.0L) - sum.value_l() * (2.0L / kSqrtPiL);
    }
  }
  throw SeriesStall("erfc Maclaurin series did not converge");
}

// Modified-Lentz evaluation of the classical continued fraction
//   erfc(zeta) = e^{-zeta^2}/sqrt(pi) * 1/(zeta + (1/2)/(zeta + 1/(zeta +
//                (3/2)/(zeta + 2/(zeta + ...))))),
// convergent for Re zeta > 0 and fast once Re zeta is a few units.
lcplx cerfc_fraction(lcplx zeta) {
  const lcplx tiny(1e-200L, 0.0L);
  lcplx f = tiny, c = f, d = 0.0L;
  for (int n = 1; n < 10000; ++n) {
    const long double a = n == 1 ? 1.0L : (n - 1) * 0.5L;
    d = zeta + a * d;
    if (std::abs(d) == 0.0L) d = tiny;
    d = lcplx(1.0L) / d;
    c = zeta + a / c;
    if (std::abs(c) == 0.0L) c = tiny;
    const lcplx delta = c * d;
    f *= delta;
    if (std::abs(delta - lcplx(1.0L)) < 1e-21L) {
      return std::exp(-zeta * zeta) * f / kSqrtPiL;
    }
  }
  throw SeriesStall("erfc continued fraction did not converge");
}

}  // namespace

lcplx cerfc(lcplx zeta) {
  if (zeta.real() < 0.0L) return lcplx(2.0L) - cerfc(-zeta);
  if (zeta.real() <= 2.5L) return cerfc_series(zeta);
  return cerfc_fraction(zeta);
}

namespace {

void check_off_cut(lcplx w) {
  if (w.imag() == 0.0L && w.real() >= 1.0L) {
    throw BranchCut("polylogarithm argument lies on the ray [1, inf)");
  }
}

long double inv_k_pow(int twice_s, int k) {
  const long double r = std::sqrt(static_cast<long double>(k));
  switch (twice_s) {
    case 1:
      return 1.0L / r;
    case 3:
      return 1.0L / (k * r);
    case 5:
      return 1.0L / (static_cast<long double>(k) * k * r);
    default:
      throw InvalidArgument("polylog order must be 1/2, 3/2 or 5/2");
  }
}

}  // namespace

lcplx polylog_series(int twice_s, lcplx w) {
  inv_k_pow(twice_s, 1);  // validate the order
  check_off_cut(w);
  if (std::abs(w) >= 1.0L) {
    throw InvalidArgument("polylog series requires |w| < 1");
  }
  KahanCSum sum;
  lcplx wk(1.0L, 0.0L);
  for (int k = 1; k < 100000; ++k) {
    wk *= w;
    const lcplx term = wk * inv_k_pow(twice_s, k);
    sum.add(term);
    if (std::abs(term) < 1e-25L * (1.0L + std::abs(sum.value_l()))) {
      return sum.value_l();
    }
  }
  throw SeriesStall("polylog series did not converge");
}

lcplx polylog_integral(int twice_s, lcplx w) {
  check_off_cut(w);
  long double gamma_s = 0.0L;  // Gamma(s) for s = twice_s / 2
  switch (twice_s) {
    case 1:
      gamma_s = kSqrtPiL;
      break;
    case 3:
      gamma_s = kSqrtPiL * 0.5L;
      break;
    case 5:
      gamma_s = kSqrtPiL * 0.75L;
      break;
    default:
      throw InvalidArgument("polylog order must be 1/2, 3/2 or 5/2");
  }
  // Li_s(w) = w/Gamma(s) * int_0^inf x^{s-1}/(e^x - w) dx with x = u^2:
  //         = 2w/Gamma(s) * int_0^inf u^{2s-1}/(e^{u^2} - w) du.
  // The integrand decays like e^{-u^2}; beyond u = 7.2 the tail is < 1e-19.
  auto fn = [&](long double u) -> lcplx {
    long double num = 1.0L;
    if (twice_s == 3) num = u * u;
    if (twice_s == 5) num = u * u * u * u;
    return num / (std::exp(u * u) - w);
  };
  const lcplx integral = gl_integrate(fn, 0.0L, 7.2L, 9, 48);
  return 2.0L * w / gamma_s * integral;
}

lcplx polylog(int twice_s, lcplx w) {
  check_off_cut(w);
  if (std::abs(w) <= 0.8L) return polylog_series(twice_s, w);
  return polylog_integral(twice_s, w);
}

}  // namespace ptasep
