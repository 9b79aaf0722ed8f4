#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "core/limit.hpp"
#include "core/special.hpp"

using namespace ptasep;

namespace {

constexpr long double kPi2L = 6.283185307179586476925286766559005768L;

double cabs(lcplx v) { return static_cast<double>(std::abs(v)); }

// Direct path quadrature of the defining integral
//   -(1/sqrt(2 pi)) int_{-inf}^{xi} Li_{1/2}(e^{-w^2/2}) dw
// along the real axis to Re(xi), then vertically to xi.  Both legs stay in
// the sector arg(w) in (3pi/4, 5pi/4) because |Im xi| < |Re xi|.
lcplx psi_path_quadrature(lcplx xi) {
  const long double a = xi.real(), b = xi.imag();
  auto horiz = [&](long double u) {
    return polylog(1, std::exp(lcplx(-u * u * 0.5L, 0.0L)));
  };
  auto vert = [&](long double y) -> lcplx {
    const lcplx w(a, y);
    return polylog(1, std::exp(-w * w * 0.5L)) * lcplx(0.0L, 1.0L);
  };
  const lcplx leg1 = gl_integrate(horiz, -9.5L, a, 11, 48);
  const lcplx leg2 =
      b >= 0.0L ? gl_integrate(vert, 0.0L, b, 6, 48)
                : -gl_integrate(vert, b, 0.0L, 6, 48);
  const long double sqrt_2pi = 2.506628274631000502415765284811045253L;
  return -(leg1 + leg2) / sqrt_2pi;
}

// Independent line-integral representation of the same quantity:
//   int_{Re w = 0} log(1 - z e^{w^2/2}) / (w - xi) dw / (2 pi i),
// parametrised by w = i y.
lcplx psi_line_quadrature(lcplx xi, lcplx z) {
  auto fn = [&](long double y) -> lcplx {
    const lcplx num = std::log(lcplx(1.0L) - z * std::exp(-y * y * 0.5L));
    return num / (lcplx(0.0L, y) - xi);
  };
  return gl_integrate(fn, -9.5L, 9.5L, 12, 48) / kPi2L;
}

// Quadrature restatement of the first prefactor constant:
//   A1(z) = -(z / 2 pi) int_R y^2 / (e^{y^2/2} - z) dy.
lcplx a1_quadrature(lcplx z) {
  auto fn = [&](long double y) -> lcplx {
    return y * y / (std::exp(lcplx(y * y * 0.5L, 0.0L)) - z);
  };
  return -z / kPi2L * gl_integrate(fn, -9.5L, 9.5L, 12, 48);
}

// Quadrature of B(z) = (1/4 pi) int_0^z Li_{1/2}(y)^2 / y dy along the ray
// y = s z: (1/4 pi) int_0^1 Li_{1/2}(s z)^2 / s ds.
lcplx b_quadrature(lcplx z) {
  auto fn = [&](long double s) -> lcplx {
    if (s == 0.0L) return lcplx(0.0L);
    const lcplx li = polylog(1, s * z);
    return li * li / s;
  };
  return gl_integrate(fn, 0.0L, 1.0L, 8, 48) / (2.0L * kPi2L);
}

}  // namespace

TEST_CASE("node set solves the equation inside the required sector") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> rad(0.3, 0.7);
  std::uniform_real_distribution<double> ang(-3.1, 3.1);
  for (int trial = 0; trial < 6; ++trial) {
    const lcplx z = std::polar(static_cast<long double>(rad(rng)),
                               static_cast<long double>(ang(rng)));
    const auto xs = limit_nodes(z, 9);
    REQUIRE(xs.size() == 19);
    for (const lcplx& xi : xs) {
      CHECK(cabs(std::exp(-xi * xi * 0.5L) - z) <= 1e-12);
      const double arg = std::atan2(static_cast<double>(xi.imag()),
                                    static_cast<double>(xi.real()));
      const double mag = std::abs(arg);  // sector is symmetric about pi
      CHECK(mag > 3.0 * 3.14159265358979 / 4.0 - 1e-12);
    }
  }
}

TEST_CASE("node set closed forms and conjugation for real z") {
  const lcplx z(0.5L, 0.0L);
  const auto xs = limit_nodes(z, 3);
  const lcplx xi0 = xs[3];  // branch k = 0
  CHECK(std::abs(static_cast<double>(xi0.imag())) <= 1e-18);
  CHECK(std::abs(static_cast<double>(
            xi0.real() + std::sqrt(2.0L * std::log(2.0L)))) <= 1e-18);
  for (int k = 1; k <= 3; ++k) {
    CHECK(cabs(xs[3 + k] - std::conj(xs[3 - k])) <= 1e-17);
  }
}

TEST_CASE("kernel exponent series matches two independent integrals") {
  // Small-z limit: the series value is O(z) at the central node.
  {
    const lcplx z(1e-3L, 0.0L);
    const lcplx xi0 = limit_nodes(z, 0)[0];
    CHECK(cabs(psi_series(xi0)) <= 1e-3);
  }

  // Fixed spot check plus randomized (z, node) pairs: the series, the
  // direct path integral and the line-integral representation must agree.
  std::mt19937_64 rng(20260815);
  std::uniform_real_distribution<double> rad(0.3, 0.7);
  std::uniform_real_distribution<double> ang(-2.8, 2.8);
  std::uniform_int_distribution<int> branch(-2, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const lcplx z = trial == 0
                        ? lcplx(0.5L, 0.0L)
                        : std::polar(static_cast<long double>(rad(rng)),
                                     static_cast<long double>(ang(rng)));
    const int k = trial == 0 ? 0 : branch(rng);
    const lcplx xi = limit_nodes(z, std::abs(k))[std::abs(k) + k];
    const lcplx s = psi_series(xi);
    CHECK(cabs(s - psi_path_quadrature(xi)) <= 1e-10);
    CHECK(cabs(s - psi_line_quadrature(xi, z)) <= 1e-10);
  }
}

TEST_CASE("prefactor constants: closed forms and quadrature identities") {
  const LimitConstants zero = limit_constants(lcplx(0.0L));
  CHECK(cabs(zero.a1) == 0.0);
  CHECK(cabs(zero.a2) == 0.0);
  CHECK(cabs(zero.a3) == 0.0);
  CHECK(cabs(zero.b) == 0.0);

  const LimitConstants half = limit_constants(lcplx(0.5L));
  CHECK(std::abs(static_cast<double>(half.a3.real()) -
                 std::log(2.0) / 4.0) <= 1e-15);
  CHECK(std::abs(static_cast<double>(half.a3.imag())) <= 1e-18);

  for (lcplx z : {lcplx(0.5L, 0.0L), lcplx(-0.2L, 0.45L)}) {
    const LimitConstants c = limit_constants(z);
    CHECK(cabs(c.a1 - a1_quadrature(z)) <= 1e-10);
    CHECK(cabs(c.b - b_quadrature(z)) <= 1e-10);
  }
}

TEST_CASE("prefactor coefficient series starts at the known coefficient") {
  // B(z)/z^2 -> c_2 = 1/(8 pi) as z -> 0.
  const lcplx z(1e-4L, 0.0L);
  const lcplx lead = b_series(z) / (z * z);
  CHECK(cabs(lead - lcplx(1.0L / (8.0L * kPiL))) <= 1e-5);
  CHECK_THROWS_AS(b_series(lcplx(0.97L, 0.0L)), InvalidArgument);
}

TEST_CASE("flat kernel determinant is stable under node-count growth") {
  const lcplx z(0.5L, 0.0L);
  const lcplx d12 = flat_limit_det(z, 0.0, 1.0, 12);
  const lcplx d16 = flat_limit_det(z, 0.0, 1.0, 16);
  const lcplx d32 = flat_limit_det(z, 0.0, 1.0, 32);
  CHECK(cabs(d16 - d12) <= 1e-10);
  CHECK(cabs(d32 - d16) <= 1e-10);
  CHECK(std::abs(static_cast<double>(d16.imag())) <= 1e-12);  // real z
}

TEST_CASE("step kernel determinant: gamma shifts and node-count growth") {
  const lcplx z = std::polar(0.5L, 0.9L);
  const lcplx base = step_limit_det(z, 0.3, 0.8, 0.2, 12);
  // gamma -> gamma + 1 multiplies each summand by e^{(xi^2-eta^2)/2} = 1
  // on the node set, so the determinant is unchanged to rounding.
  CHECK(cabs(step_limit_det(z, 0.3, 0.8, 1.2, 12) - base) <= 1e-12);
  CHECK(cabs(step_limit_det(z, 0.3, 0.8, 0.2, 16) - base) <= 1e-10);
}

TEST_CASE("crossover distributions: realness, radius and truncation") {
  LimitOptions opt;
  const LimitPoint f1 = limit_cdf_flat(0.0, 1.0, opt);
  CHECK(f1.imag_residue <= 1e-8);
  CHECK(f1.quad_delta <= 1e-9);
  CHECK(f1.value > 0.0);
  CHECK(f1.value < 1.0);

  LimitOptions r4 = opt, r6 = opt;
  r4.quad.radius = 0.4;
  r6.quad.radius = 0.6;
  CHECK(std::abs(limit_cdf_flat(0.0, 1.0, r4).value -
                 limit_cdf_flat(0.0, 1.0, r6).value) <= 1e-8);
  const double s4 = limit_cdf_step(0.0, 1.0, 0.2, r4).value;
  const double s6 = limit_cdf_step(0.0, 1.0, 0.2, r6).value;
  CHECK(std::abs(s4 - s6) <= 1e-8);

  // Doubling the accepted truncation must not move the value.
  LimitOptions deep = opt;
  deep.node_start = 24;
  CHECK(std::abs(limit_cdf_flat(0.0, 1.0, deep).value - f1.value) <= 1e-9);
  CHECK(std::abs(limit_cdf_step(0.5, 1.0, 0.2, deep).value -
                 limit_cdf_step(0.5, 1.0, 0.2, opt).value) <= 1e-9);
  CHECK(f1.m_used >= opt.node_start + 4);
  CHECK(f1.nodes_used >= opt.quad.nodes);
}

TEST_CASE("step crossover law is periodic and even in gamma") {
  for (double x : {-1.0, 0.5}) {
    const double base = limit_cdf_step(x, 1.0, 0.2, {}).value;
    CHECK(std::abs(limit_cdf_step(x, 1.0, 1.2, {}).value - base) <= 1e-8);
    CHECK(std::abs(limit_cdf_step(x, 1.0, -0.2, {}).value - base) <= 1e-8);
  }
}

TEST_CASE("crossover distributions look like distribution functions") {
  double prev1 = -1e-6, prev2 = -1e-6;
  for (double x = -3.0; x <= 3.01; x += 0.75) {
    const double v1 = limit_cdf_flat(x, 1.0).value;
    const double v2 = limit_cdf_step(x, 1.0, 0.2).value;
    CHECK(v1 >= -1e-6);
    CHECK(v1 <= 1.0 + 1e-6);
    CHECK(v2 >= -1e-6);
    CHECK(v2 <= 1.0 + 1e-6);
    CHECK(v1 >= prev1 - 1e-8);
    CHECK(v2 >= prev2 - 1e-8);
    prev1 = v1;
    prev2 = v2;
  }
  CHECK(limit_cdf_flat(8.0, 1.0).value >= 0.999);
  CHECK(limit_cdf_step(8.0, 1.0, 0.2).value >= 0.999);
}

TEST_CASE("limit evaluation rejects bad arguments") {
  CHECK_THROWS_AS(limit_cdf_flat(0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(limit_cdf_flat(0.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(limit_cdf_step(0.0, 0.0, 0.2), InvalidArgument);
  LimitOptions wide;
  wide.quad.radius = 0.95;
  CHECK_THROWS_AS(limit_cdf_flat(0.0, 1.0, wide), InvalidArgument);
  LimitOptions bad;
  bad.node_cap = 4;
  CHECK_THROWS_AS(limit_cdf_flat(0.0, 1.0, bad), InvalidArgument);
  CHECK_THROWS_AS(limit_nodes(lcplx(1.2L, 0.0L), 4), DegenerateZ);
  CHECK_THROWS_AS(limit_nodes(lcplx(0.0L, 0.0L), 4), DegenerateZ);
}
