#include "core/limit.hpp"

#include <atomic>
#include <cmath>
#include <mutex>

#include "core/linalg.hpp"
#include "core/special.hpp"

namespace ptasep {
namespace {

constexpr long double kSqrt2PiL = 2.506628274631000502415765284811045253L;

// The cubic growth of Re(Psi) at the central node is the only way kernel
// entries can leave the representable range; refuse rather than overflow.
constexpr long double kExpGuard = 5000.0L;

// Nodes and exponent pieces shared between a truncation level m and its
// m+4 stability partner: arrays are centered, index k+mc for branch k.
struct KernelContext {
  std::vector<lcplx> xi;
  std::vector<lcplx> psi;
};

KernelContext build_context(lcplx z, int mc) {
  KernelContext ctx;
  ctx.xi = limit_nodes(z, mc);
  ctx.psi.reserve(ctx.xi.size());
  for (const lcplx& x : ctx.xi) ctx.psi.push_back(psi_series(x));
  return ctx;
}

// Full exponent at node index i for given weight on the psi term
// (1 for the flat kernel, 2 for the step kernel).
lcplx exponent_at(const KernelContext& ctx, size_t i, double x, double tau,
                  int psi_weight) {
  const lcplx xi = ctx.xi[i];
  return -static_cast<long double>(tau) / 3.0L * xi * xi * xi +
         static_cast<long double>(x) * xi +
         static_cast<long double>(psi_weight) * ctx.psi[i];
}

lcplx flat_det_from(const KernelContext& ctx, int mc, int m, double x,
                    double tau) {
  const int n = 2 * m + 1;
  const int off = mc - m;
  std::vector<lcplx> ew(n);
  long double max_re = -1e30L;
  for (int i = 0; i < n; ++i) {
    const lcplx e = exponent_at(ctx, off + i, x, tau, 1);
    max_re = std::max(max_re, e.real());
    ew[i] = std::exp(e);
  }
  if (2.0L * max_re > kExpGuard) {
    throw TruncationOverflow(
        "flat limit kernel scale exceeds the working exp range");
  }
  MatrixXcl a = MatrixXcl::Identity(n, n);
  for (int i = 0; i < n; ++i) {
    const lcplx xi1 = ctx.xi[off + i];
    for (int j = 0; j < n; ++j) {
      a(i, j) -= ew[i] * ew[j] / (xi1 * (xi1 + ctx.xi[off + j]));
    }
  }
  return a.determinant();
}

lcplx step_det_from(const KernelContext& ctx, int mc, int m, double x,
                    double tau, double gamma) {
  const int n = 2 * m + 1;
  const int off = mc - m;
  // K = P Q with P(i,h) = a_i b_h / (xi_i + xi_h), Q(h,j) = 1/(xi_h+xi_j):
  //   a_i = e^{Phi_i + gamma xi_i^2/2} / xi_i,
  //   b_h = e^{Phi_h - gamma xi_h^2/2} / xi_h.
  // On the node set Re(xi^2) = -2 log|z| for every branch, so the gamma
  // factor has constant modulus |z|^{-gamma} and never drives the scale.
  std::vector<lcplx> av(n), bv(n);
  long double max_re = -1e30L;
  for (int i = 0; i < n; ++i) {
    const lcplx xi = ctx.xi[off + i];
    const lcplx phi = exponent_at(ctx, off + i, x, tau, 2);
    const lcplx g = static_cast<long double>(gamma) * 0.5L * xi * xi;
    max_re = std::max(max_re, phi.real() + std::abs(g.real()));
    av[i] = std::exp(phi + g) / xi;
    bv[i] = std::exp(phi - g) / xi;
  }
  if (2.0L * max_re > kExpGuard) {
    throw TruncationOverflow(
        "step limit kernel scale exceeds the working exp range");
  }
  MatrixXcl p(n, n), q(n, n);
  for (int i = 0; i < n; ++i) {
    const lcplx xi1 = ctx.xi[off + i];
    for (int h = 0; h < n; ++h) {
      const lcplx sum = xi1 + ctx.xi[off + h];
      p(i, h) = av[i] * bv[h] / sum;
      q(i, h) = lcplx(1.0L) / sum;  // symmetric in its two node arguments
    }
  }
  MatrixXcl a = MatrixXcl::Identity(n, n) - p * q;
  return a.determinant();
}

// Runs the truncation adaptation at one contour point; returns the
// accepted determinant and the half-count it used.
template <typename DetFn>
std::pair<lcplx, int> adapt_truncation(const DetFn& det_from, lcplx z,
                                       const LimitOptions& opt) {
  int m = opt.node_start;
  for (;;) {
    const KernelContext ctx = build_context(z, m + 4);
    const lcplx coarse = det_from(ctx, m + 4, m);
    const lcplx fine = det_from(ctx, m + 4, m + 4);
    if (static_cast<double>(std::abs(fine - coarse)) < opt.node_tol) {
      return {fine, m + 4};
    }
    if (2 * m > opt.node_cap) {
      throw TruncationUnstable(
          "determinant keeps moving under node doubling at the cap");
    }
    m *= 2;
  }
}

template <typename DetFn>
LimitPoint run_limit(const DetFn& det_from, bool step_prefactor,
                     double x, double tau, const LimitOptions& opt) {
  opt.validate();
  if (!(tau > 0.0)) throw InvalidArgument("tau must be positive");
  std::atomic<int> m_used{0};
  NodeFn fn = [&](lcplx z) -> NodeEval {
    const auto [det, m_here] = adapt_truncation(det_from, z, opt);
    int seen = m_used.load();
    while (m_here > seen && !m_used.compare_exchange_weak(seen, m_here)) {
    }
    const LimitConstants c = limit_constants(z);
    const lcplx log_pref =
        static_cast<long double>(x) * c.a1 +
        static_cast<long double>(tau) * c.a2 +
        (step_prefactor ? 2.0L * c.b : c.a3 + c.b);
    NodeEval e;
    e.values = {std::exp(log_pref) * det};
    return e;
  };
  const ProbResult r = contour_average(fn, 1, opt.quad)[0];
  LimitPoint out;
  out.value = r.value;
  out.imag_residue = r.imag_residue;
  out.quad_delta = r.quad_delta;
  out.m_used = m_used.load();
  out.nodes_used = r.nodes_used;
  return out;
}

}  // namespace

void LimitOptions::validate() const {
  quad.validate();
  if (quad.radius > 0.9) {
    throw InvalidArgument(
        "limit contour radius must be <= 0.9 (prefactor series envelope)");
  }
  if (node_start < 1) throw InvalidArgument("node_start must be >= 1");
  if (node_cap < node_start) {
    throw InvalidArgument("node_cap must be >= node_start");
  }
  if (!(node_tol > 0.0)) throw InvalidArgument("node_tol must be positive");
}

std::vector<lcplx> limit_nodes(lcplx z, int m) {
  const long double az = std::abs(z);
  if (!(az > 0.0L) || !(az < 1.0L)) {
    throw DegenerateZ("node equation requires 0 < |z| < 1");
  }
  if (m < 0) throw InvalidArgument("node half-count must be >= 0");
  const lcplx mlog = -2.0L * std::log(z);  // Re > 0 since |z| < 1
  std::vector<lcplx> xs;
  xs.reserve(2 * m + 1);
  for (int k = -m; k <= m; ++k) {
    const lcplx radicand = mlog - lcplx(0.0L, 4.0L * kPiL * k);
    xs.push_back(-std::sqrt(radicand));
  }
  return xs;
}

lcplx psi_series(lcplx xi) {
  KahanCSum sum;
  for (int j = 1; j <= 10000; ++j) {
    const long double rj = std::sqrt(0.5L * j);
    const lcplx term = cerfc(-xi * rj) / static_cast<long double>(j);
    sum.add(term);
    if (std::abs(term) < 1e-14L) return -0.5L * sum.value_l();
  }
  throw SeriesStall("kernel exponent series did not reach tolerance");
}

LimitConstants limit_constants(lcplx z) {
  LimitConstants c;
  c.a1 = -polylog(3, z) / kSqrt2PiL;
  c.a2 = -polylog(5, z) / kSqrt2PiL;
  c.a3 = -0.25L * std::log(lcplx(1.0L) - z);  // Re(1-z) > 0 inside the disk
  c.b = b_series(z);
  return c;
}

lcplx b_series(lcplx z) {
  if (std::abs(z) > 0.95L) {
    throw InvalidArgument("b_series requires |z| <= 0.95");
  }
  static std::mutex mu;
  static std::vector<long double> coeff;  // coeff[n] = c_n, c_0 = c_1 = 0
  auto coeff_at = [&](int n) -> long double {
    std::lock_guard<std::mutex> lock(mu);
    while (static_cast<int>(coeff.size()) <= n) {
      const int nn = static_cast<int>(coeff.size());
      if (nn < 2) {
        coeff.push_back(0.0L);
        continue;
      }
      KahanSum s;
      for (int k = 1; k < nn; ++k) {
        s.add(1.0L / std::sqrt(static_cast<long double>(k) * (nn - k)));
      }
      coeff.push_back(s.value() / (4.0L * kPiL * nn));
    }
    return coeff[n];
  };
  KahanCSum sum;
  lcplx zn = z;  // z^n tracker
  for (int n = 2; n <= 10000; ++n) {
    zn *= z;
    const lcplx term = coeff_at(n) * zn;
    sum.add(term);
    if (std::abs(term) < 1e-14L) return sum.value_l();
  }
  throw SeriesStall("prefactor coefficient series did not reach tolerance");
}

lcplx flat_limit_det(lcplx z, double x, double tau, int m) {
  return flat_det_from(build_context(z, m), m, m, x, tau);
}

lcplx step_limit_det(lcplx z, double x, double tau, double gamma, int m) {
  return step_det_from(build_context(z, m), m, m, x, tau, gamma);
}

LimitPoint limit_cdf_flat(double x, double tau, const LimitOptions& opt) {
  auto det = [&](const KernelContext& ctx, int mc, int m) {
    return flat_det_from(ctx, mc, m, x, tau);
  };
  return run_limit(det, /*step_prefactor=*/false, x, tau, opt);
}

LimitPoint limit_cdf_step(double x, double tau, double gamma,
                          const LimitOptions& opt) {
  auto det = [&](const KernelContext& ctx, int mc, int m) {
    return step_det_from(ctx, mc, m, x, tau, gamma);
  };
  return run_limit(det, /*step_prefactor=*/true, x, tau, opt);
}

}  // namespace ptasep
