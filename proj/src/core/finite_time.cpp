#include "core/finite_time.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <type_traits>
#include <utility>

#include <Eigen/Dense>

#include "core/bethe.hpp"
#include "core/errors.hpp"
#include "core/linalg.hpp"
#include "core/numeric.hpp"
#include "core/oracle.hpp"

namespace ptasep {

namespace {

// Direct determinant routes form L x L-ish sums without balancing, so keep
// them to rings where double/long-double headroom is ample.
constexpr int64_t kDirectMaxL = 20;

// Kernel dimension up to which the condensed routes run their determinants
// in extended precision.  The contour average cancels far below the node
// magnitude, so the absolute noise floor is (node magnitude) * epsilon of
// the working type; small rings need the extra mantissa to hit absolute
// 1e-10 targets, while large windowed kernels are only ever asked for
// sup-norm-level accuracy and keep the cheaper scalar.
constexpr int kExtendedDimCap = 96;

inline lcplx lc(cplx w) { return {w.real(), w.imag()}; }
inline cplx dc(lcplx w) {
  return {static_cast<double>(w.real()), static_cast<double>(w.imag())};
}

template <typename Real>
std::complex<Real> cast_c(lcplx w) {
  return {static_cast<Real>(w.real()), static_cast<Real>(w.imag())};
}

// exp of a log-domain value accumulated in long double.  The integrand of a
// probability is O(1); a real part beyond extended range means the
// evaluation lost its dominant balance and the result would be garbage.
lcplx exp_from_log(lcplx e) {
  if (e.real() > 11000.0L) {
    throw TruncationOverflow(
        "contour integrand exceeds extended floating range; evaluation is "
        "outside the supported regime");
  }
  return std::exp(e);
}

// The double-precision Bethe root set refined by two extended-precision
// Newton steps on q(w) = zhat, with principal logs of w and 1+w recomputed
// from the refined values.  Per-node errors enter the contour average
// multiplied by the integrand amplitude, so root accuracy at the working
// epsilon -- not merely at double epsilon -- is what sets the reachable
// absolute accuracy of the average.  Families keep the solver's order:
// left (Re w < -rho) then right.
struct PolishedRoots {
  std::vector<lcplx> uw, ulw, ulw1;  // left family
  std::vector<lcplx> vw, vlw, vlw1;  // right family
};

PolishedRoots polish_roots(const BetheRoots& roots, lcplx zhat) {
  const SystemShape& s = roots.shape;
  const long double nn = static_cast<long double>(s.N);
  const long double nl = static_cast<long double>(s.L - s.N);
  const long double rho = static_cast<long double>(s.N) /
                          static_cast<long double>(s.L);
  const long double lrho = std::log(rho);
  const long double l1rho = std::log(1.0L - rho);
  const lcplx target = zhat;

  auto refine = [&](cplx w0) -> lcplx {
    lcplx w = lc(w0);
    for (int it = 0; it < 2; ++it) {
      // q(w) = (-w/rho)^N ((w+1)/(1-rho))^(L-N); integer exponents make the
      // log branches irrelevant under exp.
      const lcplx lq = nn * (std::log(-w) - lrho) +
                       nl * (std::log(1.0L + w) - l1rho);
      const lcplx q = std::exp(lq);
      const lcplx qp = q * (nn / w + nl / (1.0L + w));
      if (!(std::abs(qp) > 0.0L)) break;
      const lcplx step = (q - target) / qp;
      if (!(std::abs(step) < 1e-6L)) break;  // never leave the Newton basin
      w -= step;
    }
    return w;
  };

  PolishedRoots out;
  out.uw.reserve(roots.left.size());
  out.vw.reserve(roots.right.size());
  for (cplx w0 : roots.left) {
    const lcplx w = refine(w0);
    out.uw.push_back(w);
    out.ulw.push_back(std::log(w));
    out.ulw1.push_back(std::log(1.0L + w));
  }
  for (cplx w0 : roots.right) {
    const lcplx w = refine(w0);
    out.vw.push_back(w);
    out.vlw.push_back(std::log(w));
    out.vlw1.push_back(std::log(1.0L + w));
  }
  return out;
}

// (1/L) sum over all roots of w^p (w+1)^q e^{tw} / (w+rho).  Accumulated in
// long double: the terms can dwarf the sum, and the extra mantissa keeps
// the cancellation error at the extended epsilon.
lcplx root_power_sum(const PolishedRoots& pr, long double rho, int64_t L,
                     int64_t p, int64_t q, double t) {
  const long double lp = static_cast<long double>(p);
  const long double lq = static_cast<long double>(q);
  const long double lt = t;
  lcplx acc{0.0L, 0.0L};
  for (size_t i = 0; i < pr.uw.size(); ++i) {
    acc += std::exp(lp * pr.ulw[i] + lq * pr.ulw1[i] + lt * pr.uw[i]) /
           (pr.uw[i] + rho);
  }
  for (size_t i = 0; i < pr.vw.size(); ++i) {
    acc += std::exp(lp * pr.vlw[i] + lq * pr.vlw1[i] + lt * pr.vw[i]) /
           (pr.vw[i] + rho);
  }
  return acc / static_cast<long double>(L);
}

void require_time(double t, const char* what) {
  if (!(t >= 0.0)) throw NegativeTime(std::string(what) + " requires t >= 0");
}

void require_k(int64_t k, int64_t N) {
  if (k < 1 || k > N) {
    throw InvalidArgument("tagged-particle index k must lie in [1, N]");
  }
}

// Shared per-node root products for the condensed (flat/step) routes.  One
// pass over all (u, v) pairs yields, for each left root u, the log of
// prod_v (v - u) (up to the (-1)^N twist applied by callers), for each right
// root v the log of q_left(v) = prod_u (v - u), and the total used by the
// prefactors.  Every factor v - u lies in the open right half plane because
// the families are separated by Re(w) = -rho, so the principal logs below
// are branch-safe; this is also what makes the half-integer powers of the
// flat constant single-valued along the whole contour.
struct PairProducts {
  std::vector<lcplx> lqr;  // left index u  -> sum_v Log(v - u)
  std::vector<lcplx> lql;  // right index v -> sum_u Log(v - u)
  lcplx total{0.0L, 0.0L};
};

PairProducts pair_products(const PolishedRoots& pr) {
  const size_t nu = pr.uw.size();
  const size_t nv = pr.vw.size();
  PairProducts pp;
  pp.lqr.assign(nu, lcplx{0.0L, 0.0L});
  pp.lql.assign(nv, lcplx{0.0L, 0.0L});
  for (size_t u = 0; u < nu; ++u) {
    lcplx row{0.0L, 0.0L};
    for (size_t v = 0; v < nv; ++v) {
      lcplx p = log_positive_re(pr.vw[v] - pr.uw[u],
                                "right/left root separation");
      row += p;
      pp.lql[v] += p;
    }
    pp.lqr[u] = row;
    pp.total += row;
  }
  return pp;
}

// log q'_right(v) for right root v, from the identity
// q'_right(v) = L v^(N-1) (v+1)^(L-N-1) (v+rho) / q_left(v).
lcplx log_qprime(const SystemShape& s, const PolishedRoots& pr,
                 const PairProducts& pp, size_t v) {
  const long double rho = static_cast<long double>(s.N) /
                          static_cast<long double>(s.L);
  return std::log(static_cast<long double>(s.L)) +
         static_cast<long double>(s.N - 1) * pr.vlw[v] +
         static_cast<long double>(s.L - s.N - 1) * pr.vlw1[v] +
         std::log(pr.vw[v] + rho) - pp.lql[v];
}

// Largest entry-log the chosen scalar can exponentiate with margin.
template <typename Real>
constexpr long double exp_range() {
  return std::is_same_v<Real, long double> ? 10900.0L : 650.0L;
}

// det(I + K) for the balanced flat kernel restricted to the kept rows.
// Entry (r, c) is sgn * exp(lfu[ur] - theta[ur] + theta[uc] - lfv[V(uc)])
// / (u_r - V(u_c)); with theta the pairwise mean of the row/column logs the
// entry scale is e^{sig_r + sig_c} <= e^{2 smax} (the caller guards that
// against the scalar's exp range).
template <typename Real>
lcplx flat_kernel_logdet(const std::vector<int>& keep,
                         const std::vector<lcplx>& lfu,
                         const std::vector<lcplx>& lfv,
                         const std::vector<long double>& theta,
                         const std::vector<int>& partner,
                         const PolishedRoots& pr, long double sgn) {
  const int n = static_cast<int>(keep.size());
  Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> K(n, n);
  for (int col = 0; col < n; ++col) {
    const size_t uc = static_cast<size_t>(keep[col]);
    const int pv = partner[uc];
    const lcplx den = lfv[pv] - theta[uc];
    const lcplx vpart = pr.vw[pv];
    for (int row = 0; row < n; ++row) {
      const size_t ur = static_cast<size_t>(keep[row]);
      const lcplx e = lfu[ur] - theta[ur] - den - std::log(pr.uw[ur] - vpart);
      K(row, col) = cast_c<Real>(sgn * std::exp(e));
    }
    K(col, col) += Real(1);
  }
  return scaled_logdet<Real>(std::move(K));
}

// det(I + A B) for the step kernel evaluated as the Schur-form block
// determinant det [[I, -A], [B, I]], which never materializes the product
// A B: entries carry only half of the u/v scale split each.
template <typename Real>
lcplx step_block_logdet(const std::vector<int>& keep_u,
                        const std::vector<int>& keep_v,
                        const std::vector<lcplx>& lfu,
                        const std::vector<lcplx>& lfv, long double mu,
                        const PolishedRoots& pr) {
  using Mat = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
  const int cu = static_cast<int>(keep_u.size());
  const int cv = static_cast<int>(keep_v.size());
  Mat M = Mat::Identity(cu + cv, cu + cv);
  for (int j = 0; j < cv; ++j) {
    const size_t v = static_cast<size_t>(keep_v[j]);
    const lcplx vr = pr.vw[v];
    for (int i = 0; i < cu; ++i) {
      const size_t u = static_cast<size_t>(keep_u[i]);
      const lcplx ldiff = std::log(pr.uw[u] - vr);
      M(i, cu + j) = -cast_c<Real>(std::exp(lfu[u] - mu - ldiff));
      M(cu + j, i) = cast_c<Real>(std::exp(mu - lfv[v] - ldiff));
    }
  }
  return scaled_logdet<Real>(std::move(M));
}

}  // namespace

ProbResult transition_probability(SystemShape shape,
                                  const std::vector<int64_t>& X,
                                  const std::vector<int64_t>& Y, double t,
                                  const QuadratureSpec& spec) {
  shape.validate();
  spec.validate();
  validate_configuration(shape, Y, "initial configuration");
  validate_configuration(shape, X, "target configuration");
  require_time(t, "transition_probability");
  if (shape.L > kDirectMaxL) {
    throw ScaleExceeded("transition_probability supports L <= 20");
  }
  const int64_t N = shape.N;
  const int64_t L = shape.L;
  NodeFn fn = [shape, &X, &Y, t, N, L](lcplx zhat) -> NodeEval {
    BetheRoots roots = solve_bethe_roots(shape, dc(zhat));
    PolishedRoots pr = polish_roots(roots, zhat);
    const long double rho = static_cast<long double>(N) / L;
    MatrixXcl M(N, N);
    for (int64_t i = 0; i < N; ++i) {
      for (int64_t j = 0; j < N; ++j) {
        M(i, j) =
            root_power_sum(pr, rho, L, j - i + 1, Y[j] - X[i] + i - j, t);
      }
    }
    lcplx ld = scaled_logdet<long double>(std::move(M));
    NodeEval out;
    out.values.push_back(std::isinf(ld.real()) ? lcplx{0.0L, 0.0L}
                                               : std::exp(ld));
    return out;
  };
  return contour_average(fn, 1, spec)[0];
}

ProbResult one_point_general(SystemShape shape, const std::vector<int64_t>& Y,
                             int64_t k, int64_t a, double t,
                             const QuadratureSpec& spec) {
  shape.validate();
  spec.validate();
  validate_configuration(shape, Y, "initial configuration");
  require_time(t, "one_point_general");
  require_k(k, shape.N);
  if (shape.L > kDirectMaxL) {
    throw ScaleExceeded("one_point_general supports L <= 20");
  }
  const int64_t N = shape.N;
  const int64_t L = shape.L;
  const long double rho = static_cast<long double>(N) / L;
  // z^L = (-1)^N r0^L zhat appears with integer exponent k-1: the (-1)^N
  // part reduces to an exact parity sign, the rest exponentiates the log.
  const long double log_r0 =
      rho * std::log(rho) + (1.0L - rho) * std::log(1.0L - rho);
  const long double sgn_zl = ((k - 1) * N) % 2 != 0 ? -1.0L : 1.0L;
  NodeFn fn = [shape, &Y, k, a, t, N, L, rho, log_r0,
               sgn_zl](lcplx zhat) -> NodeEval {
    BetheRoots roots = solve_bethe_roots(shape, dc(zhat));
    PolishedRoots pr = polish_roots(roots, zhat);
    MatrixXcl M(N, N);
    for (int64_t i = 0; i < N; ++i) {
      for (int64_t j = 0; j < N; ++j) {
        M(i, j) =
            root_power_sum(pr, rho, L, j - i + 1 - k, Y[j] - j - a + k, t);
      }
    }
    lcplx ld = scaled_logdet<long double>(std::move(M));
    NodeEval out;
    if (std::isinf(ld.real())) {
      out.values.push_back({0.0L, 0.0L});
      return out;
    }
    const lcplx log_zl =
        static_cast<long double>(L) * log_r0 + std::log(zhat);
    out.values.push_back(
        sgn_zl * std::exp(ld + static_cast<long double>(k - 1) * log_zl));
    return out;
  };
  ProbResult res = contour_average(fn, 1, spec)[0];
  if (((k - 1) * (N + 1)) % 2 != 0) res.value = -res.value;
  return res;
}

std::vector<ProbResult> one_point_flat(int64_t d, int64_t N, int64_t k,
                                       const std::vector<int64_t>& a_list,
                                       double t, const QuadratureSpec& spec,
                                       double sig_window) {
  if (d < 2) throw InvalidArgument("flat initial condition requires d >= 2");
  if (N < 1) throw InvalidArgument("flat initial condition requires N >= 1");
  SystemShape shape{d * N, N};
  shape.validate();
  spec.validate();
  require_time(t, "one_point_flat");
  require_k(k, N);
  if (a_list.empty()) throw InvalidArgument("threshold list must not be empty");
  if (!(sig_window > 0)) throw InvalidArgument("sig_window must be positive");

  const int64_t L = shape.L;
  const size_t nu = static_cast<size_t>(L - N);  // kernel index set: left roots
  const size_t nv = static_cast<size_t>(N);
  const long double lt = t;
  const long double window = sig_window;

  NodeFn fn = [=, &a_list](lcplx zhat) -> NodeEval {
    BetheRoots roots = solve_bethe_roots(shape, dc(zhat));
    FlatPairing pairing = flat_partner_map(roots, static_cast<int>(d));
    PolishedRoots pr = polish_roots(roots, zhat);
    PairProducts pp = pair_products(pr);
    const long double rho_l = static_cast<long double>(N) / L;

    // a-independent parts of log f_1 on both families.  q_right(u) =
    // (-1)^N prod_v (v - u); the (-1)^N enters each kernel entry once and
    // is applied below as an exact sign rather than an i*pi*N phase.
    std::vector<lcplx> lfu0(nu), lfv0(nv), lw1u(nu), lw1v(nv);
    const long double pw = static_cast<long double>(-N - k + 2);
    const long double qw = static_cast<long double>(k + d);
    for (size_t u = 0; u < nu; ++u) {
      lw1u[u] = pr.ulw1[u];
      lfu0[u] = pp.lqr[u] + pw * pr.ulw[u] + qw * lw1u[u] + lt * pr.uw[u] -
                std::log(pr.uw[u] + rho_l);
    }
    for (size_t v = 0; v < nv; ++v) {
      lw1v[v] = pr.vlw1[v];
      lfv0[v] = log_qprime(shape, pr, pp, v) + pw * pr.vlw[v] + qw * lw1v[v] +
                lt * pr.vw[v] - std::log(pr.vw[v] + rho_l);
    }

    // Prefactor log C(a) = C0 - a*C1.  The only fractional powers in the
    // whole integrand are here: (v+1)^(...-d/2) when d is odd, and the
    // square roots of d(v+rho) and (v-u).  All bases stay in the right half
    // plane, so the principal-log assembly below is the unique continuous
    // branch; phi hands the accumulated fractional phase to the driver's
    // adjacent-node monitor as a tripwire.
    lcplx C0{0.0L, 0.0L}, C1{0.0L, 0.0L};
    long double phi = -0.5L * pp.total.imag();
    const long double coef_v1 = static_cast<long double>(k * d + L - N + 1) -
                                0.5L * static_cast<long double>(d);
    for (size_t v = 0; v < nv; ++v) {
      lcplx lvr = log_positive_re(pr.vw[v] + rho_l, "v + rho");
      C0 += coef_v1 * lw1v[v] + lt * pr.vw[v] -
            0.5L * (std::log(static_cast<long double>(d)) + lvr);
      C1 += lw1v[v];
      phi -= 0.5L * lvr.imag();
      if (d % 2 != 0) phi -= 0.5L * lw1v[v].imag();
    }
    C0 -= 0.5L * pp.total;

    const long double sgn = N % 2 != 0 ? -1.0L : 1.0L;
    NodeEval out;
    out.values.resize(a_list.size());
    out.branch_phase = static_cast<double>(phi);

    std::vector<lcplx> lfu(nu), lfv(nv);
    std::vector<long double> sig(nu), theta(nu);
    std::vector<int> keep;
    keep.reserve(nu);
    for (size_t s = 0; s < a_list.size(); ++s) {
      const long double a = static_cast<long double>(a_list[s]);
      const lcplx logC = C0 - a * C1;
      for (size_t u = 0; u < nu; ++u) lfu[u] = lfu0[u] - a * lw1u[u];
      for (size_t v = 0; v < nv; ++v) lfv[v] = lfv0[v] - a * lw1v[v];

      // Significance and balancing weights.  sigma is the log of the kernel
      // row/column scale after conjugating by the geometric mean of |f_1(u)|
      // and |f_1(V(u))| (a similarity, so the determinant is unchanged);
      // rows more than sig_window e-folds below the top cannot move the
      // determinant at working precision and are dropped.  Balanced entries
      // scale like e^{sig_r + sig_c} <= e^{2 smax}, which the guard below
      // keeps inside the scalar's exp range.
      long double smax = -HUGE_VALL;
      for (size_t u = 0; u < nu; ++u) {
        sig[u] = 0.5L * (lfu[u].real() - lfv[pairing.partner[u]].real());
        smax = std::max(smax, sig[u]);
      }
      keep.clear();
      for (size_t u = 0; u < nu; ++u) {
        if (sig[u] >= smax - window) {
          keep.push_back(static_cast<int>(u));
          theta[u] = 0.5L * (lfu[u].real() + lfv[pairing.partner[u]].real());
        }
      }

      lcplx ld{0.0L, 0.0L};
      const int n = static_cast<int>(keep.size());
      if (n > 0) {
        const bool extended = n <= kExtendedDimCap;
        if (2.0L * smax > (extended ? exp_range<long double>()
                                    : exp_range<double>())) {
          throw TruncationOverflow(
              "flat kernel scale exceeds the working exp range; evaluation "
              "is outside the supported regime");
        }
        ld = extended
                 ? flat_kernel_logdet<long double>(keep, lfu, lfv, theta,
                                                   pairing.partner, pr, sgn)
                 : flat_kernel_logdet<double>(keep, lfu, lfv, theta,
                                              pairing.partner, pr, sgn);
      }
      out.values[s] = std::isinf(ld.real()) && ld.real() < 0
                          ? lcplx{0.0L, 0.0L}
                          : exp_from_log(logC + ld);
    }
    return out;
  };

  return contour_average(fn, a_list.size(), spec);
}

std::vector<ProbResult> one_point_step(SystemShape shape, int64_t k,
                                       const std::vector<int64_t>& a_list,
                                       double t, const QuadratureSpec& spec,
                                       double sig_window) {
  shape.validate();
  spec.validate();
  require_time(t, "one_point_step");
  require_k(k, shape.N);
  if (a_list.empty()) throw InvalidArgument("threshold list must not be empty");
  if (!(sig_window > 0)) throw InvalidArgument("sig_window must be positive");

  const int64_t L = shape.L;
  const int64_t N = shape.N;
  const size_t nu = static_cast<size_t>(L - N);
  const size_t nv = static_cast<size_t>(N);
  const long double lt = t;
  const long double window = sig_window;

  NodeFn fn = [=, &a_list](lcplx zhat) -> NodeEval {
    BetheRoots roots = solve_bethe_roots(shape, dc(zhat));
    PolishedRoots pr = polish_roots(roots, zhat);
    PairProducts pp = pair_products(pr);
    const long double rho_l = static_cast<long double>(N) / L;

    // a-independent parts of log f_2: q_right^2 on the left family and
    // q'_right^2 on the right one; the squares make (-1)^(2N) = 1, so no
    // i*pi*N twist survives.  Only integer powers appear anywhere in the
    // step integrand, hence no branch monitor is needed.
    std::vector<lcplx> lfu0(nu), lfv0(nv), lw1u(nu), lw1v(nv);
    const long double pw = static_cast<long double>(-N - k + 2);
    const long double qw = static_cast<long double>(-N + k + 1);
    for (size_t u = 0; u < nu; ++u) {
      lw1u[u] = pr.ulw1[u];
      lfu0[u] = 2.0L * pp.lqr[u] + pw * pr.ulw[u] + qw * lw1u[u] +
                lt * pr.uw[u] - std::log(pr.uw[u] + rho_l);
    }
    for (size_t v = 0; v < nv; ++v) {
      lw1v[v] = pr.vlw1[v];
      lfv0[v] = 2.0L * log_qprime(shape, pr, pp, v) + pw * pr.vlw[v] +
                qw * lw1v[v] + lt * pr.vw[v] - std::log(pr.vw[v] + rho_l);
    }

    // log C(a) = C0 - a*C1 with C0 = (k-1) sum_u Log(-u)
    //            + sum_v [(L-2N+k) Log(v+1) + t v] - sum_{u,v} Log(v-u).
    lcplx C0{0.0L, 0.0L}, C1{0.0L, 0.0L};
    for (size_t u = 0; u < nu; ++u) {
      C0 += static_cast<long double>(k - 1) * log_negate(pr.ulw[u]);
    }
    for (size_t v = 0; v < nv; ++v) {
      C0 += static_cast<long double>(L - 2 * N + k) * lw1v[v] +
            lt * pr.vw[v];
      C1 += lw1v[v];
    }
    C0 -= pp.total;

    NodeEval out;
    out.values.resize(a_list.size());

    std::vector<lcplx> lfu(nu), lfv(nv);
    std::vector<int> keep_u, keep_v;
    keep_u.reserve(nu);
    keep_v.reserve(nv);
    for (size_t s = 0; s < a_list.size(); ++s) {
      const long double a = static_cast<long double>(a_list[s]);
      const lcplx logC = C0 - a * C1;
      long double max_u = -HUGE_VALL, min_v = HUGE_VALL;
      for (size_t u = 0; u < nu; ++u) {
        lfu[u] = lfu0[u] - a * lw1u[u];
        max_u = std::max(max_u, lfu[u].real());
      }
      for (size_t v = 0; v < nv; ++v) {
        lfv[v] = lfv0[v] - a * lw1v[v];
        min_v = std::min(min_v, lfv[v].real());
      }
      // f_2(u) multiplies kernel rows and 1/f_2(v) the inner sum, so rows
      // far below the leading u-scale and v-nodes far above the smallest
      // v-scale are insignificant in the same sig_window sense as the flat
      // route (validated by the window-doubling tests).
      keep_u.clear();
      keep_v.clear();
      for (size_t u = 0; u < nu; ++u) {
        if (lfu[u].real() >= max_u - window) keep_u.push_back((int)u);
      }
      for (size_t v = 0; v < nv; ++v) {
        if (lfv[v].real() <= min_v + window) keep_v.push_back((int)v);
      }
      const long double mu = 0.5L * (max_u + min_v);

      const int cu = static_cast<int>(keep_u.size());
      const int cv = static_cast<int>(keep_v.size());
      lcplx ld{0.0L, 0.0L};
      if (cu > 0 && cv > 0) {
        const bool extended = cu + cv <= 2 * kExtendedDimCap;
        if (0.5L * (max_u - min_v) + window >
            (extended ? exp_range<long double>() : exp_range<double>())) {
          throw TruncationOverflow(
              "step kernel scale split exceeds the working exp range; "
              "evaluation is outside the supported regime");
        }
        ld = extended
                 ? step_block_logdet<long double>(keep_u, keep_v, lfu, lfv,
                                                  mu, pr)
                 : step_block_logdet<double>(keep_u, keep_v, lfu, lfv, mu,
                                             pr);
      }
      out.values[s] = std::isinf(ld.real()) && ld.real() < 0
                          ? lcplx{0.0L, 0.0L}
                          : exp_from_log(logC + ld);
    }
    return out;
  };

  return contour_average(fn, a_list.size(), spec);
}

FlatScaling flat_scaling(int64_t d, int64_t N, int64_t k, double tau,
                         double x) {
  if (d < 2) throw InvalidArgument("flat scaling requires d >= 2");
  if (N < 1) throw InvalidArgument("flat scaling requires N >= 1");
  SystemShape shape{d * N, N};
  shape.validate();
  require_k(k, N);
  if (!(tau > 0)) throw InvalidArgument("tau must be positive");
  const double rho = shape.rho();
  const double L = static_cast<double>(shape.L);
  FlatScaling out;
  out.tau = tau;
  out.t = tau * L * std::sqrt(L) / std::sqrt(rho * (1.0 - rho));
  const double width = std::pow(rho, -1.0 / 3.0) *
                       std::pow(1.0 - rho, 2.0 / 3.0) * std::cbrt(out.t);
  const double center =
      (1.0 - rho) * out.t + static_cast<double>(k * d);
  out.a = std::llround(center - x * width);
  out.x_realized = (center - static_cast<double>(out.a)) / width;
  return out;
}

StepScaling step_scaling(SystemShape shape, int64_t k, double tau,
                         double gamma, double x) {
  shape.validate();
  require_k(k, shape.N);
  if (!(tau > 0)) throw InvalidArgument("tau must be positive");
  const double rho = shape.rho();
  const double N = static_cast<double>(shape.N);
  const double cycles = std::floor(tau * std::sqrt(N) / std::sqrt(1.0 - rho));
  StepScaling out;
  out.tau = tau;
  out.gamma = gamma;  // realised exactly: t is built from gamma linearly
  out.t = (N / (rho * rho)) * cycles + gamma * N / (rho * rho) +
          static_cast<double>(shape.N - k) / (rho * rho);
  if (out.t < 0) {
    throw NegativeTime("step scaling: tau/gamma/k combination gives t < 0");
  }
  const double width = std::pow(rho, -1.0 / 3.0) *
                       std::pow(1.0 - rho, 2.0 / 3.0) * std::cbrt(out.t);
  const double center =
      (1.0 - rho) * out.t - static_cast<double>(shape.N - k) / rho;
  out.a = std::llround(center - x * width);
  out.x_realized = (center - static_cast<double>(out.a)) / width;
  return out;
}

CurrentEvent current_from_tagged(SystemShape shape, int64_t i, int64_t m,
                                 int64_t k) {
  shape.validate();
  require_k(k, shape.N);
  if (i < 1) throw InvalidArgument("winding count i must be >= 1");
  if (m < -shape.N + 1 || m > shape.L - shape.N) {
    throw InvalidArgument("bond index m must lie in [-N+1, L-N]");
  }
  CurrentEvent ev;
  ev.position_threshold = i * shape.L + m + 1;
  ev.current_min =
      i * shape.N + (shape.N + 1 - k) + (m <= 0 ? m : 0);
  return ev;
}

}  // namespace ptasep
