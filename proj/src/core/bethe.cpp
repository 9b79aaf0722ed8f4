#include "core/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ptasep {
namespace {

// g(w) = N Log(-w/rho) + (L-N) Log((w+1)/(1-rho)) with principal logs.
// exp(g) = qhat is single-valued and smooth off the poles {0,-1}; g itself
// may jump by 2*pi*i across the cuts, which never matters below because the
// solver only targets exp(g).
struct GEval {
  cplx g;
  cplx gp;   // g'
  cplx gpp;  // g''
  cplx qhat;
};

struct GFun {
  double n;  // N
  double m;  // L-N
  double rho;

  explicit GFun(const SystemShape& s)
      : n(static_cast<double>(s.N)),
        m(static_cast<double>(s.L - s.N)),
        rho(s.rho()) {}

  GEval operator()(cplx w) const {
    GEval e;
    const cplx w1 = w + 1.0;
    e.g = n * std::log(-w / rho) + m * std::log(w1 / (1.0 - rho));
    e.gp = n / w + m / w1;
    e.gpp = -n / (w * w) - m / (w1 * w1);
    e.qhat = std::exp(e.g);
    return e;
  }

  // Real restriction for the bisection seeds; valid on (-1, 0) \ {-rho}.
  double g_real(double w) const {
    return n * std::log(-w / rho) + m * std::log((w + 1.0) / (1.0 - rho));
  }
};

// Absolute defect tolerance: exp(g) carries a relative error ~ |g|*eps, so
// the reachable accuracy degrades mildly with L.  Stays orders of magnitude
// below the 1e-10 residual contract even at L = 4096.
double defect_tol(const SystemShape& shape, double zabs) {
  return std::max(2e-13, 8.0 * static_cast<double>(shape.L) * 2.2e-16 * zabs);
}

struct NewtonOut {
  cplx w;
  double defect;
  bool ok;
};

NewtonOut newton_to(const GFun& f, cplx w, cplx target, double tol, int maxit) {
  double defect = std::numeric_limits<double>::infinity();
  for (int it = 0; it < maxit; ++it) {
    const GEval e = f(w);
    const cplx F = e.qhat - target;
    defect = std::abs(F);
    if (defect <= tol) return {w, defect, true};
    cplx step = -F / (e.qhat * e.gp);
    // Never step over a pole of g'.
    const double cap = 0.4 * std::min({std::abs(w), std::abs(w + 1.0), 0.5});
    const double sl = std::abs(step);
    if (sl > cap && cap > 0.0) step *= cap / sl;
    w += step;
    if (sl <= 1e-16 * (1.0 + std::abs(w))) break;
  }
  const GEval e = f(w);
  defect = std::abs(e.qhat - target);
  return {w, defect, defect <= tol};
}

// One marching increment of dtarget in g, by the quadratic-corrected
// predictor g + gp*d + gpp*d^2/2 = g + dtarget.
cplx predict_step(const GEval& e, cplx dtarget) {
  const cplx lin = dtarget / e.gp;
  if (std::abs(e.gpp) * std::abs(lin) < 1e-3 * std::abs(e.gp)) return lin;
  const cplx s = std::sqrt(e.gp * e.gp + 2.0 * e.gpp * dtarget);
  const cplx d1 = (-e.gp + s) / e.gpp;
  const cplx d2 = (-e.gp - s) / e.gpp;
  return (std::abs(d1 - lin) <= std::abs(d2 - lin)) ? d1 : d2;
}

bool on_side(cplx w, double rho, bool right_side) {
  return right_side ? (w.real() > -rho) : (w.real() < -rho);
}

// Moves from a root of qhat = target_from to the *next* root of the same
// equation along the contour (a total phase increment of 2*pi), optionally
// through n_sub intermediate phase targets.  Returns nullopt-style flag.
bool advance_one(const GFun& f, const SystemShape& shape, cplx& w, cplx zhat,
                 bool right_side, int n_sub, double tol, int maxit) {
  cplx cur = w;
  for (int j = 1; j <= n_sub; ++j) {
    const GEval e = f(cur);
    const cplx dtarget = cplx(0.0, 2.0 * kPi / n_sub);
    const cplx delta = predict_step(e, dtarget);
    const cplx target = zhat * std::exp(cplx(0.0, 2.0 * kPi * j / n_sub));
    const NewtonOut nr = newton_to(f, cur + delta, target, tol, maxit);
    if (!nr.ok) return false;
    if (!on_side(nr.w, f.rho, right_side)) return false;
    // A landing far outside the predicted step means we skipped along the
    // contour (wrong Newton basin); treat as failure and retry finer.
    if (std::abs(nr.w - cur) > 6.0 * std::abs(delta) + 1e-12) return false;
    cur = nr.w;
  }
  (void)shape;
  w = cur;
  return true;
}

std::vector<cplx> march_contour(const GFun& f, const SystemShape& shape,
                                cplx seed, int count, cplx zhat,
                                bool right_side, double tol, int maxit) {
  for (int base_sub : {1, 4, 16}) {
    std::vector<cplx> roots;
    roots.reserve(count);
    roots.push_back(seed);
    cplx w = seed;
    bool failed = false;
    for (int i = 0; i < count; ++i) {  // count-1 new roots + closure step
      bool ok = false;
      for (int n_sub = base_sub; n_sub <= 64 && !ok; n_sub *= 2) {
        cplx trial = w;
        ok = advance_one(f, shape, trial, zhat, right_side, n_sub, tol, maxit);
        if (ok) w = trial;
      }
      if (!ok) {
        failed = true;
        break;
      }
      if (i + 1 < count) {
        if (std::abs(w - roots.back()) < 1e-12) {
          failed = true;  // stalled on the same root
          break;
        }
        roots.push_back(w);
      }
    }
    if (failed) continue;
    // Closure: the final advance must return to the seed.
    if (std::abs(w - roots.front()) > 1e-6 * (1.0 + std::abs(roots.front()))) {
      continue;
    }
    return roots;
  }
  throw NonConvergence("contour marching failed to close");
}

double bisect_seed(const GFun& f, double lo, double hi, double target_logr,
                   bool increasing) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double val = f.g_real(mid);
    const bool below = increasing ? (val < target_logr) : (val > target_logr);
    if (below) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 1e-17 * (std::abs(lo) + 1.0)) break;
  }
  return 0.5 * (lo + hi);
}

cplx continue_phase(const GFun& f, cplx w, double r, double theta,
                    bool right_side, double tol, int maxit) {
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(theta) / (kPi / 8.0))));
  for (int j = 1; j <= steps; ++j) {
    const double th = theta * j / steps;
    const GEval e = f(w);
    const cplx delta = predict_step(e, cplx(0.0, theta / steps));
    const NewtonOut nr =
        newton_to(f, w + delta, std::polar(r, th), tol, maxit);
    if (!nr.ok || !on_side(nr.w, f.rho, right_side)) {
      throw NonConvergence("phase continuation of the real-axis seed failed");
    }
    w = nr.w;
  }
  return w;
}

}  // namespace

double BetheRoots::residual_of(cplx w) const {
  const GFun f(shape);
  return std::abs(f(w).qhat - zhat);
}

BetheRoots solve_bethe_roots(const SystemShape& shape, cplx zhat,
                             const SolveOptions& opt) {
  shape.validate();
  const double r = std::abs(zhat);
  if (!(r > 0.0) || !(r < 1.0)) {
    throw DegenerateZ("|zhat| must lie in (0,1)");
  }
  if (r > 0.995) {
    throw DegenerateZ("|zhat| too close to 1: root contours nearly merge");
  }
  const GFun f(shape);
  const double rho = f.rho;
  const double tol = defect_tol(shape, r);
  const double logr = std::log(r);
  const double theta = std::arg(zhat);

  // Real-axis seeds at phase 0.  qhat is real, decreasing 1 -> 0 on
  // (-rho, 0) and increasing 0 -> 1 on (-1, -rho).
  const double eps_r = 1e-13;
  double seed_r = bisect_seed(f, -rho * (1.0 - eps_r), -rho * eps_r, logr,
                              /*increasing=*/false);
  double seed_l = bisect_seed(f, -1.0 + (1.0 - rho) * eps_r,
                              -rho - (1.0 - rho) * eps_r, logr,
                              /*increasing=*/true);

  cplx wr = newton_to(f, cplx(seed_r, 0.0), cplx(r, 0.0), tol, opt.max_newton).w;
  cplx wl = newton_to(f, cplx(seed_l, 0.0), cplx(r, 0.0), tol, opt.max_newton).w;
  if (theta != 0.0) {
    wr = continue_phase(f, wr, r, theta, /*right_side=*/true, tol, opt.max_newton);
    wl = continue_phase(f, wl, r, theta, /*right_side=*/false, tol, opt.max_newton);
  }

  BetheRoots out;
  out.shape = shape;
  out.zhat = zhat;
  out.right = march_contour(f, shape, wr, static_cast<int>(shape.N), zhat,
                            /*right_side=*/true, tol, opt.max_newton);
  out.left = march_contour(f, shape, wl, static_cast<int>(shape.L - shape.N),
                           zhat, /*right_side=*/false, tol, opt.max_newton);

  double worst = 0.0;
  for (cplx w : out.right) worst = std::max(worst, std::abs(f(w).qhat - zhat));
  for (cplx w : out.left) worst = std::max(worst, std::abs(f(w).qhat - zhat));
  out.max_residual = worst;
  if (worst > 1e-10) {
    std::ostringstream os;
    os << "root residual " << worst << " exceeds 1e-10";
    throw NonConvergence(os.str());
  }

  out.log_right.reserve(out.right.size());
  out.log_right1.reserve(out.right.size());
  for (cplx v : out.right) {
    out.log_right.push_back(std::log(v));
    out.log_right1.push_back(std::log(v + 1.0));
  }
  out.log_left.reserve(out.left.size());
  out.log_left1.reserve(out.left.size());
  for (cplx u : out.left) {
    out.log_left.push_back(std::log(u));
    out.log_left1.push_back(std::log(u + 1.0));
  }
  return out;
}

FlatPairing flat_partner_map(const BetheRoots& roots, int d) {
  const SystemShape& sh = roots.shape;
  if (d < 2 || sh.L != static_cast<int64_t>(d) * sh.N) {
    throw InvalidArgument("flat pairing requires L = d*N with d >= 2");
  }
  const double rho = sh.rho();
  const int64_t N = sh.N;
  const double argz = std::arg(roots.zhat);

  // pi(w) = (-w/rho)((w+1)/(1-rho))^(d-1) satisfies pi^N = zhat on roots, so
  // every root sits on one of the N rays pi = zhat^(1/N) e^(2 pi i k / N).
  const cplx off = cplx(std::log(1.0 / rho), 0.0) +
                   static_cast<double>(d - 1) * cplx(std::log(1.0 / (1.0 - rho)), 0.0);
  auto pi_log = [&](cplx logw, cplx logw1) {
    return log_negate(logw) + static_cast<double>(d - 1) * logw1 + off;
  };
  auto branch_of = [&](cplx lp) {
    const double k = (static_cast<double>(N) * lp.imag() - argz) / (2.0 * kPi);
    int64_t kk = static_cast<int64_t>(std::llround(k)) % N;
    if (kk < 0) kk += N;
    return static_cast<int>(kk);
  };

  std::vector<cplx> pi_right(roots.right.size());
  std::vector<int> right_of_branch(N, -1);
  for (size_t j = 0; j < roots.right.size(); ++j) {
    const cplx lp = pi_log(roots.log_right[j], roots.log_right1[j]);
    pi_right[j] = std::exp(lp);
    const int b = branch_of(lp);
    if (right_of_branch[b] != -1) {
      throw PairingFailure("two right roots claim the same branch index");
    }
    right_of_branch[b] = static_cast<int>(j);
  }

  FlatPairing out;
  out.d = d;
  out.partner.resize(roots.left.size());
  out.preimages.assign(roots.right.size(), {});
  for (size_t i = 0; i < roots.left.size(); ++i) {
    const cplx lp = pi_log(roots.log_left[i], roots.log_left1[i]);
    const int b = branch_of(lp);
    const int j = right_of_branch[b];
    if (j < 0) throw PairingFailure("left root matches no right-root branch");
    const cplx pi_u = std::exp(lp);
    if (std::abs(pi_u - pi_right[j]) > 1e-9 * (1.0 + std::abs(pi_u))) {
      throw PairingFailure("pairing invariant mismatch beyond 1e-9");
    }
    out.partner[i] = j;
    out.preimages[j].push_back(static_cast<int>(i));
  }
  for (const auto& pre : out.preimages) {
    if (static_cast<int>(pre.size()) != d - 1) {
      throw PairingFailure("right root preimage count != d-1");
    }
  }
  return out;
}

cplx log_prod_right(const BetheRoots& roots, cplx w) {
  KahanCSum s;
  for (cplx v : roots.right) s.add(std::log(w - v));
  return s.value();
}

cplx log_prod_left(const BetheRoots& roots, cplx w) {
  KahanCSum s;
  for (cplx u : roots.left) s.add(std::log(w - u));
  return s.value();
}

cplx log_qprime_right(const BetheRoots& roots, int j) {
  const SystemShape& sh = roots.shape;
  const cplx v = roots.right[j];
  const double rho = sh.rho();
  return std::log(static_cast<double>(sh.L)) +
         static_cast<double>(sh.N - 1) * roots.log_right[j] +
         static_cast<double>(sh.L - sh.N - 1) * roots.log_right1[j] +
         std::log(v + rho) - log_prod_left(roots, v);
}

}  // namespace ptasep
