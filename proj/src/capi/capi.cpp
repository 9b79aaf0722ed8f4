// C surface over the core library: exception-to-status mapping, a
// thread-local detail message, and a generic numeric table handle.
#include "ptasep.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "core/bethe.hpp"
#include "core/compare.hpp"
#include "core/finite_time.hpp"
#include "core/limit.hpp"
#include "core/reference.hpp"
#include "core/sim.hpp"

struct ptasep_curve {
  std::string header;
  int64_t rows = 0;
  int32_t cols = 0;
  std::vector<double> data;  // row-major

  void push(double v) { data.push_back(v); }
};

namespace {

using namespace ptasep;

thread_local std::string g_last_error;

template <typename Fn>
ptasep_status guarded(Fn&& fn) noexcept {
  try {
    fn();
    return PTASEP_OK;
  } catch (const DegenerateZ& e) {
    g_last_error = e.what();
    return PTASEP_ERR_DEGENERATE_Z;
  } catch (const BranchCut& e) {
    g_last_error = e.what();
    return PTASEP_ERR_BRANCH;
  } catch (const ShapeMismatch& e) {
    g_last_error = e.what();
    return PTASEP_ERR_SHAPE;
  } catch (const NegativeTime& e) {
    g_last_error = e.what();
    return PTASEP_ERR_NEGATIVE_TIME;
  } catch (const GridMismatch& e) {
    g_last_error = e.what();
    return PTASEP_ERR_GRID;
  } catch (const InvalidArgument& e) {
    g_last_error = e.what();
    return PTASEP_ERR_INVALID;
  } catch (const ScaleExceeded& e) {
    g_last_error = e.what();
    return PTASEP_ERR_SCALE;
  } catch (const NonConvergence& e) {
    g_last_error = e.what();
    return PTASEP_ERR_NO_CONVERGENCE;
  } catch (const PairingFailure& e) {
    g_last_error = e.what();
    return PTASEP_ERR_PAIRING;
  } catch (const QuadratureDivergence& e) {
    g_last_error = e.what();
    return PTASEP_ERR_QUADRATURE;
  } catch (const BranchDiscontinuity& e) {
    g_last_error = e.what();
    return PTASEP_ERR_BRANCH;
  } catch (const TruncationOverflow& e) {
    g_last_error = e.what();
    return PTASEP_ERR_OVERFLOW;
  } catch (const SeriesStall& e) {
    g_last_error = e.what();
    return PTASEP_ERR_SERIES;
  } catch (const TruncationUnstable& e) {
    g_last_error = e.what();
    return PTASEP_ERR_TRUNCATION;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PTASEP_ERR_ALLOC;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PTASEP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PTASEP_ERR_INTERNAL;
  }
}

void require(bool ok, const char* message) {
  if (!ok) throw InvalidArgument(message);
}

QuadratureSpec to_spec(const ptasep_quad_options* opt) {
  QuadratureSpec spec;
  if (opt) {
    spec.nodes = opt->nodes;
    spec.radius = opt->radius;
    spec.max_nodes = opt->max_nodes;
    spec.threads = opt->threads;
  }
  return spec;
}

LimitOptions to_limit(const ptasep_limit_options* opt) {
  LimitOptions lo;
  if (opt) {
    lo.quad.nodes = opt->quad.nodes;
    lo.quad.radius = opt->quad.radius;
    lo.quad.max_nodes = opt->quad.max_nodes;
    lo.quad.threads = opt->quad.threads;
    lo.node_start = opt->node_start;
    lo.node_cap = opt->node_cap;
    lo.node_tol = opt->node_tol;
  } else {
    lo.quad.nodes = 64;
  }
  return lo;
}

std::vector<double> make_x_grid(double x_min, double x_max, double x_step) {
  require(x_step > 0, "x_step must be positive");
  require(x_max >= x_min, "x_max must not be below x_min");
  const double span = (x_max - x_min) / x_step;
  require(span <= 1e6, "x grid has too many points");
  const int64_t n = static_cast<int64_t>(std::floor(span + 1e-9)) + 1;
  std::vector<double> xs;
  xs.reserve(n);
  for (int64_t i = 0; i < n; ++i) {
    xs.push_back(x_min + static_cast<double>(i) * x_step);
  }
  return xs;
}

std::vector<int64_t> make_a_grid(int64_t a_min, int64_t a_max) {
  require(a_max >= a_min, "a_max must not be below a_min");
  require(a_max - a_min < 100000, "threshold grid has too many points");
  std::vector<int64_t> as;
  as.reserve(a_max - a_min + 1);
  for (int64_t a = a_min; a <= a_max; ++a) as.push_back(a);
  return as;
}

// Initial lifted position of particle k, used to translate between the
// absolute thresholds of the exact formulas and the displacement values
// produced by the sampler.
int64_t initial_position(int32_t ic, int64_t big_l, int64_t big_n, int64_t k) {
  if (ic == 0) {
    require(big_n >= 1 && big_l % big_n == 0,
            "flat start requires L to be a multiple of N");
    return k * (big_l / big_n);
  }
  return -big_n + k;
}

void deliver(ptasep_curve** out, ptasep_curve&& built) {
  *out = new ptasep_curve(std::move(built));
}

}  // namespace

extern "C" {

const char* ptasep_strerror(ptasep_status code) {
  switch (code) {
    case PTASEP_OK: return "ok";
    case PTASEP_ERR_INVALID: return "invalid argument";
    case PTASEP_ERR_DEGENERATE_Z: return "degenerate contour parameter";
    case PTASEP_ERR_SHAPE: return "incompatible ring shape";
    case PTASEP_ERR_NEGATIVE_TIME: return "negative time";
    case PTASEP_ERR_SCALE: return "size beyond supported range";
    case PTASEP_ERR_NO_CONVERGENCE: return "iteration failed to converge";
    case PTASEP_ERR_PAIRING: return "root pairing failed";
    case PTASEP_ERR_QUADRATURE: return "quadrature failed to settle";
    case PTASEP_ERR_BRANCH: return "branch-cut violation";
    case PTASEP_ERR_OVERFLOW: return "exponent range exceeded";
    case PTASEP_ERR_SERIES: return "series failed to converge";
    case PTASEP_ERR_TRUNCATION: return "kernel truncation unstable";
    case PTASEP_ERR_GRID: return "curve grids do not match";
    case PTASEP_ERR_ALLOC: return "out of memory";
    case PTASEP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ptasep_last_error(void) { return g_last_error.c_str(); }

const char* ptasep_version(void) { return "1.0.0"; }

void ptasep_quad_defaults(ptasep_quad_options* opt) {
  if (!opt) return;
  const QuadratureSpec spec;
  opt->nodes = spec.nodes;
  opt->radius = spec.radius;
  opt->max_nodes = spec.max_nodes;
  opt->threads = spec.threads;
}

void ptasep_limit_defaults(ptasep_limit_options* opt) {
  if (!opt) return;
  const LimitOptions lo;
  opt->quad.nodes = lo.quad.nodes;
  opt->quad.radius = lo.quad.radius;
  opt->quad.max_nodes = lo.quad.max_nodes;
  opt->quad.threads = lo.quad.threads;
  opt->node_start = lo.node_start;
  opt->node_cap = lo.node_cap;
  opt->node_tol = lo.node_tol;
}

int64_t ptasep_curve_rows(const ptasep_curve* c) { return c ? c->rows : 0; }

int32_t ptasep_curve_cols(const ptasep_curve* c) { return c ? c->cols : 0; }

const char* ptasep_curve_header(const ptasep_curve* c) {
  return c ? c->header.c_str() : "";
}

double ptasep_curve_get(const ptasep_curve* c, int64_t row, int32_t col) {
  if (!c || row < 0 || row >= c->rows || col < 0 || col >= c->cols) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return c->data[static_cast<size_t>(row) * c->cols + col];
}

void ptasep_curve_free(ptasep_curve* c) { delete c; }

ptasep_status ptasep_roots(int64_t big_l, int64_t big_n, double zhat_re,
                           double zhat_im, ptasep_curve** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    const SystemShape shape{big_l, big_n};
    const BetheRoots roots =
        solve_bethe_roots(shape, cplx(zhat_re, zhat_im));
    ptasep_curve c;
    c.header = "side,re,im,residual";
    c.cols = 4;
    for (const cplx& w : roots.left) {
      c.push(0.0);
      c.push(w.real());
      c.push(w.imag());
      c.push(roots.residual_of(w));
    }
    for (const cplx& w : roots.right) {
      c.push(1.0);
      c.push(w.real());
      c.push(w.imag());
      c.push(roots.residual_of(w));
    }
    c.rows = static_cast<int64_t>(c.data.size()) / c.cols;
    deliver(out, std::move(c));
  });
}

ptasep_status ptasep_finite_cdf(int32_t ic, int64_t big_l, int64_t big_n,
                                int64_t k, double t, int64_t a_min,
                                int64_t a_max,
                                const ptasep_quad_options* quad,
                                ptasep_curve** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    require(ic == 0 || ic == 1, "ic must be 0 (flat) or 1 (step)");
    const auto a_list = make_a_grid(a_min, a_max);
    const QuadratureSpec spec = to_spec(quad);
    std::vector<ProbResult> probs;
    if (ic == 0) {
      require(big_n >= 1 && big_l % big_n == 0,
              "flat start requires L to be a multiple of N");
      probs = one_point_flat(big_l / big_n, big_n, k, a_list, t, spec);
    } else {
      probs = one_point_step(SystemShape{big_l, big_n}, k, a_list, t, spec);
    }
    ptasep_curve c;
    c.header = "a,prob,imag_residue";
    c.cols = 3;
    for (size_t i = 0; i < a_list.size(); ++i) {
      c.push(static_cast<double>(a_list[i]));
      c.push(probs[i].value);
      c.push(probs[i].imag_residue);
    }
    c.rows = static_cast<int64_t>(a_list.size());
    deliver(out, std::move(c));
  });
}

ptasep_status ptasep_limit_cdf(int32_t family, double tau, double gamma,
                               double x_min, double x_max, double x_step,
                               const ptasep_limit_options* opt,
                               ptasep_curve** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    require(family == 1 || family == 2, "family must be 1 or 2");
    const auto xs = make_x_grid(x_min, x_max, x_step);
    const LimitOptions lo = to_limit(opt);
    ptasep_curve c;
    c.header = "x,value,imag_residue,m_used,M_used";
    c.cols = 5;
    for (double x : xs) {
      const LimitPoint p = family == 1 ? limit_cdf_flat(x, tau, lo)
                                       : limit_cdf_step(x, tau, gamma, lo);
      c.push(x);
      c.push(p.value);
      c.push(p.imag_residue);
      c.push(static_cast<double>(p.m_used));
      c.push(static_cast<double>(p.nodes_used));
    }
    c.rows = static_cast<int64_t>(xs.size());
    deliver(out, std::move(c));
  });
}

ptasep_status ptasep_reference_curve(int32_t family, double x_min,
                                     double x_max, double x_step,
                                     ptasep_curve** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    require(family >= 0 && family <= 2,
            "family must be 0 (gaussian), 1 (goe) or 2 (gue)");
    const ReferenceFamily fam = family == 0 ? ReferenceFamily::kGaussian
                                : family == 1
                                    ? ReferenceFamily::kGoeTracyWidom
                                    : ReferenceFamily::kGueTracyWidom;
    const auto xs = make_x_grid(x_min, x_max, x_step);
    ptasep_curve c;
    c.header = "x,value";
    c.cols = 2;
    for (double x : xs) {
      c.push(x);
      c.push(reference_cdf(fam, x));
    }
    c.rows = static_cast<int64_t>(xs.size());
    deliver(out, std::move(c));
  });
}

ptasep_status ptasep_simulate(int32_t ic, int64_t big_l, int64_t big_n,
                              double t, int32_t observable, int64_t index,
                              int64_t samples, uint64_t seed, int32_t threads,
                              int32_t has_range, int64_t a_min, int64_t a_max,
                              ptasep_curve** out) {
  return guarded([&] {
    require(out != nullptr, "output handle is null");
    require(ic == 0 || ic == 1, "ic must be 0 (flat) or 1 (step)");
    require(observable == 0 || observable == 1,
            "observable must be 0 (tagged) or 1 (current)");
    InitSpec init;
    if (ic == 0) {
      require(big_n >= 1 && big_l % big_n == 0,
              "flat start requires L to be a multiple of N");
      init.kind = InitSpec::kFlat;
      init.d = big_l / big_n;
    } else {
      init.kind = InitSpec::kStep;
    }
    const SystemShape shape{big_l, big_n};
    Observable obs;
    obs.kind = observable == 0 ? Observable::kTagged : Observable::kCurrent;
    obs.index = index;
    SimConfig cfg;
    cfg.seed = seed;
    cfg.samples = samples;
    cfg.threads = threads;
    const std::vector<int64_t> values =
        ensemble_values(init, shape, t, obs, cfg);

    // Tagged thresholds are reported as absolute lifted positions; the
    // sampler itself works in displacements.
    const int64_t shift =
        observable == 0 ? initial_position(ic, big_l, big_n, index) : 0;
    int64_t lo, hi;
    if (has_range) {
      lo = a_min - shift;
      hi = a_max - shift;
      require(hi >= lo, "a_max must not be below a_min");
    } else {
      lo = *std::min_element(values.begin(), values.end());
      hi = *std::max_element(values.begin(), values.end()) + 1;
    }
    const auto rows = tabulate_cdf(values, make_a_grid(lo, hi));
    ptasep_curve c;
    c.header = "threshold,empirical_prob,ci_low,ci_high,samples";
    c.cols = 5;
    for (const CdfRow& r : rows) {
      c.push(static_cast<double>(r.threshold + shift));
      c.push(r.prob);
      c.push(r.ci_low);
      c.push(r.ci_high);
      c.push(static_cast<double>(r.samples));
    }
    c.rows = static_cast<int64_t>(rows.size());
    deliver(out, std::move(c));
  });
}

ptasep_status ptasep_compare_curves(const double* grid_a, const double* val_a,
                                    size_t n_a, const double* grid_b,
                                    const double* val_b, size_t n_b,
                                    double threshold, double* ks, double* sup,
                                    int32_t* pass) {
  return guarded([&] {
    require(grid_a && val_a && grid_b && val_b, "curve arrays are null");
    require(ks && sup && pass, "output pointers are null");
    const CompareReport rep = compare_grids(
        std::vector<double>(grid_a, grid_a + n_a),
        std::vector<double>(val_a, val_a + n_a),
        std::vector<double>(grid_b, grid_b + n_b),
        std::vector<double>(val_b, val_b + n_b), threshold);
    *ks = rep.ks_statistic;
    *sup = rep.sup_pointwise;
    *pass = rep.pass ? 1 : 0;
  });
}

ptasep_status ptasep_sweep(int32_t family, int64_t d, double rho,
                           const int64_t* sizes, size_t n_sizes, double tau,
                           double gamma, double x_min, double x_max,
                           double x_step, const ptasep_quad_options* quad,
                           const ptasep_limit_options* limit,
                           ptasep_curve** out, int32_t* monotone) {
  return guarded([&] {
    require(out != nullptr && monotone != nullptr, "output pointers null");
    require(family == 0 || family == 1, "family must be 0 (flat) or 1 (step)");
    require(sizes != nullptr && n_sizes > 0, "no ring sizes given");
    const std::vector<int64_t> ls(sizes, sizes + n_sizes);
    const auto xs = make_x_grid(x_min, x_max, x_step);
    const QuadratureSpec spec = to_spec(quad);
    const LimitOptions lo = to_limit(limit);
    const SweepReport rep =
        family == 0 ? converge_sweep_flat(d, ls, tau, xs, spec, lo)
                    : converge_sweep_step(rho, ls, tau, gamma, xs, spec, lo);
    ptasep_curve c;
    c.header = "L,t,tau_realized,sup_distance,improved";
    c.cols = 5;
    for (size_t i = 0; i < rep.rows.size(); ++i) {
      const SweepRow& row = rep.rows[i];
      const bool improved =
          i == 0 || row.sup_distance < rep.rows[i - 1].sup_distance;
      c.push(static_cast<double>(row.L));
      c.push(row.t);
      c.push(row.tau_realized);
      c.push(row.sup_distance);
      c.push(improved ? 1.0 : 0.0);
    }
    c.rows = static_cast<int64_t>(rep.rows.size());
    *monotone = rep.monotone ? 1 : 0;
    deliver(out, std::move(c));
  });
}

ptasep_status ptasep_flat_scaling(int64_t d, int64_t big_n, int64_t k,
                                  double tau, double x, int64_t* a, double* t,
                                  double* x_realized) {
  return guarded([&] {
    require(a && t && x_realized, "output pointers are null");
    const FlatScaling sc = flat_scaling(d, big_n, k, tau, x);
    *a = sc.a;
    *t = sc.t;
    *x_realized = sc.x_realized;
  });
}

ptasep_status ptasep_step_scaling(int64_t big_l, int64_t big_n, int64_t k,
                                  double tau, double gamma, double x,
                                  int64_t* a, double* t, double* x_realized) {
  return guarded([&] {
    require(a && t && x_realized, "output pointers are null");
    const StepScaling sc =
        step_scaling(SystemShape{big_l, big_n}, k, tau, gamma, x);
    *a = sc.a;
    *t = sc.t;
    *x_realized = sc.x_realized;
  });
}

}  // extern "C"
