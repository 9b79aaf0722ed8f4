/*
 * ptasep — exact and asymptotic one-point distributions for the totally
 * asymmetric simple exclusion process on a ring, plus a kinetic Monte
 * Carlo sampler and curve-comparison utilities.
 *
 * All functions are thread-safe.  Functions that can fail return a
 * ptasep_status; on failure a human-readable detail message is stored per
 * thread and can be read with ptasep_last_error().  Tabular results are
 * returned as opaque ptasep_curve handles owned by the caller (release
 * with ptasep_curve_free).
 */
#ifndef PTASEP_H
#define PTASEP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PTASEP_API __declspec(dllexport)
#else
#define PTASEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ptasep_status {
  PTASEP_OK = 0,
  PTASEP_ERR_INVALID = 1,        /* invalid argument */
  PTASEP_ERR_DEGENERATE_Z = 2,   /* |z| outside the open unit disk (or 0) */
  PTASEP_ERR_SHAPE = 3,          /* incompatible ring size / particle count */
  PTASEP_ERR_NEGATIVE_TIME = 4,  /* negative time or time before clock */
  PTASEP_ERR_SCALE = 5,          /* size beyond the supported range */
  PTASEP_ERR_NO_CONVERGENCE = 6, /* iterative solve failed */
  PTASEP_ERR_PAIRING = 7,        /* root pairing not uniquely resolved */
  PTASEP_ERR_QUADRATURE = 8,     /* contour average failed to settle */
  PTASEP_ERR_BRANCH = 9,         /* branch-cut input or branch jump */
  PTASEP_ERR_OVERFLOW = 10,      /* exponent range exceeded */
  PTASEP_ERR_SERIES = 11,        /* series failed to converge */
  PTASEP_ERR_TRUNCATION = 12,    /* kernel truncation failed to settle */
  PTASEP_ERR_GRID = 13,          /* curves tabulated on different grids */
  PTASEP_ERR_ALLOC = 14,         /* out of memory */
  PTASEP_ERR_INTERNAL = 15       /* unexpected failure */
} ptasep_status;

/* Static name of a status code ("ok", "invalid argument", ...). */
PTASEP_API const char* ptasep_strerror(ptasep_status code);

/* Detail message of the most recent failure on this thread; valid until
 * the next failing call on the same thread.  Never NULL. */
PTASEP_API const char* ptasep_last_error(void);

/* Library version as "major.minor.patch". */
PTASEP_API const char* ptasep_version(void);

/* ------------------------------------------------------------------ */
/* Options                                                             */
/* ------------------------------------------------------------------ */

/* Contour quadrature control.  The trapezoid rule on |z| = radius starts
 * at `nodes` points and doubles until two refinements agree, up to
 * max_nodes.  threads bounds the worker count used per evaluation. */
typedef struct ptasep_quad_options {
  int32_t nodes;
  double radius;
  int32_t max_nodes;
  int32_t threads;
} ptasep_quad_options;
PTASEP_API void ptasep_quad_defaults(ptasep_quad_options* opt);

/* Crossover-distribution control: quadrature plus the discrete-kernel
 * truncation ladder (start size, hard cap, acceptance tolerance). */
typedef struct ptasep_limit_options {
  ptasep_quad_options quad;
  int32_t node_start;
  int32_t node_cap;
  double node_tol;
} ptasep_limit_options;
PTASEP_API void ptasep_limit_defaults(ptasep_limit_options* opt);

/* ------------------------------------------------------------------ */
/* Tabular results                                                     */
/* ------------------------------------------------------------------ */

typedef struct ptasep_curve ptasep_curve;

PTASEP_API int64_t ptasep_curve_rows(const ptasep_curve* c);
PTASEP_API int32_t ptasep_curve_cols(const ptasep_curve* c);
/* Comma-separated column names. */
PTASEP_API const char* ptasep_curve_header(const ptasep_curve* c);
/* Value at (row, col); returns NaN when out of range. */
PTASEP_API double ptasep_curve_get(const ptasep_curve* c, int64_t row,
                                   int32_t col);
PTASEP_API void ptasep_curve_free(ptasep_curve* c);

/* ------------------------------------------------------------------ */
/* Operations                                                          */
/* ------------------------------------------------------------------ */

/* Spectrum of w^N (w+1)^(L-N) = z^L at the normalised parameter
 * zhat = z^L / (+- r0^L), |zhat| in (0,1).  Columns:
 *   side (0 = left of Re(w) = -N/L, 1 = right), re, im, residual. */
PTASEP_API ptasep_status ptasep_roots(int64_t big_l, int64_t big_n,
                                      double zhat_re, double zhat_im,
                                      ptasep_curve** out);

/* Exact tail probabilities P(x_k(t) >= a) for a = a_min..a_max on a ring
 * of size big_l with big_n particles.  ic: 0 = flat (requires big_l to be
 * a multiple of big_n), 1 = step.  Columns: a, prob, imag_residue. */
PTASEP_API ptasep_status ptasep_finite_cdf(int32_t ic, int64_t big_l,
                                           int64_t big_n, int64_t k, double t,
                                           int64_t a_min, int64_t a_max,
                                           const ptasep_quad_options* quad,
                                           ptasep_curve** out);

/* Crossover distribution on x = x_min, x_min + x_step, ..., <= x_max.
 * family: 1 = flat-start law F1(x; tau), 2 = step-start law
 * F2(x; tau, gamma) (gamma ignored for family 1).
 * Columns: x, value, imag_residue, m_used, M_used. */
PTASEP_API ptasep_status ptasep_limit_cdf(int32_t family, double tau,
                                          double gamma, double x_min,
                                          double x_max, double x_step,
                                          const ptasep_limit_options* opt,
                                          ptasep_curve** out);

/* Classical reference curves on the same kind of x grid.
 * family: 0 = standard Gaussian, 1 = GOE Tracy-Widom, 2 = GUE Tracy-Widom.
 * Columns: x, value. */
PTASEP_API ptasep_status ptasep_reference_curve(int32_t family, double x_min,
                                                double x_max, double x_step,
                                                ptasep_curve** out);

/* Kinetic Monte Carlo estimate of P(observable >= a).  observable:
 * 0 = position of tagged particle `index` (thresholds are absolute lifted
 * positions), 1 = time-integrated current across bond `index`.  When
 * has_range is nonzero the thresholds are a_min..a_max; otherwise the
 * observed sample range is used.  Columns:
 *   threshold, empirical_prob, ci_low, ci_high, samples. */
PTASEP_API ptasep_status ptasep_simulate(int32_t ic, int64_t big_l,
                                         int64_t big_n, double t,
                                         int32_t observable, int64_t index,
                                         int64_t samples, uint64_t seed,
                                         int32_t threads, int32_t has_range,
                                         int64_t a_min, int64_t a_max,
                                         ptasep_curve** out);

/* Sup-norm comparison of two curves on an identical grid.  ks is the
 * statistic with values clamped to [0,1]; sup is the raw pointwise
 * sup-norm; pass = (ks <= threshold). */
PTASEP_API ptasep_status ptasep_compare_curves(
    const double* grid_a, const double* val_a, size_t n_a,
    const double* grid_b, const double* val_b, size_t n_b, double threshold,
    double* ks, double* sup, int32_t* pass);

/* Ring-size convergence sweep against the crossover law.  family:
 * 0 = flat (spacing d; every size must be a multiple of d),
 * 1 = step (density rho; rho*size must be an integer).
 * Columns: L, t, tau_realized, sup_distance, improved.  monotone is set
 * to 1 when sup_distance strictly decreases along increasing L. */
PTASEP_API ptasep_status ptasep_sweep(int32_t family, int64_t d, double rho,
                                      const int64_t* sizes, size_t n_sizes,
                                      double tau, double gamma, double x_min,
                                      double x_max, double x_step,
                                      const ptasep_quad_options* quad,
                                      const ptasep_limit_options* limit,
                                      ptasep_curve** out, int32_t* monotone);

/* Relaxation-scale parametrisation helpers: translate (tau, x) into the
 * integer threshold and physical time used by the exact formulas.  The
 * step variant realises gamma exactly by quantising t. */
PTASEP_API ptasep_status ptasep_flat_scaling(int64_t d, int64_t big_n,
                                             int64_t k, double tau, double x,
                                             int64_t* a, double* t,
                                             double* x_realized);
PTASEP_API ptasep_status ptasep_step_scaling(int64_t big_l, int64_t big_n,
                                             int64_t k, double tau,
                                             double gamma, double x,
                                             int64_t* a, double* t,
                                             double* x_realized);

#ifdef __cplusplus
}
#endif

#endif /* PTASEP_H */
