#include "core/compare.hpp"

#include <algorithm>
#include <cmath>

namespace ptasep {
namespace {

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

struct ScaledGrid {
  std::vector<int64_t> thresholds;
  std::vector<double> x_realized;
  double t = 0.0;
};

template <typename ScaleFn>
ScaledGrid realize_grid(const std::vector<double>& x_grid, ScaleFn&& scale) {
  ScaledGrid g;
  g.thresholds.reserve(x_grid.size());
  g.x_realized.reserve(x_grid.size());
  for (double x : x_grid) {
    const auto sc = scale(x);
    g.thresholds.push_back(sc.a);
    g.x_realized.push_back(sc.x_realized);
    g.t = sc.t;
  }
  return g;
}

double tau_from_time(double t, double rho, int64_t L) {
  const double dl = static_cast<double>(L);
  return t * std::sqrt(rho * (1.0 - rho)) / (dl * std::sqrt(dl));
}

void check_sweep_inputs(const std::vector<int64_t>& sizes,
                        const std::vector<double>& x_grid) {
  if (sizes.empty()) throw InvalidArgument("sweep needs at least one size");
  if (x_grid.empty()) throw InvalidArgument("sweep needs a non-empty x grid");
}

void finalize(SweepReport& rep) {
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const SweepRow& a, const SweepRow& b) { return a.L < b.L; });
  rep.monotone = true;
  for (size_t i = 1; i < rep.rows.size(); ++i) {
    rep.monotone =
        rep.monotone && rep.rows[i].sup_distance < rep.rows[i - 1].sup_distance;
  }
}

}  // namespace

CompareReport compare_grids(const std::vector<double>& grid_a,
                            const std::vector<double>& val_a,
                            const std::vector<double>& grid_b,
                            const std::vector<double>& val_b,
                            double threshold) {
  if (grid_a.size() != val_a.size() || grid_b.size() != val_b.size()) {
    throw InvalidArgument("curve grid and value columns differ in length");
  }
  if (grid_a.empty()) throw InvalidArgument("cannot compare empty curves");
  if (grid_a.size() != grid_b.size()) {
    throw GridMismatch("curves tabulated on different numbers of points");
  }
  for (size_t i = 0; i < grid_a.size(); ++i) {
    if (grid_a[i] != grid_b[i]) {
      throw GridMismatch("curve grids disagree; refusing to interpolate");
    }
  }
  CompareReport rep;
  rep.n_points = static_cast<int64_t>(grid_a.size());
  for (size_t i = 0; i < grid_a.size(); ++i) {
    rep.ks_statistic = std::max(
        rep.ks_statistic, std::abs(clamp01(val_a[i]) - clamp01(val_b[i])));
    rep.sup_pointwise =
        std::max(rep.sup_pointwise, std::abs(val_a[i] - val_b[i]));
  }
  rep.pass = rep.ks_statistic <= threshold;
  return rep;
}

SweepReport converge_sweep_flat(int64_t d, const std::vector<int64_t>& sizes,
                                double tau, const std::vector<double>& x_grid,
                                const QuadratureSpec& quad,
                                const LimitOptions& limit) {
  check_sweep_inputs(sizes, x_grid);
  SweepReport rep;
  for (int64_t L : sizes) {
    if (d < 2 || L % d != 0) {
      throw ShapeMismatch("sweep sizes must be multiples of the spacing d");
    }
    const int64_t N = L / d;
    const auto grid = realize_grid(
        x_grid, [&](double x) { return flat_scaling(d, N, N, tau, x); });
    const auto exact = one_point_flat(d, N, N, grid.thresholds, grid.t, quad);
    SweepRow row;
    row.L = L;
    row.t = grid.t;
    row.tau_realized = tau_from_time(grid.t, 1.0 / static_cast<double>(d), L);
    for (size_t i = 0; i < x_grid.size(); ++i) {
      const LimitPoint lp = limit_cdf_flat(
          std::cbrt(row.tau_realized) * grid.x_realized[i], row.tau_realized,
          limit);
      row.sup_distance =
          std::max(row.sup_distance, std::abs(lp.value - exact[i].value));
    }
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

SweepReport converge_sweep_step(double rho, const std::vector<int64_t>& sizes,
                                double tau, double gamma,
                                const std::vector<double>& x_grid,
                                const QuadratureSpec& quad,
                                const LimitOptions& limit) {
  check_sweep_inputs(sizes, x_grid);
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw InvalidArgument("density must lie strictly between 0 and 1");
  }
  SweepReport rep;
  for (int64_t L : sizes) {
    const double n_real = rho * static_cast<double>(L);
    const int64_t N = std::llround(n_real);
    if (std::abs(n_real - static_cast<double>(N)) > 1e-9 || N < 1 || N >= L) {
      throw ShapeMismatch("sweep sizes must realise the density exactly");
    }
    const SystemShape shape{L, N};
    const auto grid = realize_grid(x_grid, [&](double x) {
      return step_scaling(shape, N, tau, gamma, x);
    });
    const auto exact = one_point_step(shape, N, grid.thresholds, grid.t, quad);
    SweepRow row;
    row.L = L;
    row.t = grid.t;
    row.tau_realized = tau_from_time(grid.t, shape.rho(), L);
    for (size_t i = 0; i < x_grid.size(); ++i) {
      const LimitPoint lp = limit_cdf_step(
          std::cbrt(row.tau_realized) * grid.x_realized[i], row.tau_realized,
          gamma, limit);
      row.sup_distance =
          std::max(row.sup_distance, std::abs(lp.value - exact[i].value));
    }
    rep.rows.push_back(row);
  }
  finalize(rep);
  return rep;
}

}  // namespace ptasep
