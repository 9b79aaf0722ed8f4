#include "core/sim.hpp"

#include <algorithm>
#include <thread>

namespace ptasep {
namespace {

int64_t ring_site(int64_t lifted, int64_t L) {
  return ((lifted % L) + L) % L;
}

bool is_mobile(const RingState& s, int32_t j) {
  return !s.occupied[ring_site(s.lifted[j] + 1, s.shape.L)];
}

void mobile_insert(RingState& s, int32_t j) {
  if (s.mobile_at[j] >= 0) return;
  s.mobile_at[j] = static_cast<int32_t>(s.mobile.size());
  s.mobile.push_back(j);
}

void mobile_erase(RingState& s, int32_t j) {
  const int32_t at = s.mobile_at[j];
  if (at < 0) return;
  const int32_t last = s.mobile.back();
  s.mobile[at] = last;
  s.mobile_at[last] = at;
  s.mobile.pop_back();
  s.mobile_at[j] = -1;
}

void refresh_mobility(RingState& s, int32_t j) {
  if (is_mobile(s, j)) {
    mobile_insert(s, j);
  } else {
    mobile_erase(s, j);
  }
}

// Full re-derivation of the occupancy and mobile set; used at init and as
// a sampled assertion during long runs.
void verify_invariants(const RingState& s) {
  const int64_t L = s.shape.L, N = s.shape.N;
  std::vector<uint8_t> occ(L, 0);
  int64_t ones = 0;
  for (int64_t j = 0; j < N; ++j) {
    if (j + 1 < N && !(s.lifted[j] < s.lifted[j + 1])) {
      throw Error("simulator invariant violated: ordering lost");
    }
    const int64_t site = ring_site(s.lifted[j], L);
    if (occ[site]) throw Error("simulator invariant violated: overlap");
    occ[site] = 1;
    ++ones;
  }
  if (!(s.lifted[N - 1] < s.lifted[0] + L)) {
    throw Error("simulator invariant violated: window exceeded");
  }
  if (ones != N || occ != s.occupied) {
    throw Error("simulator invariant violated: occupancy drift");
  }
  for (int64_t j = 0; j < N; ++j) {
    const bool listed = s.mobile_at[j] >= 0;
    const bool expect = !occ[ring_site(s.lifted[j] + 1, L)];
    if (listed != expect) {
      throw Error("simulator invariant violated: stale mobility");
    }
  }
}

}  // namespace

RingState init_state(InitSpec ic, SystemShape shape) {
  shape.validate();
  RingState s;
  s.shape = shape;
  const int64_t N = shape.N;
  s.lifted.resize(N);
  if (ic.kind == InitSpec::kFlat) {
    if (ic.d < 2 || shape.L != ic.d * N) {
      throw ShapeMismatch("flat start requires L = d*N with d >= 2");
    }
    for (int64_t j = 0; j < N; ++j) s.lifted[j] = (j + 1) * ic.d;
  } else {
    for (int64_t j = 0; j < N; ++j) s.lifted[j] = -N + (j + 1);
  }
  s.initial = s.lifted;
  s.jumps.assign(N, 0);
  s.crossings.assign(shape.L, 0);
  s.occupied.assign(shape.L, 0);
  for (int64_t j = 0; j < N; ++j) {
    s.occupied[ring_site(s.lifted[j], shape.L)] = 1;
  }
  s.mobile_at.assign(N, -1);
  for (int32_t j = 0; j < N; ++j) {
    if (is_mobile(s, j)) mobile_insert(s, j);
  }
  verify_invariants(s);
  return s;
}

void run_until(RingState& s, double t, Xoshiro256ss& rng) {
  if (t < s.clock) throw NegativeTime("target time precedes the clock");
  const int64_t L = s.shape.L, N = s.shape.N;
  for (;;) {
    const size_t rate = s.mobile.size();  // >= 1 whenever N < L
    const double dt = rng.exponential(static_cast<double>(rate));
    if (s.clock + dt > t) {
      s.clock = t;
      return;
    }
    s.clock += dt;
    const int32_t j = s.mobile[rng.below(rate)];
    const int64_t from = s.lifted[j];
    s.occupied[ring_site(from, L)] = 0;
    s.occupied[ring_site(from + 1, L)] = 1;
    s.lifted[j] = from + 1;
    ++s.jumps[j];
    ++s.crossings[ring_site(from, L)];
    // The mover may have run into its right neighbour; the left neighbour
    // (cyclically) now has a free site in front of it.
    refresh_mobility(s, j);
    const int32_t left = j == 0 ? static_cast<int32_t>(N - 1) : j - 1;
    if (left != j) refresh_mobility(s, left);
    if ((++s.events & 1023u) == 0) verify_invariants(s);
  }
}

int64_t tagged_displacement(const RingState& s, int64_t k) {
  if (k < 1 || k > s.shape.N) throw InvalidArgument("particle index k");
  return s.lifted[k - 1] - s.initial[k - 1];
}

int64_t current_count(const RingState& s, int64_t m) {
  return s.crossings[ring_site(m, s.shape.L)];
}

std::vector<int64_t> ensemble_values(InitSpec ic, SystemShape shape, double t,
                                     Observable obs, const SimConfig& cfg) {
  shape.validate();
  if (cfg.samples < 100) throw InvalidArgument("need at least 100 samples");
  if (t < 0) throw NegativeTime("simulation time must be >= 0");
  if (obs.kind == Observable::kTagged &&
      (obs.index < 1 || obs.index > shape.N)) {
    throw InvalidArgument("tagged particle index out of range");
  }

  // One observable value per sample, then an ordered reduction: counts are
  // integers, so the tabulation is exact and schedule-independent.
  std::vector<int64_t> values(cfg.samples);
  auto work = [&](int64_t begin, int64_t end) {
    for (int64_t i = begin; i < end; ++i) {
      RingState s = init_state(ic, shape);
      Xoshiro256ss rng(cfg.seed, static_cast<uint64_t>(i));
      run_until(s, t, rng);
      values[i] = obs.kind == Observable::kTagged
                      ? tagged_displacement(s, obs.index)
                      : current_count(s, obs.index);
    }
  };
  const int workers =
      std::max(1, std::min<int>(cfg.threads,
                                static_cast<int>(std::min<int64_t>(
                                    cfg.samples, 64))));
  if (workers == 1) {
    work(0, cfg.samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back(work, cfg.samples * w / workers,
                        cfg.samples * (w + 1) / workers);
    }
    for (auto& th : pool) th.join();
  }
  return values;
}

std::vector<CdfRow> tabulate_cdf(const std::vector<int64_t>& values,
                                 const std::vector<int64_t>& thresholds) {
  if (values.empty()) throw InvalidArgument("no sample values to tabulate");
  std::vector<CdfRow> out;
  out.reserve(thresholds.size());
  const double n = static_cast<double>(values.size());
  const double z = 1.959963984540054;  // 95% normal quantile
  for (int64_t a : thresholds) {
    int64_t count = 0;
    for (int64_t v : values) {
      if (v >= a) ++count;
    }
    const double p = static_cast<double>(count) / n;
    const double denom = 1.0 + z * z / n;
    const double centre = (p + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    CdfRow row;
    row.threshold = a;
    row.prob = p;
    // The Wilson interval contains the point estimate by construction;
    // clamping repairs the last-ulp rounding at p in {0,1}.
    row.ci_low = std::min(p, std::max(0.0, centre - half));
    row.ci_high = std::max(p, std::min(1.0, centre + half));
    row.samples = static_cast<int64_t>(values.size());
    out.push_back(row);
  }
  return out;
}

std::vector<CdfRow> ensemble_cdf(InitSpec ic, SystemShape shape, double t,
                                 Observable obs,
                                 const std::vector<int64_t>& thresholds,
                                 const SimConfig& cfg) {
  return tabulate_cdf(ensemble_values(ic, shape, t, obs, cfg), thresholds);
}

}  // namespace ptasep
