#include "core/quadrature.hpp"

#include <cmath>
#include <exception>
#include <thread>
#include <unordered_map>
#include <vector>

namespace ptasep {
namespace {

// Evaluates fn at the given angle keys (key -> angle 2*pi*key/cap_m), using
// up to `threads` workers.  Results land in a preallocated slot per key, so
// the outcome does not depend on scheduling.
void evaluate_keys(const NodeFn& fn, double radius, int64_t cap_m,
                   const std::vector<int64_t>& keys, int threads,
                   std::unordered_map<int64_t, NodeEval>& store) {
  const size_t n = keys.size();
  std::vector<NodeEval> results(n);
  std::vector<std::exception_ptr> errors(n);
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      try {
        const long double angle = 2.0L * kPiL *
                                  static_cast<long double>(keys[i]) /
                                  static_cast<long double>(cap_m);
        results[i] = fn(std::polar(static_cast<long double>(radius), angle));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int t = std::max(1, std::min<int>(threads, static_cast<int>(n)));
  if (t == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(t);
    for (int w = 0; w < t; ++w) {
      const size_t begin = n * w / t;
      const size_t end = n * (w + 1) / t;
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  for (size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
  }
  for (size_t i = 0; i < n; ++i) store[keys[i]] = std::move(results[i]);
}

}  // namespace

std::vector<ProbResult> contour_average(const NodeFn& fn, size_t n_slots,
                                        const QuadratureSpec& spec,
                                        double tol) {
  spec.validate();
  const int m0 = spec.nodes;
  int64_t cap_m = m0;
  if (spec.adaptive) {
    while (cap_m < spec.max_nodes) cap_m *= 2;
  }

  std::unordered_map<int64_t, NodeEval> store;
  store.reserve(static_cast<size_t>(cap_m));

  std::vector<lcplx> prev_avg;
  bool have_prev = false;
  double delta = std::numeric_limits<double>::quiet_NaN();

  for (int64_t m = m0;; m *= 2) {
    // Evaluate the nodes not yet present at this stage (all of them on the
    // first pass, the odd-indexed half afterwards).
    std::vector<int64_t> todo;
    const int64_t stride = cap_m / m;
    for (int64_t i = 0; i < m; ++i) {
      const int64_t key = i * stride;
      if (!store.count(key)) todo.push_back(key);
    }
    evaluate_keys(fn, spec.radius, cap_m, todo, spec.threads, store);

    // Fixed-order compensated reduction: ascending angle.
    std::vector<KahanCSum> acc(n_slots);
    for (int64_t i = 0; i < m; ++i) {
      const NodeEval& e = store.at(i * stride);
      if (e.values.size() != n_slots) {
        throw InvalidArgument("node evaluation returned wrong slot count");
      }
      for (size_t s = 0; s < n_slots; ++s) acc[s].add(e.values[s]);
    }
    std::vector<lcplx> avg(n_slots);
    for (size_t s = 0; s < n_slots; ++s) {
      avg[s] = acc[s].value_l() / static_cast<long double>(m);
    }

    // Branch-phase monitor: angularly adjacent nodes (including the wrap
    // from the last node back to the first) must not jump by >= pi.
    bool branch_ok = true;
    if (m >= 2 && !std::isnan(store.at(0).branch_phase)) {
      for (int64_t i = 0; i < m && branch_ok; ++i) {
        const double a = store.at(i * stride).branch_phase;
        const double b = store.at(((i + 1) % m) * stride).branch_phase;
        if (std::abs(b - a) >= kPi) branch_ok = false;
      }
    }

    if (have_prev) {
      delta = 0.0;
      for (size_t s = 0; s < n_slots; ++s) {
        delta = std::max(
            delta, static_cast<double>(std::abs(avg[s] - prev_avg[s])));
      }
    }

    const bool at_cap = !spec.adaptive || m >= cap_m;
    const bool converged = have_prev && delta <= tol && branch_ok;
    if (converged || at_cap) {
      if (at_cap && !converged) {
        if (!branch_ok) {
          throw BranchDiscontinuity(
              "fractional-power phase jumps >= pi between adjacent nodes at "
              "the node-count cap");
        }
        if (spec.adaptive && delta > 1e-6) {
          throw QuadratureDivergence(
              "contour average still moving by more than 1e-6 under node "
              "doubling at the cap");
        }
      }
      std::vector<ProbResult> out(n_slots);
      for (size_t s = 0; s < n_slots; ++s) {
        out[s].value = static_cast<double>(avg[s].real());
        out[s].imag_residue = static_cast<double>(std::abs(avg[s].imag()));
        out[s].quad_delta = delta;
        out[s].nodes_used = static_cast<int>(m);
      }
      return out;
    }
    prev_avg = std::move(avg);
    have_prev = true;
  }
}

}  // namespace ptasep
