#include "core/oracle.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_gamma.h>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ptasep {
namespace {

uint64_t pack_gaps(const std::vector<int32_t>& g) {
  // 6 bits per gap is ample: the oracle state budget keeps L far below 64.
  uint64_t key = 0;
  for (int32_t v : g) key = (key << 6) | static_cast<uint64_t>(v);
  return key;
}

// Smallest J with P(Poisson(lambda) > J) <= eps, via the regularized
// incomplete gamma identity P(Poisson >= k) = P(k, lambda).
int64_t poisson_quantile(double lambda, double eps) {
  gsl_set_error_handler_off();
  if (lambda <= 0.0) return 0;
  auto tail_beyond = [&](int64_t j) {
    return gsl_sf_gamma_inc_P(static_cast<double>(j + 1), lambda);
  };
  int64_t hi = static_cast<int64_t>(lambda) + 8;
  while (tail_beyond(hi) > eps) hi = hi * 2 + 8;
  int64_t lo = 0;
  while (lo < hi) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (tail_beyond(mid) > eps) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

void enumerate_comps(int64_t L, int64_t N, std::vector<int32_t>& cur,
                     int64_t used, std::vector<std::vector<int32_t>>& out) {
  if (static_cast<int64_t>(cur.size()) == N - 1) {
    out.push_back(cur);
    return;
  }
  const int64_t remaining_parts = N - 1 - static_cast<int64_t>(cur.size());
  // leave >= 1 for each later part and for the implicit wrap gap g_N
  for (int32_t g = 1; used + g + remaining_parts <= L - 1 + 1; ++g) {
    if (used + g > L - (remaining_parts - 1) - 1) break;
    cur.push_back(g);
    enumerate_comps(L, N, cur, used + g, out);
    cur.pop_back();
  }
}

}  // namespace

void validate_configuration(const SystemShape& shape,
                            const std::vector<int64_t>& X, const char* what) {
  if (static_cast<int64_t>(X.size()) != shape.N) {
    std::ostringstream os;
    os << what << " must list exactly N positions";
    throw InvalidArgument(os.str());
  }
  for (size_t i = 0; i + 1 < X.size(); ++i) {
    if (X[i] >= X[i + 1]) {
      std::ostringstream os;
      os << what << " positions must be strictly increasing";
      throw InvalidArgument(os.str());
    }
  }
  if (X.back() >= X.front() + shape.L) {
    std::ostringstream os;
    os << what << " violates x_N < x_1 + L";
    throw InvalidArgument(os.str());
  }
}

GeneratorOracle::GeneratorOracle(const SystemShape& shape,
                                 std::vector<int64_t> Y, double t,
                                 const OracleOptions& opt)
    : shape_(shape), y_(std::move(Y)) {
  shape_.validate();
  validate_configuration(shape_, y_, "Y");
  if (!(t >= 0.0)) throw NegativeTime("oracle requires t >= 0");
  const int64_t L = shape_.L;
  const int64_t N = shape_.N;
  if (L >= 64) throw ScaleExceeded("oracle supports L < 64 only");
  for (int64_t y : y_) sum_y_ += y;

  const double lambda = static_cast<double>(N) * t;
  J_ = poisson_quantile(lambda, opt.tail_eps);
  if (J_ > opt.max_displacement) {
    throw TruncationOverflow(
        "displacement bound exceeded before the Poisson tail tolerance");
  }

  std::vector<int32_t> cur;
  enumerate_comps(L, N, cur, 0, comps_);
  const int64_t n_comp = static_cast<int64_t>(comps_.size());
  if (n_comp * (J_ + 1) > opt.max_states) {
    throw ScaleExceeded("oracle state space exceeds the configured budget");
  }

  comp_index_.reserve(comps_.size() * 2);
  prefix_.resize(comps_.size());
  for (size_t c = 0; c < comps_.size(); ++c) {
    comp_index_.emplace(pack_gaps(comps_[c]), static_cast<int32_t>(c));
    prefix_[c].resize(N);
    prefix_[c][0] = 0;
    for (int64_t i = 1; i < N; ++i) {
      prefix_[c][i] = prefix_[c][i - 1] + comps_[c][i - 1];
    }
  }

  // Per-composition transition targets: particle p jumps iff its right gap
  // is >= 2; the jump shifts one unit of gap from p's right gap to p's left.
  std::vector<std::vector<int32_t>> target(comps_.size(),
                                           std::vector<int32_t>(N, -1));
  for (size_t c = 0; c < comps_.size(); ++c) {
    const auto& g = comps_[c];
    int64_t sum_g = 0;
    for (int32_t v : g) sum_g += v;
    const int32_t g_last = static_cast<int32_t>(L - sum_g);  // wrap gap g_N
    std::vector<int32_t> h = g;
    for (int64_t p = 1; p <= N; ++p) {
      const int32_t right_gap = (p < N) ? g[p - 1] : g_last;
      if (right_gap < 2) continue;
      if (N == 1) {
        target[c][0] = static_cast<int32_t>(c);
        continue;
      }
      h = g;
      if (p < N) h[p - 1] -= 1;
      if (p > 1) h[p - 2] += 1;
      target[c][p - 1] = comp_index_.at(pack_gaps(h));
    }
  }

  // Uniformization sweep.
  const int64_t width = J_ + 1;
  const size_t total = static_cast<size_t>(n_comp * width);
  std::vector<double> v(total, 0.0), vnext(total, 0.0);
  prob_.assign(total, 0.0);

  std::vector<int32_t> y_gaps(N - 1);
  for (int64_t i = 0; i + 1 < N; ++i) {
    y_gaps[i] = static_cast<int32_t>(y_[i + 1] - y_[i]);
  }
  const int32_t c0 = comp_index_.at(pack_gaps(y_gaps));
  v[static_cast<size_t>(c0) * width] = 1.0;

  const double inv_rate = 1.0 / static_cast<double>(N);
  for (int64_t j = 0;; ++j) {
    const double log_pois = -lambda + (j > 0 ? j * std::log(lambda) : 0.0) -
                            std::lgamma(static_cast<double>(j + 1));
    const double pj = std::exp(log_pois);
    if (pj > 0.0) {
      for (size_t i = 0; i < total; ++i) prob_[i] += pj * v[i];
    }
    if (j == J_) break;

    std::fill(vnext.begin(), vnext.end(), 0.0);
    for (int64_t c = 0; c < n_comp; ++c) {
      const double* src = &v[static_cast<size_t>(c) * width];
      int32_t n_mob = 0;
      for (int64_t p = 0; p < N; ++p) {
        if (target[c][p] >= 0) ++n_mob;
      }
      const double stay = 1.0 - n_mob * inv_rate;
      double* dst_stay = &vnext[static_cast<size_t>(c) * width];
      const int64_t dmax = std::min<int64_t>(j, J_ - 1);
      if (stay > 0.0) {
        for (int64_t dd = 0; dd <= std::min<int64_t>(j, J_); ++dd) {
          dst_stay[dd] += stay * src[dd];
        }
      }
      for (int64_t p = 0; p < N; ++p) {
        const int32_t tc = target[c][p];
        if (tc < 0) continue;
        double* dst = &vnext[static_cast<size_t>(tc) * width];
        for (int64_t dd = 0; dd <= dmax; ++dd) {
          dst[dd + 1] += inv_rate * src[dd];
        }
      }
    }
    v.swap(vnext);
  }

  dropped_ = gsl_sf_gamma_inc_P(static_cast<double>(J_ + 1), lambda);
  for (double p : prob_) total_mass_ += p;
}

double GeneratorOracle::prob_of(const std::vector<int64_t>& X) const {
  validate_configuration(shape_, X, "X");
  int64_t sum_x = 0;
  for (int64_t x : X) sum_x += x;
  const int64_t D = sum_x - sum_y_;
  if (D < 0 || D > J_) return 0.0;
  std::vector<int32_t> gaps(shape_.N - 1);
  for (size_t i = 0; i + 1 < X.size(); ++i) {
    gaps[i] = static_cast<int32_t>(X[i + 1] - X[i]);
  }
  const auto it = comp_index_.find(pack_gaps(gaps));
  if (it == comp_index_.end()) return 0.0;
  return prob_[static_cast<size_t>(it->second) * (J_ + 1) + D];
}

double GeneratorOracle::prob_xk_ge(int k, int64_t a) const {
  if (k < 1 || k > shape_.N) throw InvalidArgument("k out of range");
  const int64_t N = shape_.N;
  const int64_t width = J_ + 1;
  double acc = 0.0;
  for (size_t c = 0; c < comps_.size(); ++c) {
    int64_t weighted = 0;
    for (int64_t i = 0; i + 1 < N; ++i) {
      weighted += static_cast<int64_t>(N - 1 - i) * comps_[c][i];
    }
    // x_k = (sum_y + D - weighted)/N + prefix[k-1]
    for (int64_t D = 0; D <= J_; ++D) {
      const double p = prob_[c * width + D];
      if (p == 0.0) continue;
      const int64_t num = sum_y_ + D - weighted;
      if (num % N != 0) continue;  // unreachable slot, carries no mass
      const int64_t xk = num / N + prefix_[c][k - 1];
      if (xk >= a) acc += p;
    }
  }
  return acc;
}

void GeneratorOracle::for_each(
    const std::function<void(const std::vector<int64_t>&, double)>& fn) const {
  const int64_t N = shape_.N;
  const int64_t width = J_ + 1;
  std::vector<int64_t> pos(N);
  for (size_t c = 0; c < comps_.size(); ++c) {
    int64_t weighted = 0;
    for (int64_t i = 0; i + 1 < N; ++i) {
      weighted += static_cast<int64_t>(N - 1 - i) * comps_[c][i];
    }
    for (int64_t D = 0; D <= J_; ++D) {
      const double p = prob_[c * width + D];
      if (p == 0.0) continue;
      const int64_t num = sum_y_ + D - weighted;
      if (num % N != 0) continue;
      const int64_t x1 = num / N;
      for (int64_t i = 0; i < N; ++i) pos[i] = x1 + prefix_[c][i];
      fn(pos, p);
    }
  }
}

}  // namespace ptasep
