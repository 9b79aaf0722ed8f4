#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

#include "core/errors.hpp"

namespace ptasep {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr long double kPiL = 3.141592653589793238462643383279502884L;

// --------------------------------------------------------------------------
// Compensated accumulation.
//
// The log-domain products behind the determinant formulas sum thousands of
// per-factor logarithms whose real parts reach +-1e7 at L ~ 1000 while the
// total is O(1).  Kahan compensation on top of 80-bit intermediates keeps the
// absolute error of such sums near 1e-12.
// --------------------------------------------------------------------------
class KahanSum {
 public:
  void add(long double x) {
    const long double y = x - c_;
    const long double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return static_cast<double>(s_); }
  long double value_l() const { return s_; }

 private:
  long double s_ = 0.0L;
  long double c_ = 0.0L;
};

using lcplx = std::complex<long double>;

class KahanCSum {
 public:
  void add(lcplx x) {
    re_.add(x.real());
    im_.add(x.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }
  lcplx value_l() const { return {re_.value_l(), im_.value_l()}; }

 private:
  KahanSum re_;
  KahanSum im_;
};

// --------------------------------------------------------------------------
// Branch-safe fractional powers.
//
// Every fractional-power base in the evaluated formulas is guaranteed (by
// the half-plane separation of the root sets) to have positive real part, so
// the principal branch is smooth along the contour.  The guard turns a
// violated assumption into a hard error instead of a silent sign flip.
// --------------------------------------------------------------------------
inline cplx log_positive_re(cplx w, const char* what) {
  if (!(w.real() > 0.0)) {
    throw BranchDiscontinuity(std::string("fractional-power base has Re <= 0 in ") + what);
  }
  return std::log(w);
}

inline lcplx log_positive_re(lcplx w, const char* what) {
  if (!(w.real() > 0.0L)) {
    throw BranchDiscontinuity(std::string("fractional-power base has Re <= 0 in ") + what);
  }
  return std::log(w);
}

// Principal log of -w given the principal Log(w); avoids recomputing the
// log.  arg(-w) = arg(w) - pi for arg(w) > 0, arg(w) + pi otherwise, which
// keeps the result in (-pi, pi].
inline cplx log_negate(cplx logw) {
  return {logw.real(), logw.imag() > 0.0 ? logw.imag() - kPi : logw.imag() + kPi};
}

inline lcplx log_negate(lcplx logw) {
  return {logw.real(),
          logw.imag() > 0.0L ? logw.imag() - kPiL : logw.imag() + kPiL};
}

// --------------------------------------------------------------------------
// Splittable RNG: xoshiro256** seeded through splitmix64 from (seed, stream).
// Each Monte Carlo trajectory gets its own stream, so ensemble results do
// not depend on how trajectories are scheduled across threads.
// --------------------------------------------------------------------------
struct SplitMix64 {
  uint64_t s;
  uint64_t next() {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
};

class Xoshiro256ss {
 public:
  Xoshiro256ss(uint64_t seed, uint64_t stream) {
    SplitMix64 sm{seed};
    const uint64_t base = sm.next();
    SplitMix64 sm2{base ^ (stream * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)};
    for (auto& w : s_) w = sm2.next();
    if (s_[0] == 0 && s_[1] == 0 && s_[2] == 0 && s_[3] == 0) s_[0] = 1;
  }

  uint64_t next() {
    const uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on (0, 1]; never 0, so -log is finite.
  double uniform_pos() { return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Uniform integer in [0, n) by rejection-free widening multiply with
  // rejection on the biased tail (Lemire).
  uint64_t below(uint64_t n) {
    uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    uint64_t l = static_cast<uint64_t>(m);
    if (l < n) {
      const uint64_t t = (-n) % n;
      while (l < t) {
        x = next();
        m = static_cast<__uint128_t>(x) * n;
        l = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

 private:
  static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  uint64_t s_[4];
};

}  // namespace ptasep
