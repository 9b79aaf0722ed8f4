#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "core/ring.hpp"

namespace ptasep {

struct OracleOptions {
  double tail_eps = 1e-12;            // Poisson truncation tail
  int64_t max_states = 200000;        // composition x displacement budget
  int64_t max_displacement = 1 << 30; // hard cap on total jumps tracked
};

// Brute-force distribution of the ring chain at time t, evolved from Y by
// uniformization of the Kolmogorov generator: P(t) = sum_j e^(-Lt)(Lt)^j/j!
// P_u^j delta_Y with event rate Lambda = N.  The state is factored as
// (gap composition, total jump count D); positions are recovered exactly
// from sum(Y) + D.
class GeneratorOracle {
 public:
  GeneratorOracle(const SystemShape& shape, std::vector<int64_t> Y, double t,
                  const OracleOptions& opt = {});

  // Probability of an exact lifted configuration X (x_1 < ... < x_N < x_1+L).
  double prob_of(const std::vector<int64_t>& X) const;
  // P(x_k(t) >= a) for 1 <= k <= N.
  double prob_xk_ge(int k, int64_t a) const;

  double total_mass() const { return total_mass_; }
  double dropped_mass() const { return dropped_; }
  int64_t displacement_cap() const { return J_; }

  // Visits every configuration with retained probability > 0.
  void for_each(
      const std::function<void(const std::vector<int64_t>&, double)>& fn) const;

  const SystemShape& shape() const { return shape_; }

 private:
  SystemShape shape_;
  std::vector<int64_t> y_;
  int64_t sum_y_ = 0;
  int64_t J_ = 0;
  double dropped_ = 0.0;
  double total_mass_ = 0.0;
  std::vector<std::vector<int32_t>> comps_;         // N-1 gap parts each
  std::vector<std::vector<int32_t>> prefix_;        // gap prefix sums
  std::unordered_map<uint64_t, int32_t> comp_index_;
  std::vector<double> prob_;                        // [c * (J+1) + D]
};

// Validates that X is a lifted ring configuration for the shape.
void validate_configuration(const SystemShape& shape,
                            const std::vector<int64_t>& X, const char* what);

}  // namespace ptasep
