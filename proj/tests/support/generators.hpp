#pragma once

#include <cstdint>
#include <random>

#include "gravint/config.hpp"

namespace gravint::proptest {

// Deterministic sampler for property tests; one per test, fixed seed.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng_);
  }
  bool coin() { return integer(0, 1) == 1; }

  // A geometry that satisfies every config invariant.
  ExperimentConfig config() {
    ExperimentConfig c;
    c.particle_mass_amu = uniform(1.0, 250.0);
    c.arm_separation = log_uniform(1e-3, 0.3);
    c.mass_left = log_uniform(1e-3, 1.0);
    c.mass_right = log_uniform(1e-3, 1.0);
    c.source_density = uniform(2000.0, 22000.0);
    c.hold_time = uniform(0.1, 30.0);
    const double half = 0.5 * c.arm_separation;
    c.dist_left = half + c.radius_left() * uniform(1.01, 5.0) + uniform(0.0, 0.05);
    c.dist_right = half + c.radius_right() * uniform(1.01, 5.0) + uniform(0.0, 0.05);
    return c;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gravint::proptest
