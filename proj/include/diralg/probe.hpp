#pragma once

#include "diralg/types.hpp"

#include <cstdint>
#include <random>

namespace diralg {

/// Deterministic probe-point generator (uniform in [-box, box]).
class ProbeSampler {
 public:
  explicit ProbeSampler(std::uint64_t seed, double box = 2.0) : rng_(seed), box_(box) {}

  Vector base_point(int n) { return uniform(n); }
  Vector fiber_point(int m) { return uniform(m); }

  Vector uniform(int dim) {
    std::uniform_real_distribution<double> dist(-box_, box_);
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = dist(rng_);
    return v;
  }

  double scalar() { return std::uniform_real_distribution<double>(-box_, box_)(rng_); }

 private:
  std::mt19937_64 rng_;
  double box_;
};

}  // namespace diralg
