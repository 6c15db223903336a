#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace growbatch {

// splitmix64; used to spread (seed, counter) pairs into engine seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Random stream addressed by (seed, counter).  Every consumer that needs
/// per-iteration reproducibility (sample draws, injected noise) builds the
/// stream for iteration k directly instead of replaying k-1 predecessors.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t counter)
      : engine_(mix64(mix64(seed) ^ mix64(~counter))) {}

  explicit CounterRng(std::uint64_t seed) : CounterRng(seed, 0) {}

  std::mt19937_64& engine() { return engine_; }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    std::uniform_int_distribution<std::uint64_t> d(0, bound - 1);
    return d(engine_);
  }

  double uniform(double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return d(engine_);
  }

  double normal() {
    std::normal_distribution<double> d(0.0, 1.0);
    return d(engine_);
  }

  /// Uniform direction on the unit sphere in R^dim.
  Eigen::VectorXd unit_vector(int dim) {
    Eigen::VectorXd v(dim);
    double nrm = 0.0;
    do {
      for (int i = 0; i < dim; ++i) v[i] = normal();
      nrm = v.norm();
    } while (nrm == 0.0);
    return v / nrm;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace growbatch
