#pragma once

#include <cstdint>
#include <random>

namespace crs {

// SplitMix64 step (Steele, Lea, Flood 2014). Advances state.
std::uint64_t splitmix64(std::uint64_t& state);

// Seed of replication `index` under master seed `master`: two SplitMix64
// outputs mixed so that neighbouring indices give unrelated streams.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index);

// Simulation RNG: std::mt19937_64 (sequence fixed by the C++ standard) with
// the variate transforms below written out so results do not depend on the
// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Exponential with mean 1.
  double exponential();

  // Poisson with the given mean: multiplication method below 30, PTRS
  // transformed rejection (Hormann 1993) above.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace crs
