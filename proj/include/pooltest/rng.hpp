#pragma once

#include <cstdint>
#include <random>

namespace pooltest {

// Reproducible random source shared by sampling and the simulation studies.
// A splitmix64 scramble turns (master seed, stream index) into the seed of a
// std::mt19937_64, whose output sequence is fixed by the C++ standard, so
// results are identical across platforms and compilers.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Stream seed for replicate k of a study with the given master seed.
  static std::uint64_t derive(std::uint64_t master_seed, std::uint64_t stream);

  // Pinned in study metadata so outputs are traceable to the generator.
  static const char* algorithm() { return "splitmix64-seeded mt19937_64"; }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();

  // Sum of n Bernoulli(p) draws.
  long binomial(long n, double p);

  // Poisson(mean) by sequential inversion, redrawing until the value is >= 1.
  int positive_poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pooltest
