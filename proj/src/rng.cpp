#include "pooltest/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace pooltest {

std::uint64_t Rng::derive(std::uint64_t master_seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined state; one full round per word.
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

long Rng::binomial(long n, double p) {
  if (n < 0 || !(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("Rng::binomial: need n >= 0 and p in [0, 1]");
  }
  long y = 0;
  for (long i = 0; i < n; ++i) {
    if (uniform01() < p) ++y;
  }
  return y;
}

int Rng::positive_poisson(double mean) {
  if (!(mean > 0.0 && mean < 700.0)) {
    throw std::invalid_argument(
        "Rng::positive_poisson: mean must be in (0, 700)");
  }
  for (;;) {
    // Inversion: walk the cumulative distribution until it passes u.
    double p = std::exp(-mean);
    double cum = p;
    double u = uniform01();
    int k = 0;
    while (u > cum && k < 100000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cum += p;
    }
    if (k >= 1) return k;
  }
}

}  // namespace pooltest
