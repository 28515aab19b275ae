#pragma once

#include <cstdint>
#include <vector>

#include "pooltest/dataset.hpp"
#include "pooltest/params.hpp"

namespace pooltest {

// How pool sizes are produced for a simulated design.
struct PoolSizeLaw {
  enum class Kind { kFixed, kPoisson, kList };
  Kind kind = Kind::kFixed;
  int fixed_size = 1;
  double poisson_mean = 1.0;     // truncated to >= 1 by redrawing zeros
  std::vector<int> sizes;        // cycled when shorter than the pool count

  static PoolSizeLaw fixed(int s);
  static PoolSizeLaw poisson(double mean);
  static PoolSizeLaw list(std::vector<int> sizes);
};

struct SimConfig {
  long n_pools = 0;
  PoolSizeLaw law;
  ModelParams true_params;
  int replicates = 0;
  std::uint64_t master_seed = 0;
  // Study fit mode: free_lambda estimates the excess intensity, otherwise it
  // is held at the true value.
  bool free_lambda = false;
  double level = 0.95;
};

// One replicate of the configured design: pool sizes drawn from the law,
// then one Bernoulli pool outcome per pool.  Deterministic in
// (master_seed, replicate_index).
PooledDataset simulate_dataset(const SimConfig& config, long replicate_index);

struct CoverageSummary {
  double level = 0.95;
  int replicates = 0;
  int used = 0;               // replicates entering the rates below
  int boundary_count = 0;     // all-negative or all-positive replicates
  int nonconverged_count = 0;
  double coverage_theta = 0.0;
  double coverage_lambda = 0.0;  // NaN for fixed-lambda studies
  double mean_bias = 0.0;        // mean of theta_hat - theta
  double mean_se = 0.0;          // mean delta-method SE of theta_hat
  const char* rng_algorithm = "";
};

// Fraction of replicates whose Wald interval covers the true parameters.
// Intervals for theta are built on the cll scale and mapped through icll.
CoverageSummary coverage_study(const SimConfig& config, double level);

struct CalibrationSummary {
  int replicates = 0;
  int used = 0;
  int boundary_count = 0;
  int nonconverged_count = 0;
  std::vector<double> p_values;
  double ks_distance = 1.0;  // against the uniform distribution
  const char* rng_algorithm = "";
};

// Distribution of the excess-intensity Wald p-value under data generated at
// the configured truth; with true lambda = 0 the p-values should look
// uniform.
CalibrationSummary lambda_calibration_study(const SimConfig& config);

// Kolmogorov distance between sorted values in [0,1] and the uniform CDF.
double kolmogorov_distance_uniform(std::vector<double> values);

}  // namespace pooltest
