#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pooltest/dataset.hpp"
#include "pooltest/params.hpp"

namespace pooltest {

// Expected information for a pooled testing design, tagged with the scale the
// entries live on and the design that produced them.
struct InfoMatrix {
  Parameterization parameterization = Parameterization::Theta;
  Eigen::Matrix2d entries = Eigen::Matrix2d::Zero();
  std::vector<int> pool_sizes;
  std::vector<long> pool_counts;
};

// Lower bound interval table for choosing a pool size: prevalences above
// cutoff(s) make pools of size s deliver more information per unit cost than
// pools of size s+1.
struct DesignTable {
  struct Row {
    int pool_size = 0;
    double cutoff = 0.0;
  };
  std::vector<Row> rows;
  double lambda = 0.0;
  double cost_sample = 0.0;
  double cost_test = 1.0;
};

// Fisher information about theta contributed by a single unit tested inside a
// pool of size s: s^{2 lambda + 1} (1-theta)^{s^{1+lambda} - 2} / (1 - (1-theta)^{s^{1+lambda}}).
double unit_information(int s, double theta, double lambda);

// Expected information matrix for (theta, lambda) over the design rows,
// the negative expected Hessian of the log-likelihood.
InfoMatrix fisher_information(const std::vector<int>& pool_sizes,
                              const std::vector<long>& pool_counts,
                              const ModelParams& params);
InfoMatrix fisher_information(const PooledDataset& design,
                              const ModelParams& params);

// Same information expressed on the (eta, lambda) scale.
InfoMatrix fisher_information_eta(const std::vector<int>& pool_sizes,
                                  const std::vector<long>& pool_counts,
                                  const ModelParams& params);
InfoMatrix fisher_information_eta(const PooledDataset& design,
                                  const ModelParams& params);

// Information per unit cost when sampling a unit costs cost_sample and
// running one test costs cost_test: the pool of size s amortizes the test
// over s units, so the per-unit cost is cost_sample + cost_test / s.
double ipuc(int s, double theta, double lambda, double cost_sample,
            double cost_test);

// Pool size in 1..s_max with the highest information per unit cost,
// exhaustive scan with ties broken toward the smaller size.
int optimal_pool_size(double theta, double lambda, double cost_sample,
                      double cost_test, int s_max = 500);

// Prevalence cutoffs for pool sizes 1..s_max: row s holds the theta at which
// sizes s and s+1 deliver equal information per unit cost, found by bisection
// to 1e-9.
DesignTable prevalence_cutoffs(int s_max, double lambda, double cost_sample,
                               double cost_test);

}  // namespace pooltest
