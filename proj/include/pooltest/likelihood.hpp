#pragma once

#include <Eigen/Dense>

#include "pooltest/dataset.hpp"
#include "pooltest/params.hpp"

namespace pooltest {

// Log-likelihood with its first two derivatives in the free parameters of
// params.  Vector layout: the prevalence-side parameters first (theta, eta,
// or the coefficient vector), then lambda when it is not held fixed.
struct ScoreAndCurvature {
  Parameterization parameterization = Parameterization::Theta;
  bool lambda_included = false;
  double loglik = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Log-likelihood of the data at the given parameters; identical to
// poolbin_log_mass including the binomial-coefficient constant.
double loglik(const PooledDataset& data, const ModelParams& params);

// Gradient of loglik in the free parameters.  Requires interior parameters
// (every row with positives must have a positive-pool probability strictly
// inside (0, 1)).
Eigen::VectorXd score(const PooledDataset& data, const ModelParams& params);

// Second-derivative matrix of loglik in the free parameters.
Eigen::MatrixXd hessian(const PooledDataset& data, const ModelParams& params);

// All three at once, sharing one pass over the rows.
ScoreAndCurvature score_and_curvature(const PooledDataset& data,
                                      const ModelParams& params);

}  // namespace pooltest
