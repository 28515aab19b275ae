#pragma once

#include <Eigen/Dense>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pooltest/dataset.hpp"
#include "pooltest/params.hpp"

namespace pooltest {

enum class BoundaryFlag {
  kThetaZero,        // every pool tested negative, MLE at theta = 0
  kThetaOne,         // every pool tested positive, MLE at theta = 1
  kLambdaAtMinusOne, // constrained optimum at the lambda >= -1 boundary
  kUnidentifiableSe  // observed information unusable for standard errors
};

std::string boundary_flag_name(BoundaryFlag flag);

struct FitResult {
  std::string model_label;
  ModelParams estimates;
  // One label per free parameter in solver order: coefficient terms first,
  // then "ExcessIntensity" when lambda is free.
  std::vector<std::string> terms;
  // Inverse of the negative observed Hessian at the estimates; empty (0x0)
  // when covariance_available is false.
  Eigen::MatrixXd covariance;
  bool covariance_available = false;
  std::string covariance_unavailable_reason;
  double loglik = 0.0;
  double deviance = 0.0;
  double null_deviance = 0.0;
  long residual_df = 0;
  int iterations = 0;
  bool converged = false;
  std::set<BoundaryFlag> boundary_flags;
  double ci_level = 0.95;
  // Bookkeeping for nested-model comparisons.
  long n_cells = 0;
  std::uint64_t data_fingerprint = 0;

  bool has_flag(BoundaryFlag f) const { return boundary_flags.count(f) > 0; }
};

// Closed-form warm start for the Newton iterations: the cll-scale prevalence
// a design of average pool size would need to produce the observed fraction
// of positive pools.  Returns -inf / +inf when no or all pools are positive.
double le_start(const PooledDataset& data);

// Maximum likelihood fit of the no-covariate model.  lambda_fixed holds the
// excess intensity at the given value; an empty optional frees it (which
// needs at least two distinct pool sizes).
FitResult fit(const PooledDataset& data,
              std::optional<double> lambda_fixed = 0.0,
              double ci_level = 0.95);

// Maximum likelihood fit of the covariate model on the cll scale.  The
// data's covariate vectors must start with the intercept column.
FitResult fit_glm(const PooledDataset& data,
                  std::optional<double> lambda_fixed = 0.0,
                  double ci_level = 0.95);

// Square roots of the covariance diagonal, ordered like terms.  Throws when
// the covariance is unavailable (boundary or unidentifiable fits).
std::vector<double> standard_errors(const FitResult& fit);

struct PrevalencePrediction {
  double theta = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.95;
};

// Predicted unit prevalence for a covariate profile, with a Wald interval
// formed on the linear-predictor scale and mapped through icll.  For fits
// without covariates pass {1} (or an empty vector) as the profile.
PrevalencePrediction predict_prevalence(const FitResult& fit,
                                        const std::vector<double>& x_new,
                                        double level = 0.95);

namespace detail {

// Log-likelihood of the per-cell saturated reference (each aggregated cell
// at its empirical positive fraction); deviances are measured against this.
double saturated_reference_loglik(const PooledDataset& aggregated);

// Covariate fit that uses only the first n_columns covariate columns while
// keeping the full data's cell structure for deviance and degrees of
// freedom.  Used to build sequential ANOVA tables; n_columns = 1 is the
// intercept-only model.
FitResult fit_glm_subset(const PooledDataset& data, std::size_t n_columns,
                         std::optional<double> lambda_fixed,
                         double ci_level = 0.95);

// Shared Newton engine input: maximize sum of row likelihoods with linear
// predictor u = X v + offset, subject to v[lambda_index] >= -1 when
// lambda_index >= 0.
struct NewtonSpec {
  Eigen::MatrixXd X;
  Eigen::VectorXd offset;
  std::vector<int> pool_sizes;
  std::vector<long> pool_counts;
  std::vector<long> positives;
  int lambda_index = -1;
  Eigen::VectorXd start;
};

struct NewtonOutcome {
  Eigen::VectorXd v;
  double loglik = 0.0;
  Eigen::MatrixXd hessian;
  int iterations = 0;
  bool converged = false;
  bool lambda_at_boundary = false;
  // Log-likelihood after the start and after each accepted step; the
  // step-halving rule keeps this sequence non-decreasing.
  std::vector<double> ll_path;
};

NewtonOutcome maximize(const NewtonSpec& spec);

}  // namespace detail

}  // namespace pooltest
