#include "pooltest/likelihood.hpp"

#include <cmath>
#include <stdexcept>

#include "pooltest/distribution.hpp"

namespace pooltest {

namespace {

// Direct (theta, lambda) derivatives.  With p = s^{1+lambda}, L = log(1-theta)
// and phi the positive-pool probability of the row:
//   dl/dtheta   = -(1/(1-theta)) sum p (n - y/phi)
//   dl/dlambda  = L sum p log(s) (n - y/phi)
//   d2l/dtheta2      = -(1/(1-theta)^2) sum p [n - (y/phi)(1 - p (1-phi)/phi)]
//   d2l/dtheta dlam  = -(1/(1-theta))   sum p log(s)   [n - (y/phi)(1 + L p (1-phi)/phi)]
//   d2l/dlambda2     = L                sum p log(s)^2 [n - (y/phi)(1 + L p (1-phi)/phi)]
ScoreAndCurvature theta_score(const PooledDataset& data,
                              const ModelParams& params) {
  double theta = params.theta;
  double lambda = params.lambda;
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::domain_error(
        "score/hessian need theta strictly inside (0, 1); at the boundary "
        "every positive count has probability zero or one");
  }
  double L = std::log1p(-theta);
  double om = 1.0 - theta;
  double ll = 0.0;
  double s_plain = 0.0, s_logs = 0.0;
  double h_tt = 0.0, h_tl = 0.0, h_ll = 0.0;
  for (const PoolRow& r : data.rows()) {
    double p = pool_power(r.pool_size, lambda);
    double logs = std::log(static_cast<double>(r.pool_size));
    detail::RowTerms t = detail::row_terms_from_w(p * (-L));
    ll += detail::row_log_mass(r.pool_count, r.positives, t);
    double n = static_cast<double>(r.pool_count);
    double yphi =
        r.positives == 0 ? 0.0 : static_cast<double>(r.positives) / t.phi;
    double odds = 1.0 / std::expm1(t.w);  // (1-phi)/phi, 0 once expm1 overflows
    double d = n - yphi;
    double br_tt = n - yphi * (1.0 - p * odds);
    double br_mix = n - yphi * (1.0 + L * p * odds);
    s_plain += p * d;
    s_logs += p * logs * d;
    h_tt += p * br_tt;
    h_tl += p * logs * br_mix;
    h_ll += p * logs * logs * br_mix;
  }
  ScoreAndCurvature out;
  out.parameterization = Parameterization::Theta;
  out.lambda_included = !params.lambda_fixed;
  out.loglik = ll;
  int dim = out.lambda_included ? 2 : 1;
  out.gradient.resize(dim);
  out.hessian.resize(dim, dim);
  out.gradient(0) = -s_plain / om;
  out.hessian(0, 0) = -h_tt / (om * om);
  if (out.lambda_included) {
    out.gradient(1) = L * s_logs;
    out.hessian(0, 1) = -h_tl / om;
    out.hessian(1, 0) = out.hessian(0, 1);
    out.hessian(1, 1) = L * h_ll;
  }
  return out;
}

// (eta, lambda) and coefficient derivatives through the shared row kernel:
// the linear predictor u enters each row only through w = e^u, and u is
// linear in the free parameters, so gradient and Hessian are weighted sums
// of the per-row u-derivatives.
ScoreAndCurvature linear_score(const PooledDataset& data,
                               const ModelParams& params) {
  bool is_beta = params.parameterization == Parameterization::Beta;
  if (is_beta && !data.has_covariates()) {
    throw std::invalid_argument(
        "coefficient parameterization requires covariates in the data");
  }
  std::size_t n_coef = is_beta ? params.beta.size() : 1u;
  bool with_lambda = !params.lambda_fixed;
  int dim = static_cast<int>(n_coef) + (with_lambda ? 1 : 0);

  ScoreAndCurvature out;
  out.parameterization = params.parameterization;
  out.lambda_included = with_lambda;
  out.gradient = Eigen::VectorXd::Zero(dim);
  out.hessian = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd dv(dim);
  for (const PoolRow& r : data.rows()) {
    detail::RowTerms t =
        detail::row_terms_from_w(detail::row_w(r, params));
    out.loglik += detail::row_log_mass(r.pool_count, r.positives, t);
    if ((t.w == 0.0 && r.positives > 0) ||
        (std::isinf(t.w) && r.positives < r.pool_count)) {
      throw std::domain_error(
          "score/hessian undefined: a row's positive count has probability "
          "zero at these boundary parameters");
    }
    double l1 = detail::row_dloglik(r.pool_count, r.positives, t);
    double l2 = detail::row_d2loglik(r.pool_count, r.positives, t);
    if (is_beta) {
      for (std::size_t j = 0; j < n_coef; ++j) dv(j) = r.covariates[j];
    } else {
      dv(0) = 1.0;
    }
    if (with_lambda) {
      dv(dim - 1) = std::log(static_cast<double>(r.pool_size));
    }
    out.gradient += l1 * dv;
    out.hessian.noalias() += l2 * (dv * dv.transpose());
  }
  return out;
}

}  // namespace

double loglik(const PooledDataset& data, const ModelParams& params) {
  return poolbin_log_mass(data, params);
}

ScoreAndCurvature score_and_curvature(const PooledDataset& data,
                                      const ModelParams& params) {
  if (params.parameterization == Parameterization::Theta) {
    return theta_score(data, params);
  }
  return linear_score(data, params);
}

Eigen::VectorXd score(const PooledDataset& data, const ModelParams& params) {
  return score_and_curvature(data, params).gradient;
}

Eigen::MatrixXd hessian(const PooledDataset& data, const ModelParams& params) {
  return score_and_curvature(data, params).hessian;
}

}  // namespace pooltest
