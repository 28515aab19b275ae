#include "pooltest/params.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace pooltest {

double cll(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::domain_error("cll: theta must lie in [0, 1]");
  }
  if (theta == 0.0) return -std::numeric_limits<double>::infinity();
  if (theta == 1.0) return std::numeric_limits<double>::infinity();
  return std::log(-std::log1p(-theta));
}

double icll(double eta) {
  if (std::isnan(eta)) throw std::domain_error("icll: eta is NaN");
  // -expm1(-exp(eta)) evaluates the two infinite limits correctly and is
  // accurate for very negative eta where 1 - exp(...) would cancel.
  return -std::expm1(-std::exp(eta));
}

namespace {
void check_lambda(double lambda) {
  if (std::isnan(lambda) || lambda < -1.0) {
    throw std::domain_error("ModelParams: lambda must be >= -1");
  }
}
}  // namespace

ModelParams ModelParams::theta_lambda(double theta, double lambda,
                                      bool lambda_fixed) {
  check_lambda(lambda);
  ModelParams p;
  p.parameterization = Parameterization::Theta;
  p.theta = theta;
  p.eta = cll(theta);
  p.lambda = lambda;
  p.lambda_fixed = lambda_fixed;
  return p;
}

ModelParams ModelParams::eta_lambda(double eta, double lambda,
                                    bool lambda_fixed) {
  check_lambda(lambda);
  if (std::isnan(eta)) throw std::domain_error("ModelParams: eta is NaN");
  ModelParams p;
  p.parameterization = Parameterization::Eta;
  p.eta = eta;
  p.theta = icll(eta);
  p.lambda = lambda;
  p.lambda_fixed = lambda_fixed;
  return p;
}

ModelParams ModelParams::beta_lambda(std::vector<double> beta, double lambda,
                                     bool lambda_fixed) {
  check_lambda(lambda);
  if (beta.empty()) {
    throw std::invalid_argument("ModelParams: beta must be nonempty");
  }
  ModelParams p;
  p.parameterization = Parameterization::Beta;
  p.beta = std::move(beta);
  p.theta = std::numeric_limits<double>::quiet_NaN();
  p.eta = std::numeric_limits<double>::quiet_NaN();
  p.lambda = lambda;
  p.lambda_fixed = lambda_fixed;
  return p;
}

std::size_t ModelParams::free_parameter_count() const {
  std::size_t k =
      parameterization == Parameterization::Beta ? beta.size() : 1u;
  return k + (lambda_fixed ? 0u : 1u);
}

}  // namespace pooltest
