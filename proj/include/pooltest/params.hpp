#pragma once

#include <vector>

namespace pooltest {

// Complementary log-log link and its inverse.  cll maps (0, 1) onto the real
// line, with cll(0) = -inf and cll(1) = +inf; icll is the exact inverse
// including those limits.
double cll(double theta);
double icll(double eta);

enum class Parameterization { Theta, Eta, Beta };

// Parameter state for the pooled testing model.  A parameter set always
// carries the excess intensity lambda (lambda >= -1; lambda = 0 means the
// chance a pool tests positive is exactly the chance it contains a positive
// unit).  The prevalence part is held in one of three equivalent views:
//   Theta: prevalence theta in [0, 1]
//   Eta:   linked prevalence eta = cll(theta)
//   Beta:  regression coefficients on the cll scale, intercept first
// Theta and Eta views keep both fields materialized and consistent.
struct ModelParams {
  Parameterization parameterization = Parameterization::Theta;
  double theta = 0.0;
  double eta = 0.0;
  std::vector<double> beta;
  double lambda = 0.0;
  bool lambda_fixed = true;

  static ModelParams theta_lambda(double theta, double lambda,
                                  bool lambda_fixed = true);
  static ModelParams eta_lambda(double eta, double lambda,
                                bool lambda_fixed = true);
  static ModelParams beta_lambda(std::vector<double> beta, double lambda,
                                 bool lambda_fixed = true);

  // Number of freely-varying parameters (coefficients plus lambda when it is
  // not held fixed).
  std::size_t free_parameter_count() const;
};

}  // namespace pooltest
