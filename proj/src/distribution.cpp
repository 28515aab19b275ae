#include "pooltest/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pooltest/rng.hpp"
#include "pooltest/special_functions.hpp"

namespace pooltest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_s(int s) {
  if (s < 1) throw std::domain_error("pool size must be >= 1");
}

void check_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::domain_error("theta must lie in [0, 1]");
  }
}

void check_lambda(double lambda) {
  if (std::isnan(lambda) || lambda < -1.0) {
    throw std::domain_error("lambda must be >= -1");
  }
}

// P(Binomial(s, theta) >= l) for l >= 1, summed term by term in log space.
double binomial_upper_tail(int s, int l, double log_theta, double log_1m) {
  double tail = 0.0;
  for (int j = l; j <= s; ++j) {
    tail += std::exp(log_choose(s, j) + j * log_theta + (s - j) * log_1m);
  }
  return tail;
}

}  // namespace

double pool_power(int s, double lambda) {
  check_s(s);
  check_lambda(lambda);
  if (lambda == 0.0 || s == 1) return static_cast<double>(s);
  return std::exp((1.0 + lambda) * std::log(static_cast<double>(s)));
}

double ppp(int s, double theta, double lambda) {
  check_s(s);
  check_theta(theta);
  check_lambda(lambda);
  if (s == 1) return theta;
  if (theta == 0.0) return 0.0;
  if (theta == 1.0) return 1.0;
  return -std::expm1(pool_power(s, lambda) * std::log1p(-theta));
}

double ppp_eta(int s, double eta, double lambda) {
  check_lambda(lambda);
  if (std::isnan(eta)) throw std::domain_error("ppp_eta: eta is NaN");
  double p = pool_power(s, lambda);
  if (eta == -kInf) return 0.0;
  if (eta == kInf) return 1.0;
  return -std::expm1(-p * std::exp(eta));
}

double ppp_from_h(int s, double theta, const HFunction& h) {
  check_s(s);
  check_theta(theta);
  if (theta == 1.0) return h(s, s);
  double prev = h(s, 0);
  double result = prev;
  if (theta == 0.0) return result;
  // Summation by parts: E[h(s, L)] = h(s, 0) + sum_l (h(s,l) - h(s,l-1)) P(L >= l).
  // The l = 1 tail is evaluated as -expm1(s log(1-theta)) so a 0/1 step
  // function at l = 1 collapses to exactly the perfect-test curve.
  double log_1m = std::log1p(-theta);
  double log_theta = std::log(theta);
  for (int l = 1; l <= s; ++l) {
    double hl = h(s, l);
    double diff = hl - prev;
    prev = hl;
    if (diff == 0.0) continue;
    double tail = (l == 1) ? -std::expm1(s * log_1m)
                           : binomial_upper_tail(s, l, log_theta, log_1m);
    result += diff * tail;
  }
  return result;
}

namespace detail {

RowTerms row_terms_from_w(double w) {
  if (std::isnan(w) || w < 0.0) {
    throw std::domain_error("row_terms_from_w: w must be >= 0");
  }
  RowTerms t;
  t.w = w;
  if (w == 0.0) {
    t.phi = 0.0;
    t.winv = 1.0;  // limit of w / (e^w - 1)
    return t;
  }
  if (std::isinf(w)) {
    t.phi = 1.0;
    t.winv = 0.0;
    return t;
  }
  t.phi = -std::expm1(-w);
  t.winv = w / std::expm1(w);  // 0 once expm1 overflows
  return t;
}

RowTerms row_terms_from_u(double u) {
  return row_terms_from_w(std::exp(std::clamp(u, -700.0, 700.0)));
}

double row_log_mass(long n, long y, const RowTerms& t) {
  double ll = log_choose(n, y);
  if (y < n) ll -= static_cast<double>(n - y) * t.w;
  if (y > 0) ll += static_cast<double>(y) * log1mexp(t.w);
  return ll;
}

double row_dloglik(long n, long y, const RowTerms& t) {
  double g = static_cast<double>(y) * t.winv;
  if (y < n) g -= static_cast<double>(n - y) * t.w;
  return g;
}

double row_d2loglik(long n, long y, const RowTerms& t) {
  double curv = 0.0;
  if (t.winv != 0.0) {
    curv = static_cast<double>(y) * t.winv * (1.0 - t.w - t.winv);
  }
  if (y < n) curv -= static_cast<double>(n - y) * t.w;
  return curv;
}

// Rate w_i = s_i^{1+lambda} (-log(1-theta_i)) of the row under the given
// parameter view; the boundaries theta in {0,1} map to w in {0, inf}.
double row_w(const PoolRow& row, const ModelParams& params) {
  double p = pool_power(row.pool_size, params.lambda);
  switch (params.parameterization) {
    case Parameterization::Theta:
      if (!(params.theta >= 0.0 && params.theta <= 1.0)) {
        throw std::domain_error("theta must lie in [0, 1]");
      }
      if (params.theta == 1.0) return kInf;
      return p * (-std::log1p(-params.theta));
    case Parameterization::Eta:
      if (params.eta == -kInf) return 0.0;
      if (params.eta == kInf) return kInf;
      return p * std::exp(params.eta);
    case Parameterization::Beta: {
      if (row.covariates.size() != params.beta.size()) {
        throw std::invalid_argument(
            "coefficient vector length does not match the data's covariate "
            "columns");
      }
      double u = (1.0 + params.lambda) *
                 std::log(static_cast<double>(row.pool_size));
      for (std::size_t j = 0; j < params.beta.size(); ++j) {
        u += row.covariates[j] * params.beta[j];
      }
      return std::exp(u);  // overflow to inf is the correct limit
    }
  }
  throw std::logic_error("row_w: unknown parameterization");
}

}  // namespace detail

double poolbin_log_mass(const PooledDataset& data, const ModelParams& params) {
  if (params.parameterization == Parameterization::Beta &&
      !data.has_covariates()) {
    throw std::invalid_argument(
        "coefficient parameterization requires covariates in the data");
  }
  double ll = 0.0;
  for (const PoolRow& r : data.rows()) {
    detail::RowTerms t = detail::row_terms_from_w(detail::row_w(r, params));
    ll += detail::row_log_mass(r.pool_count, r.positives, t);
  }
  return ll;
}

PooledDataset sample(const PooledDataset& design, const ModelParams& params,
                     std::uint64_t seed) {
  Rng rng(seed);
  std::vector<PoolRow> rows = design.rows();
  for (PoolRow& r : rows) {
    double phi = detail::row_terms_from_w(detail::row_w(r, params)).phi;
    r.positives = rng.binomial(r.pool_count, phi);
  }
  return PooledDataset(std::move(rows), design.covariate_names());
}

}  // namespace pooltest
