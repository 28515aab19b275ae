#include "pooltest/information.hpp"

#include <cmath>
#include <stdexcept>

#include "pooltest/distribution.hpp"
#include "pooltest/special_functions.hpp"

namespace pooltest {

namespace {

void check_interior_theta(double theta) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw std::domain_error("theta must lie strictly inside (0, 1)");
  }
}

void check_costs(double a, double t) {
  if (!(a >= 0.0) || !(t >= 0.0)) {
    throw std::invalid_argument("costs must be nonnegative");
  }
  if (a + t <= 0.0) {
    throw std::invalid_argument("at least one of the costs must be positive");
  }
}

// log of unit_information, stable where the linear-scale factors underflow
// (large pools at prevalences near 1).
double log_unit_information(int s, double theta, double lambda) {
  double p = pool_power(s, lambda);
  double log_1m = std::log1p(-theta);
  double log_s = std::log(static_cast<double>(s));
  // log phi = log(1 - (1-theta)^p) via the stable complement.
  double log_phi = log1mexp(-p * log_1m);
  return (2.0 * lambda + 1.0) * log_s + (p - 2.0) * log_1m - log_phi;
}

double log_ipuc(int s, double theta, double lambda, double a, double t) {
  return log_unit_information(s, theta, lambda) -
         std::log(a + t / static_cast<double>(s));
}

// theta and lambda extracted from a parameter set for information purposes;
// the coefficient view has no single prevalence.
void extract_theta_lambda(const ModelParams& params, double* theta,
                          double* lambda) {
  if (params.parameterization == Parameterization::Beta) {
    throw std::invalid_argument(
        "information matrices are defined for the (theta, lambda) and "
        "(eta, lambda) views");
  }
  *theta = params.theta;
  *lambda = params.lambda;
}

// Shared summands: r_i = n_i s_i^{2(1+lambda)} (1-phi_i)/phi_i together with
// their log s and log^2 s weighted totals.
struct RSums {
  double plain = 0.0;
  double log_s = 0.0;
  double log2_s = 0.0;
};

RSums r_sums(const std::vector<int>& pool_sizes,
             const std::vector<long>& pool_counts, double theta,
             double lambda) {
  if (pool_sizes.empty() || pool_sizes.size() != pool_counts.size()) {
    throw std::invalid_argument(
        "design needs matching nonempty pool_sizes and pool_counts");
  }
  double log_1m = std::log1p(-theta);
  RSums sums;
  for (std::size_t i = 0; i < pool_sizes.size(); ++i) {
    int s = pool_sizes[i];
    long n = pool_counts[i];
    if (s < 1 || n < 1) {
      throw std::invalid_argument("design entries must be positive");
    }
    double p = pool_power(s, lambda);
    // (1-phi)/phi = 1 / (e^{-p log(1-theta)} - 1)
    double odds_inv = 1.0 / std::expm1(-p * log_1m);
    double log_s = std::log(static_cast<double>(s));
    double r = static_cast<double>(n) * p * p * odds_inv;
    sums.plain += r;
    sums.log_s += r * log_s;
    sums.log2_s += r * log_s * log_s;
  }
  return sums;
}

}  // namespace

double unit_information(int s, double theta, double lambda) {
  if (s < 1) throw std::domain_error("pool size must be >= 1");
  if (std::isnan(lambda) || lambda < -1.0) {
    throw std::domain_error("lambda must be >= -1");
  }
  check_interior_theta(theta);
  return std::exp(log_unit_information(s, theta, lambda));
}

InfoMatrix fisher_information(const std::vector<int>& pool_sizes,
                              const std::vector<long>& pool_counts,
                              const ModelParams& params) {
  double theta, lambda;
  extract_theta_lambda(params, &theta, &lambda);
  check_interior_theta(theta);
  RSums sums = r_sums(pool_sizes, pool_counts, theta, lambda);
  double log_1m = std::log1p(-theta);
  double om = 1.0 - theta;
  InfoMatrix info;
  info.parameterization = Parameterization::Theta;
  info.pool_sizes = pool_sizes;
  info.pool_counts = pool_counts;
  info.entries(0, 0) = sums.plain / (om * om);
  info.entries(0, 1) = -(log_1m / om) * sums.log_s;
  info.entries(1, 0) = info.entries(0, 1);
  info.entries(1, 1) = log_1m * log_1m * sums.log2_s;
  return info;
}

InfoMatrix fisher_information(const PooledDataset& design,
                              const ModelParams& params) {
  std::vector<int> s;
  std::vector<long> n;
  for (const PoolRow& r : design.rows()) {
    s.push_back(r.pool_size);
    n.push_back(r.pool_count);
  }
  return fisher_information(s, n, params);
}

InfoMatrix fisher_information_eta(const std::vector<int>& pool_sizes,
                                  const std::vector<long>& pool_counts,
                                  const ModelParams& params) {
  double theta, lambda;
  extract_theta_lambda(params, &theta, &lambda);
  check_interior_theta(theta);
  RSums sums = r_sums(pool_sizes, pool_counts, theta, lambda);
  // e^{2 eta} = log^2(1-theta); the matrix is e^{2 eta} times the Gram
  // matrix of (1, log s) under the weights r_i, so it is symmetric positive
  // semi-definite by construction.
  double log_1m = std::log1p(-theta);
  double scale = log_1m * log_1m;
  InfoMatrix info;
  info.parameterization = Parameterization::Eta;
  info.pool_sizes = pool_sizes;
  info.pool_counts = pool_counts;
  info.entries(0, 0) = scale * sums.plain;
  info.entries(0, 1) = scale * sums.log_s;
  info.entries(1, 0) = info.entries(0, 1);
  info.entries(1, 1) = scale * sums.log2_s;
  return info;
}

InfoMatrix fisher_information_eta(const PooledDataset& design,
                                  const ModelParams& params) {
  std::vector<int> s;
  std::vector<long> n;
  for (const PoolRow& r : design.rows()) {
    s.push_back(r.pool_size);
    n.push_back(r.pool_count);
  }
  return fisher_information_eta(s, n, params);
}

double ipuc(int s, double theta, double lambda, double cost_sample,
            double cost_test) {
  check_costs(cost_sample, cost_test);
  if (s < 1) throw std::domain_error("pool size must be >= 1");
  check_interior_theta(theta);
  return std::exp(log_ipuc(s, theta, lambda, cost_sample, cost_test));
}

int optimal_pool_size(double theta, double lambda, double cost_sample,
                      double cost_test, int s_max) {
  check_costs(cost_sample, cost_test);
  check_interior_theta(theta);
  if (s_max < 1) throw std::invalid_argument("s_max must be >= 1");
  // Exhaustive scan in log space; the curve is not monotone for general
  // lambda and linear-scale values can underflow for large pools.
  int best = 1;
  double best_log = log_ipuc(1, theta, lambda, cost_sample, cost_test);
  for (int s = 2; s <= s_max; ++s) {
    double cand = log_ipuc(s, theta, lambda, cost_sample, cost_test);
    if (cand > best_log) {
      best = s;
      best_log = cand;
    }
  }
  return best;
}

DesignTable prevalence_cutoffs(int s_max, double lambda, double cost_sample,
                               double cost_test) {
  check_costs(cost_sample, cost_test);
  if (s_max < 2) throw std::invalid_argument("s_max must be >= 2");
  DesignTable table;
  table.lambda = lambda;
  table.cost_sample = cost_sample;
  table.cost_test = cost_test;
  const double lo_edge = 1e-9;
  const double hi_edge = 1.0 - 1e-9;
  for (int s = 1; s <= s_max; ++s) {
    // Root of ipuc(s+1) - ipuc(s) in theta: positive near 0 (larger pools
    // win at low prevalence), negative near 1.
    auto gap = [&](double theta) {
      return log_ipuc(s + 1, theta, lambda, cost_sample, cost_test) -
             log_ipuc(s, theta, lambda, cost_sample, cost_test);
    };
    double lo = lo_edge;
    double hi = hi_edge;
    double glo = gap(lo);
    double ghi = gap(hi);
    if (!(glo > 0.0 && ghi < 0.0)) {
      throw std::runtime_error(
          "prevalence_cutoffs: information-per-unit-cost curves do not cross "
          "for these costs and lambda");
    }
    while (hi - lo > 1e-9) {
      double mid = 0.5 * (lo + hi);
      if (gap(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    table.rows.push_back({s, 0.5 * (lo + hi)});
  }
  return table;
}

}  // namespace pooltest
