#include "pooltest/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include "pooltest/diagnostics.hpp"
#include "pooltest/distribution.hpp"
#include "pooltest/estimation.hpp"
#include "pooltest/rng.hpp"
#include "pooltest/special_functions.hpp"

namespace pooltest {

PoolSizeLaw PoolSizeLaw::fixed(int s) {
  PoolSizeLaw law;
  law.kind = Kind::kFixed;
  law.fixed_size = s;
  return law;
}

PoolSizeLaw PoolSizeLaw::poisson(double mean) {
  PoolSizeLaw law;
  law.kind = Kind::kPoisson;
  law.poisson_mean = mean;
  return law;
}

PoolSizeLaw PoolSizeLaw::list(std::vector<int> sizes) {
  PoolSizeLaw law;
  law.kind = Kind::kList;
  law.sizes = std::move(sizes);
  return law;
}

namespace {

void check_config(const SimConfig& config) {
  if (config.n_pools <= 0) {
    throw std::invalid_argument("SimConfig: n_pools must be positive");
  }
  if (config.replicates < 0) {
    throw std::invalid_argument("SimConfig: replicates must be non-negative");
  }
  switch (config.law.kind) {
    case PoolSizeLaw::Kind::kFixed:
      if (config.law.fixed_size < 1) {
        throw std::invalid_argument("SimConfig: fixed pool size must be >= 1");
      }
      break;
    case PoolSizeLaw::Kind::kPoisson:
      if (!(config.law.poisson_mean > 0.0) || config.law.poisson_mean >= 700.0) {
        throw std::invalid_argument(
            "SimConfig: Poisson pool-size mean must be in (0, 700)");
      }
      break;
    case PoolSizeLaw::Kind::kList:
      if (config.law.sizes.empty()) {
        throw std::invalid_argument("SimConfig: pool-size list is empty");
      }
      for (int s : config.law.sizes) {
        if (s < 1) {
          throw std::invalid_argument(
              "SimConfig: pool-size list entries must be >= 1");
        }
      }
      break;
  }
  if (config.true_params.parameterization == Parameterization::Beta) {
    throw std::invalid_argument(
        "SimConfig: simulation truth must be on the theta or eta scale");
  }
  if (!(config.level > 0.0 && config.level < 1.0)) {
    throw std::invalid_argument("SimConfig: level must be in (0, 1)");
  }
}

int draw_pool_size(const PoolSizeLaw& law, long pool_index, Rng& rng) {
  switch (law.kind) {
    case PoolSizeLaw::Kind::kFixed:
      return law.fixed_size;
    case PoolSizeLaw::Kind::kPoisson:
      return rng.positive_poisson(law.poisson_mean);
    case PoolSizeLaw::Kind::kList:
      return law.sizes[static_cast<std::size_t>(pool_index) % law.sizes.size()];
  }
  throw std::logic_error("unreachable pool-size law");
}

// Derivative of icll, used to map an eta-scale SE to the theta scale.
double dtheta_deta(double eta) {
  const double w = std::exp(eta);
  return w * std::exp(-w);
}

}  // namespace

PooledDataset simulate_dataset(const SimConfig& config, long replicate_index) {
  check_config(config);
  if (replicate_index < 0) {
    throw std::invalid_argument("simulate_dataset: replicate_index must be >= 0");
  }
  Rng rng(Rng::derive(config.master_seed,
                      static_cast<std::uint64_t>(replicate_index)));

  // Positive-pool probability depends only on pool size here, so cache it.
  std::map<int, double> phi_by_size;
  auto phi_for = [&](int s) {
    auto it = phi_by_size.find(s);
    if (it != phi_by_size.end()) return it->second;
    double phi;
    if (config.true_params.parameterization == Parameterization::Eta) {
      phi = ppp_eta(s, config.true_params.eta, config.true_params.lambda);
    } else {
      phi = ppp(s, config.true_params.theta, config.true_params.lambda);
    }
    phi_by_size.emplace(s, phi);
    return phi;
  };

  // Aggregated (size -> pools, positives) tallies; drawing per pool in a
  // fixed order keeps the replicate reproducible whatever the law produces.
  std::map<int, std::pair<long, long>> cells;
  for (long i = 0; i < config.n_pools; ++i) {
    const int s = draw_pool_size(config.law, i, rng);
    auto& cell = cells[s];
    cell.first += 1;
    if (rng.uniform01() < phi_for(s)) cell.second += 1;
  }

  std::vector<PoolRow> rows;
  rows.reserve(cells.size());
  for (const auto& [s, tally] : cells) {
    PoolRow row;
    row.pool_size = s;
    row.pool_count = tally.first;
    row.positives = tally.second;
    rows.push_back(std::move(row));
  }
  return PooledDataset(std::move(rows));
}

namespace {

struct ReplicateFit {
  enum class Status { kOk, kBoundary, kUnusable };
  Status status = Status::kUnusable;
  FitResult fit;
};

ReplicateFit fit_replicate(const SimConfig& config, long replicate_index) {
  ReplicateFit out;
  PooledDataset data = simulate_dataset(config, replicate_index);
  std::optional<double> lambda_fixed;
  if (!config.free_lambda) lambda_fixed = config.true_params.lambda;
  try {
    out.fit = fit(data, lambda_fixed, config.level);
  } catch (const std::exception&) {
    return out;
  }
  if (out.fit.has_flag(BoundaryFlag::kThetaZero) ||
      out.fit.has_flag(BoundaryFlag::kThetaOne)) {
    out.status = ReplicateFit::Status::kBoundary;
    return out;
  }
  if (!out.fit.converged || !out.fit.covariance_available) {
    return out;
  }
  out.status = ReplicateFit::Status::kOk;
  return out;
}

}  // namespace

CoverageSummary coverage_study(const SimConfig& config, double level) {
  check_config(config);
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("coverage_study: level must be in (0, 1)");
  }
  const double theta_true = config.true_params.theta;
  const double lambda_true = config.true_params.lambda;
  const double z = normal_quantile(1.0 - (1.0 - level) / 2.0);

  CoverageSummary summary;
  summary.level = level;
  summary.replicates = config.replicates;
  summary.rng_algorithm = Rng::algorithm();

  long hits_theta = 0;
  long hits_lambda = 0;
  double bias_sum = 0.0;
  double se_sum = 0.0;
  for (int r = 0; r < config.replicates; ++r) {
    ReplicateFit rep = fit_replicate(config, r);
    if (rep.status == ReplicateFit::Status::kBoundary) {
      ++summary.boundary_count;
      continue;
    }
    if (rep.status != ReplicateFit::Status::kOk) {
      ++summary.nonconverged_count;
      continue;
    }
    const FitResult& f = rep.fit;
    const double eta_hat = f.estimates.eta;
    const double se_eta = std::sqrt(f.covariance(0, 0));
    const double lo = icll(eta_hat - z * se_eta);
    const double hi = icll(eta_hat + z * se_eta);
    if (lo <= theta_true && theta_true <= hi) ++hits_theta;
    if (config.free_lambda) {
      const int k = static_cast<int>(f.covariance.rows()) - 1;
      const double se_lambda = std::sqrt(f.covariance(k, k));
      if (std::abs(f.estimates.lambda - lambda_true) <= z * se_lambda) {
        ++hits_lambda;
      }
    }
    bias_sum += icll(eta_hat) - theta_true;
    se_sum += se_eta * dtheta_deta(eta_hat);
    ++summary.used;
  }

  if (summary.used > 0) {
    summary.coverage_theta = static_cast<double>(hits_theta) / summary.used;
    summary.mean_bias = bias_sum / summary.used;
    summary.mean_se = se_sum / summary.used;
    summary.coverage_lambda =
        config.free_lambda
            ? static_cast<double>(hits_lambda) / summary.used
            : std::numeric_limits<double>::quiet_NaN();
  } else {
    summary.coverage_theta = std::numeric_limits<double>::quiet_NaN();
    summary.coverage_lambda = std::numeric_limits<double>::quiet_NaN();
    summary.mean_bias = std::numeric_limits<double>::quiet_NaN();
    summary.mean_se = std::numeric_limits<double>::quiet_NaN();
  }
  return summary;
}

CalibrationSummary lambda_calibration_study(const SimConfig& config) {
  check_config(config);
  SimConfig free_config = config;
  free_config.free_lambda = true;

  CalibrationSummary summary;
  summary.replicates = config.replicates;
  summary.rng_algorithm = Rng::algorithm();
  summary.p_values.reserve(static_cast<std::size_t>(config.replicates));

  for (int r = 0; r < config.replicates; ++r) {
    ReplicateFit rep = fit_replicate(free_config, r);
    if (rep.status == ReplicateFit::Status::kBoundary) {
      ++summary.boundary_count;
      continue;
    }
    if (rep.status != ReplicateFit::Status::kOk) {
      ++summary.nonconverged_count;
      continue;
    }
    try {
      WaldTest test = wald_test_lambda(rep.fit, false);
      summary.p_values.push_back(test.p_value);
      ++summary.used;
    } catch (const std::exception&) {
      ++summary.nonconverged_count;
    }
  }

  summary.ks_distance = kolmogorov_distance_uniform(summary.p_values);
  return summary;
}

double kolmogorov_distance_uniform(std::vector<double> values) {
  if (values.empty()) return 1.0;
  std::sort(values.begin(), values.end());
  const double n = static_cast<double>(values.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double u = values[i];
    const double below = u - static_cast<double>(i) / n;
    const double above = static_cast<double>(i + 1) / n - u;
    dist = std::max(dist, std::max(below, above));
  }
  return dist;
}

}  // namespace pooltest
