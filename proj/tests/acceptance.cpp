// Acceptance harness: runs the project's ten exit checks and prints one
// [PASS]/[FAIL] line per check (the mosquito check prints [SKIP] when the
// transcribed dataset is absent).  Exit status is the failure count.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "pooltest/cli.hpp"
#include "pooltest/csv.hpp"
#include "pooltest/diagnostics.hpp"
#include "pooltest/distribution.hpp"
#include "pooltest/estimation.hpp"
#include "pooltest/information.hpp"
#include "pooltest/likelihood.hpp"
#include "pooltest/simulation.hpp"
#include "pooltest/special_functions.hpp"

using namespace pooltest;

namespace {

struct Outcome {
  enum class Status { kPass, kFail, kSkip };
  Status status = Status::kFail;
  std::string note;

  static Outcome pass(std::string note) {
    return {Status::kPass, std::move(note)};
  }
  static Outcome fail(std::string note) {
    return {Status::kFail, std::move(note)};
  }
  static Outcome skip(std::string note) {
    return {Status::kSkip, std::move(note)};
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

PooledDataset single(int s, long n, long y) {
  std::vector<PoolRow> rows(1);
  rows[0].pool_size = s;
  rows[0].pool_count = n;
  rows[0].positives = y;
  return PooledDataset(rows);
}

// Reference prevalence cutoffs for pool sizes 1..40 with zero sampling cost
// and unit testing cost, frozen to six decimals.
constexpr double kReferenceCutoffs[40] = {
    0.666682, 0.475310, 0.367461, 0.299097, 0.252064, 0.217754, 0.191641,
    0.171107, 0.154539, 0.140893, 0.129457, 0.119737, 0.111373, 0.104101,
    0.097719, 0.092074, 0.087045, 0.082537, 0.078472, 0.074789, 0.071436,
    0.068371, 0.065558, 0.063006, 0.060612, 0.058394, 0.056333, 0.054412,
    0.052618, 0.050938, 0.049363, 0.047882, 0.046487, 0.045172, 0.043928,
    0.042752, 0.041636, 0.040578, 0.039572, 0.038615};

Outcome criterion_cutoff_table() {
  std::ostringstream out;
  std::ostringstream err;
  const int status =
      run_cli({"design", "--table", "--max-pool", "40"}, out, err);
  if (status != 0) {
    return Outcome::fail("design subcommand exited with " +
                         std::to_string(status));
  }
  std::istringstream lines(out.str());
  std::string line;
  if (!std::getline(lines, line) || line != "pool_size,cutoff") {
    return Outcome::fail("unexpected header: " + line);
  }
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    if (!std::getline(lines, line)) {
      return Outcome::fail("table ended after " + std::to_string(i) +
                           " rows");
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos ||
        std::stoi(line.substr(0, comma)) != i + 1) {
      return Outcome::fail("unexpected row: " + line);
    }
    const double cutoff = std::stod(line.substr(comma + 1));
    worst = std::max(worst, std::abs(cutoff - kReferenceCutoffs[i]));
  }
  if (worst >= 1e-4) {
    return Outcome::fail("max cutoff deviation " + fmt(worst));
  }
  return Outcome::pass("max cutoff deviation " + fmt(worst));
}

Outcome criterion_closed_form() {
  std::mt19937_64 gen(7001);
  std::uniform_int_distribution<int> s_draw(1, 100);
  std::uniform_int_distribution<long> n_draw(1, 500);
  std::uniform_real_distribution<double> l_draw(-0.95, 1.5);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int s = s_draw(gen);
    const long n = n_draw(gen);
    const long y = std::uniform_int_distribution<long>(0, n)(gen);
    const double lambda = l_draw(gen);
    const double closed =
        1.0 - std::pow(1.0 - static_cast<double>(y) / n,
                       std::pow(s, -(1.0 + lambda)));
    const FitResult fr = fit(single(s, n, y), lambda);
    worst = std::max(worst, std::abs(fr.estimates.theta - closed));
  }
  if (worst >= 1e-9) {
    return Outcome::fail("max estimator deviation " + fmt(worst));
  }
  return Outcome::pass("max estimator deviation " + fmt(worst));
}

// Central finite differences of a scalar function of a parameter vector,
// used to cross-check the analytic score and curvature.
using ParamFn = std::function<double(const std::vector<double>&)>;

double fd_gradient(const ParamFn& f, std::vector<double> x, std::size_t i) {
  const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
  std::vector<double> hi = x;
  std::vector<double> lo = x;
  hi[i] += h;
  lo[i] -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

double fd_hessian_at(const ParamFn& f, double hi_step, double hj_step,
                     std::vector<double> x, std::size_t i, std::size_t j) {
  if (i == j) {
    std::vector<double> up = x;
    std::vector<double> dn = x;
    up[i] += hi_step;
    dn[i] -= hi_step;
    return (f(up) - 2.0 * f(x) + f(dn)) / (hi_step * hi_step);
  }
  std::vector<double> pp = x, pm = x, mp = x, mm = x;
  pp[i] += hi_step;
  pp[j] += hj_step;
  pm[i] += hi_step;
  pm[j] -= hj_step;
  mp[i] -= hi_step;
  mp[j] += hj_step;
  mm[i] -= hi_step;
  mm[j] -= hj_step;
  return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi_step * hj_step);
}

// Richardson-extrapolated second differences.  A single step cannot serve
// every test point: eps * |loglik| / h^2 roundoff wants h large while the
// h^2 truncation from fourth derivatives wants it small, and the two
// requirements collide when a Hessian entry is orders of magnitude smaller
// than the fourth derivatives around it.  Combining steps h and h/2 cancels
// the h^2 truncation term, leaving both error sources well under the
// comparison tolerance.  The caller supplies one scale per coordinate: near
// the theta boundary the derivatives have 1/theta^k poles, so the theta step
// shrinks with theta itself.
double fd_hessian(const ParamFn& f, const std::vector<double>& scales,
                  const std::vector<double>& x, std::size_t i,
                  std::size_t j) {
  const double hi_step = 1e-3 * scales[i];
  const double hj_step = 1e-3 * scales[j];
  const double full = fd_hessian_at(f, hi_step, hj_step, x, i, j);
  const double half = fd_hessian_at(f, hi_step / 2, hj_step / 2, x, i, j);
  return (4.0 * half - full) / 3.0;
}

double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
}

Outcome criterion_derivatives() {
  std::mt19937_64 gen(7003);
  std::uniform_int_distribution<int> s_draw(2, 40);
  std::uniform_int_distribution<long> n_draw(3, 30);
  double worst = 0.0;

  auto random_data = [&](bool covariates) {
    std::vector<PoolRow> rows(3);
    for (auto& row : rows) {
      row.pool_size = s_draw(gen);
      row.pool_count = n_draw(gen);
      row.positives =
          std::uniform_int_distribution<long>(1, row.pool_count - 1)(gen);
      if (covariates) {
        row.covariates = {1.0,
                          std::uniform_real_distribution<double>(-1, 1)(gen)};
      }
    }
    return PooledDataset(rows);
  };

  // A point only counts as interior when every row's positive-pool
  // probability sits strictly inside (0, 1) in double precision; keeping
  // -log(1 - phi) under 20 guarantees that with a wide margin.
  auto interior = [](const PooledDataset& data, const ModelParams& params) {
    for (const PoolRow& row : data.rows()) {
      if (detail::row_w(row, params) > 20.0) return false;
    }
    return true;
  };

  auto check_point = [&](const ParamFn& f, const ScoreAndCurvature& sc,
                         const std::vector<double>& x,
                         const std::vector<double>& scales) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, rel_err(sc.gradient(i), fd_gradient(f, x, i)));
      for (std::size_t j = 0; j <= i; ++j) {
        worst = std::max(
            worst, rel_err(sc.hessian(i, j), fd_hessian(f, scales, x, i, j)));
      }
    }
  };

  auto draw_interior = [&](const PooledDataset& data,
                           const std::function<ModelParams(
                               std::vector<double>&)>& draw_params) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::vector<double> x;
      const ModelParams params = draw_params(x);
      if (interior(data, params)) return std::make_pair(x, params);
    }
    throw std::runtime_error("no interior point found in 1000 draws");
  };

  for (int rep = 0; rep < 200; ++rep) {
    {
      const PooledDataset data = random_data(false);
      const auto [x, params] =
          draw_interior(data, [&](std::vector<double>& x) {
            x = {std::uniform_real_distribution<double>(0.03, 0.5)(gen),
                 std::uniform_real_distribution<double>(-0.6, 1.0)(gen)};
            return ModelParams::theta_lambda(x[0], x[1], false);
          });
      ParamFn f = [&](const std::vector<double>& v) {
        return loglik(data, ModelParams::theta_lambda(v[0], v[1], false));
      };
      check_point(f, score_and_curvature(data, params), x,
                  {x[0] * (1.0 - x[0]), 1.0});
    }
    {
      const PooledDataset data = random_data(false);
      const auto [x, params] =
          draw_interior(data, [&](std::vector<double>& x) {
            x = {std::uniform_real_distribution<double>(-5.0, 0.0)(gen),
                 std::uniform_real_distribution<double>(-0.6, 1.0)(gen)};
            return ModelParams::eta_lambda(x[0], x[1], false);
          });
      ParamFn f = [&](const std::vector<double>& v) {
        return loglik(data, ModelParams::eta_lambda(v[0], v[1], false));
      };
      check_point(f, score_and_curvature(data, params), x,
                  {std::max(1.0, std::abs(x[0])), 1.0});
    }
    {
      const PooledDataset data = random_data(true);
      const auto [x, params] =
          draw_interior(data, [&](std::vector<double>& x) {
            x = {std::uniform_real_distribution<double>(-4.0, -1.0)(gen),
                 std::uniform_real_distribution<double>(-1.0, 1.0)(gen),
                 std::uniform_real_distribution<double>(-0.5, 0.8)(gen)};
            return ModelParams::beta_lambda({x[0], x[1]}, x[2], false);
          });
      ParamFn f = [&](const std::vector<double>& v) {
        return loglik(data,
                      ModelParams::beta_lambda({v[0], v[1]}, v[2], false));
      };
      check_point(f, score_and_curvature(data, params), x,
                  {std::max(1.0, std::abs(x[0])), 1.0, 1.0});
    }
  }
  if (worst >= 1e-5) {
    return Outcome::fail("max relative derivative error " + fmt(worst));
  }
  return Outcome::pass("max relative derivative error " + fmt(worst));
}

Outcome criterion_information() {
  double worst_identity = 0.0;
  double worst_jacobian = 0.0;
  std::mt19937_64 gen(7004);
  std::uniform_int_distribution<int> s_draw(1, 60);
  std::uniform_int_distribution<long> n_draw(1, 20);
  for (int rep = 0; rep < 50; ++rep) {
    const std::vector<int> sizes{s_draw(gen), s_draw(gen), s_draw(gen)};
    const std::vector<long> counts{n_draw(gen), n_draw(gen), n_draw(gen)};
    for (double theta : {1e-6, 0.01, 0.1, 0.5, 0.9, 0.999}) {
      for (double lambda : {-0.9, -0.3, 0.0, 0.4, 1.1}) {
        const auto params = ModelParams::theta_lambda(theta, lambda);
        const InfoMatrix info = fisher_information(sizes, counts, params);

        // The (theta, theta) entry decomposes into per-unit contributions.
        double total = 0.0;
        for (std::size_t i = 0; i < sizes.size(); ++i) {
          total += static_cast<double>(counts[i]) * sizes[i] *
                   unit_information(sizes[i], theta, lambda);
        }
        worst_identity =
            std::max(worst_identity, std::abs(info.entries(0, 0) - total) /
                                         std::max(1.0, std::abs(total)));

        // The linked-scale matrix is the theta-scale matrix pushed through
        // the change of variable theta = icll(eta).
        const InfoMatrix eta_info =
            fisher_information_eta(sizes, counts, params);
        const double dtheta_deta = -(1.0 - theta) * std::log1p(-theta);
        Eigen::Matrix2d jac = Eigen::Matrix2d::Identity();
        jac(0, 0) = dtheta_deta;
        const Eigen::Matrix2d expected = jac.transpose() * info.entries * jac;
        for (int r = 0; r < 2; ++r) {
          for (int c = 0; c < 2; ++c) {
            worst_jacobian =
                std::max(worst_jacobian,
                         std::abs(eta_info.entries(r, c) - expected(r, c)) /
                             std::max(1.0, std::abs(expected(r, c))));
          }
        }
      }
    }
  }
  if (worst_identity >= 1e-10) {
    return Outcome::fail("per-unit identity deviation " + fmt(worst_identity));
  }
  if (worst_jacobian >= 1e-10) {
    return Outcome::fail("scale-transform deviation " + fmt(worst_jacobian));
  }

  // Mean observed information across simulated datasets should match the
  // expected matrix within Monte Carlo error.
  SimConfig config;
  config.n_pools = 7;
  config.law = PoolSizeLaw::list({3, 3, 3, 3, 9, 9, 9});
  config.true_params = ModelParams::theta_lambda(0.12, 0.3, false);
  config.replicates = 100000;
  config.master_seed = 900000001ULL;
  Eigen::Matrix2d mean = Eigen::Matrix2d::Zero();
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  for (int r = 0; r < config.replicates; ++r) {
    const PooledDataset data = simulate_dataset(config, r);
    const Eigen::MatrixXd observed = -hessian(data, config.true_params);
    mean += observed;
    second += observed.cwiseProduct(observed);
  }
  mean /= config.replicates;
  second /= config.replicates;
  const InfoMatrix expected =
      fisher_information({3, 9}, {4, 3}, config.true_params);
  double worst_sigma = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double var = second(i, j) - mean(i, j) * mean(i, j);
      const double mc_se = std::sqrt(var / config.replicates);
      worst_sigma = std::max(
          worst_sigma, std::abs(mean(i, j) - expected.entries(i, j)) / mc_se);
    }
  }
  if (worst_sigma >= 3.0) {
    return Outcome::fail("mean observed information off by " +
                         fmt(worst_sigma) + " MC SEs");
  }
  return Outcome::pass("identity " + fmt(worst_identity) + ", transform " +
                       fmt(worst_jacobian) + ", observed info " +
                       fmt(worst_sigma) + " MC SEs");
}

Outcome criterion_monotone() {
  for (int i = 1; i <= 50; ++i) {
    const double theta = static_cast<double>(i) / 51.0;
    double prev = unit_information(1, theta, 0.0);
    for (int s = 2; s <= 50; ++s) {
      const double cur = unit_information(s, theta, 0.0);
      if (!(cur < prev)) {
        return Outcome::fail("not decreasing at theta=" + fmt(theta) +
                             ", s=" + std::to_string(s));
      }
      prev = cur;
    }
  }
  return Outcome::pass("strictly decreasing at 50 prevalences, sizes 1..50");
}

Outcome criterion_mass() {
  double worst = 0.0;
  const std::vector<std::vector<std::pair<int, long>>> designs{
      {{3, 4}}, {{1, 1}}, {{2, 3}, {5, 4}}, {{7, 2}, {4, 4}}};
  for (const auto& design : designs) {
    for (double theta : {0.04, 0.3, 0.77}) {
      for (double lambda : {-0.5, 0.0, 0.8}) {
        const auto params = ModelParams::theta_lambda(theta, lambda);
        std::vector<PoolRow> rows(design.size());
        for (std::size_t i = 0; i < design.size(); ++i) {
          rows[i].pool_size = design[i].first;
          rows[i].pool_count = design[i].second;
        }
        const long n0 = rows[0].pool_count;
        const long n1 = rows.size() > 1 ? rows[1].pool_count : 0;
        double total = 0.0;
        for (long y0 = 0; y0 <= n0; ++y0) {
          for (long y1 = 0; y1 <= n1; ++y1) {
            rows[0].positives = y0;
            if (rows.size() > 1) rows[1].positives = y1;
            total += std::exp(poolbin_log_mass(PooledDataset(rows), params));
          }
        }
        worst = std::max(worst, std::abs(total - 1.0));
      }
    }
  }
  if (worst >= 1e-12) {
    return Outcome::fail("mass total off by " + fmt(worst));
  }
  return Outcome::pass("mass total off by " + fmt(worst));
}

Outcome criterion_chi2() {
  const double a = std::abs(chi2_sf(69.222, 50.0) - 0.037171);
  const double b = std::abs(chi2_sf(69.512, 51.0) - 0.043347);
  if (a >= 5e-6 || b >= 5e-6) {
    return Outcome::fail("tail deviations " + fmt(a) + ", " + fmt(b));
  }
  return Outcome::pass("tail deviations " + fmt(a) + ", " + fmt(b));
}

// Study protocol shared by the coverage and calibration checks: 400 pools
// per replicate with Poisson-20 sizes at prevalence 0.0384 and zero excess
// intensity, 1000 replicates.
SimConfig protocol_config(std::uint64_t seed, bool free_lambda) {
  SimConfig config;
  config.n_pools = 400;
  config.law = PoolSizeLaw::poisson(20.0);
  config.true_params = ModelParams::theta_lambda(0.0384, 0.0);
  config.replicates = 1000;
  config.master_seed = seed;
  config.free_lambda = free_lambda;
  return config;
}

Outcome criterion_coverage() {
  const CoverageSummary summary =
      coverage_study(protocol_config(1, false), 0.95);
  std::ostringstream note;
  note << "coverage " << summary.coverage_theta << " over " << summary.used
       << " usable replicates (boundary " << summary.boundary_count
       << ", nonconverged " << summary.nonconverged_count << ")";
  if (summary.coverage_theta >= 0.93 && summary.coverage_theta <= 0.97) {
    return Outcome::pass(note.str());
  }
  return Outcome::fail(note.str());
}

struct Reference {
  const char* term;
  double estimate;
  double se;
};

std::string check_fit_against(const FitResult& fr,
                              const std::vector<Reference>& refs) {
  for (const Reference& ref : refs) {
    std::size_t idx = fr.terms.size();
    for (std::size_t i = 0; i < fr.terms.size(); ++i) {
      if (fr.terms[i] == ref.term) idx = i;
    }
    if (idx == fr.terms.size()) {
      return std::string("missing term ") + ref.term;
    }
    const double est = idx < fr.estimates.beta.size()
                           ? fr.estimates.beta[idx]
                           : fr.estimates.lambda;
    if (std::abs(est - ref.estimate) >= 1e-3) {
      return std::string(ref.term) + " estimate " + fmt(est) +
             " vs reference " + fmt(ref.estimate);
    }
    const double se = std::sqrt(fr.covariance(idx, idx));
    if (std::abs(se - ref.se) >= 1e-3) {
      return std::string(ref.term) + " se " + fmt(se) + " vs reference " +
             fmt(ref.se);
    }
  }
  return "";
}

Outcome criterion_mosquito() {
  const std::string path = std::string(POOLTEST_DATA_DIR) + "/mosquito.csv";
  if (!std::filesystem::exists(path)) {
    return Outcome::skip(path + " not present (see data/README.md)");
  }
  ModelSpec spec;
  spec.response = "positive";
  spec.pools = "pools";
  spec.pool_size = "poolsize";
  spec.covariates = {"Virus", "Development"};
  const LoadedData loaded = load_csv(path, spec);

  const FitResult free_fit = fit_glm(loaded.data, std::nullopt);
  std::string err =
      check_fit_against(free_fit, {{"Intercept", -5.8882, 3.1954},
                                   {"ExcessIntensity", -0.3230, 0.6858},
                                   {"VirusH", 0.9189, 0.5340},
                                   {"Development11-15 days", 1.4969, 0.4360}});
  if (!err.empty()) return Outcome::fail("free intensity: " + err);
  if (std::abs(free_fit.null_deviance - 89.988) >= 0.01) {
    return Outcome::fail("null deviance " + fmt(free_fit.null_deviance));
  }
  if (std::abs(free_fit.deviance - 72.408) >= 0.01 ||
      free_fit.residual_df != 59) {
    return Outcome::fail("free-intensity deviance " + fmt(free_fit.deviance) +
                         " on " + std::to_string(free_fit.residual_df) +
                         " df");
  }

  const FitResult fixed_fit = fit_glm(loaded.data, 0.0);
  err = check_fit_against(fixed_fit,
                          {{"Intercept", -7.3752, 0.5075},
                           {"VirusH", 0.8064, 0.4822},
                           {"Development11-15 days", 1.4651, 0.4311}});
  if (!err.empty()) return Outcome::fail("fixed intensity: " + err);
  if (std::abs(fixed_fit.deviance - 72.698) >= 0.01 ||
      fixed_fit.residual_df != 60) {
    return Outcome::fail("fixed-intensity deviance " +
                         fmt(fixed_fit.deviance) + " on " +
                         std::to_string(fixed_fit.residual_df) + " df");
  }

  const FitResult saturated = fit_saturated(loaded.data);
  const AnovaRow free_row = anova_nested(free_fit, saturated);
  const AnovaRow fixed_row = anova_nested(fixed_fit, saturated);
  if (std::abs(*free_row.deviance_delta - 69.222) >= 0.01 ||
      *free_row.df_delta != 50) {
    return Outcome::fail("diagnostic deviance " +
                         fmt(*free_row.deviance_delta) + " on " +
                         std::to_string(*free_row.df_delta) + " df");
  }
  if (std::abs(*fixed_row.deviance_delta - 69.512) >= 0.01 ||
      *fixed_row.df_delta != 51) {
    return Outcome::fail("fixed diagnostic deviance " +
                         fmt(*fixed_row.deviance_delta) + " on " +
                         std::to_string(*fixed_row.df_delta) + " df");
  }
  return Outcome::pass("both fits, deviances, and diagnostics reproduced");
}

Outcome criterion_calibration() {
  const CalibrationSummary summary =
      lambda_calibration_study(protocol_config(2, true));
  std::ostringstream note;
  note << "KS distance " << summary.ks_distance << " over " << summary.used
       << " usable replicates (boundary " << summary.boundary_count
       << ", nonconverged " << summary.nonconverged_count << ")";
  if (summary.ks_distance < 0.05 && summary.used >= 900) {
    return Outcome::pass(note.str());
  }
  return Outcome::fail(note.str());
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* label;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "design cutoff table to 1e-4", 1.0, criterion_cutoff_table},
      {2, "closed-form estimator to 1e-9", 5.0, criterion_closed_form},
      {3, "derivatives vs finite differences", 5.0, criterion_derivatives},
      {4, "information identities and observed information", 60.0,
       criterion_information},
      {5, "unit information monotone in pool size", 1.0, criterion_monotone},
      {6, "outcome mass sums to one", 1.0, criterion_mass},
      {7, "chi-squared tail reference values", 1.0, criterion_chi2},
      {8, "interval coverage under the study protocol", 300.0,
       criterion_coverage},
      {9, "mosquito dataset reproduction", 300.0, criterion_mosquito},
      {10, "intensity test null calibration", 300.0, criterion_calibration},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = Outcome::fail(std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (outcome.status == Outcome::Status::kPass &&
        seconds > criterion.budget_seconds) {
      outcome = Outcome::fail(outcome.note + "; over time budget " +
                              fmt(criterion.budget_seconds) + "s");
    }
    const char* verdict = outcome.status == Outcome::Status::kPass ? "[PASS]"
                          : outcome.status == Outcome::Status::kSkip
                              ? "[SKIP]"
                              : "[FAIL]";
    if (outcome.status == Outcome::Status::kFail) ++failures;
    std::printf("%s criterion %2d, %s: %s [%.2fs]\n", verdict, criterion.id,
                criterion.label, outcome.note.c_str(), seconds);
  }
  return failures;
}
