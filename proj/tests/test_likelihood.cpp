#include <cmath>
#include <functional>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pooltest/distribution.hpp"
#include "pooltest/information.hpp"
#include "pooltest/likelihood.hpp"
#include "pooltest/params.hpp"

using namespace pooltest;

namespace {

PooledDataset fd_design() {
  std::vector<PoolRow> rows;
  rows.push_back({3, 12, 4, {}});
  rows.push_back({8, 9, 5, {}});
  rows.push_back({20, 7, 6, {}});
  return PooledDataset(rows);
}

PooledDataset fd_design_covariates() {
  std::vector<PoolRow> rows;
  rows.push_back({3, 12, 4, {1.0, 0.0}});
  rows.push_back({8, 9, 5, {1.0, 1.0}});
  rows.push_back({20, 7, 6, {1.0, 0.3}});
  rows.push_back({11, 8, 2, {1.0, -0.7}});
  return PooledDataset(rows);
}

// Central differences of a scalar function of a parameter vector.
using ParamFn = std::function<double(const std::vector<double>&)>;

double fd_gradient(const ParamFn& f, std::vector<double> x, std::size_t i) {
  const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
  std::vector<double> hi = x;
  std::vector<double> lo = x;
  hi[i] += h;
  lo[i] -= h;
  return (f(hi) - f(lo)) / (2.0 * h);
}

double fd_hessian(const ParamFn& f, std::vector<double> x, std::size_t i,
                  std::size_t j) {
  const double hi_ = 1e-4 * std::max(1.0, std::abs(x[i]));
  const double hj_ = 1e-4 * std::max(1.0, std::abs(x[j]));
  if (i == j) {
    std::vector<double> up = x;
    std::vector<double> dn = x;
    up[i] += hi_;
    dn[i] -= hi_;
    return (f(up) - 2.0 * f(x) + f(dn)) / (hi_ * hi_);
  }
  std::vector<double> pp = x;
  std::vector<double> pm = x;
  std::vector<double> mp = x;
  std::vector<double> mm = x;
  pp[i] += hi_;
  pp[j] += hj_;
  pm[i] += hi_;
  pm[j] -= hj_;
  mp[i] -= hi_;
  mp[j] += hj_;
  mm[i] -= hi_;
  mm[j] -= hj_;
  return (f(pp) - f(pm) - f(mp) + f(mm)) / (4.0 * hi_ * hj_);
}

void check_close(double analytic, double numeric, double tol) {
  CHECK(std::abs(analytic - numeric) <=
        tol * std::max(1.0, std::abs(analytic)));
}

}  // namespace

TEST_CASE("loglik agrees with the distribution mass") {
  const PooledDataset data = fd_design();
  const auto params = ModelParams::theta_lambda(0.1, 0.3);
  CHECK(loglik(data, params) == poolbin_log_mass(data, params));
}

TEST_CASE("theta-scale derivatives match finite differences") {
  const PooledDataset data = fd_design();
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> theta_draw(0.02, 0.5);
  std::uniform_real_distribution<double> lambda_draw(-0.6, 1.0);
  auto f = [&](const std::vector<double>& x) {
    return loglik(data, ModelParams::theta_lambda(x[0], x[1], false));
  };
  for (int rep = 0; rep < 40; ++rep) {
    const std::vector<double> x{theta_draw(gen), lambda_draw(gen)};
    const auto sc = score_and_curvature(
        data, ModelParams::theta_lambda(x[0], x[1], false));
    REQUIRE(sc.gradient.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      check_close(sc.gradient(i), fd_gradient(f, x, i), 1e-6);
      for (std::size_t j = 0; j <= i; ++j) {
        check_close(sc.hessian(i, j), fd_hessian(f, x, i, j), 1e-5);
      }
    }
    CHECK(sc.hessian(0, 1) == sc.hessian(1, 0));
  }
}

TEST_CASE("eta-scale derivatives match finite differences") {
  const PooledDataset data = fd_design();
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> eta_draw(-5.0, 0.0);
  std::uniform_real_distribution<double> lambda_draw(-0.6, 1.0);
  auto f = [&](const std::vector<double>& x) {
    return loglik(data, ModelParams::eta_lambda(x[0], x[1], false));
  };
  for (int rep = 0; rep < 40; ++rep) {
    const std::vector<double> x{eta_draw(gen), lambda_draw(gen)};
    const auto sc = score_and_curvature(
        data, ModelParams::eta_lambda(x[0], x[1], false));
    for (std::size_t i = 0; i < 2; ++i) {
      check_close(sc.gradient(i), fd_gradient(f, x, i), 1e-6);
      for (std::size_t j = 0; j <= i; ++j) {
        check_close(sc.hessian(i, j), fd_hessian(f, x, i, j), 1e-5);
      }
    }
  }
}

TEST_CASE("regression-scale derivatives match finite differences") {
  const PooledDataset data = fd_design_covariates();
  std::mt19937_64 gen(13);
  std::uniform_real_distribution<double> coef_draw(-1.0, 0.5);
  std::uniform_real_distribution<double> lambda_draw(-0.5, 0.8);
  auto f = [&](const std::vector<double>& x) {
    return loglik(data,
                  ModelParams::beta_lambda({x[0] - 2.0, x[1]}, x[2], false));
  };
  for (int rep = 0; rep < 40; ++rep) {
    const std::vector<double> x{coef_draw(gen), coef_draw(gen),
                                lambda_draw(gen)};
    const auto sc = score_and_curvature(
        data,
        ModelParams::beta_lambda({x[0] - 2.0, x[1]}, x[2], false));
    REQUIRE(sc.gradient.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
      check_close(sc.gradient(i), fd_gradient(f, x, i), 1e-6);
      for (std::size_t j = 0; j <= i; ++j) {
        check_close(sc.hessian(i, j), fd_hessian(f, x, i, j), 1e-5);
      }
    }
  }
}

TEST_CASE("fixed lambda drops the lambda coordinate") {
  const PooledDataset data = fd_design();
  const auto sc = score_and_curvature(
      data, ModelParams::theta_lambda(0.1, 0.2, true));
  CHECK(sc.gradient.size() == 1);
  CHECK(sc.hessian.rows() == 1);
  CHECK_FALSE(sc.lambda_included);
}

TEST_CASE("theta and eta scores agree through the chain rule") {
  const PooledDataset data = fd_design();
  for (double theta : {0.03, 0.2, 0.45}) {
    for (double lambda : {-0.3, 0.0, 0.5}) {
      const auto st = score(data,
                            ModelParams::theta_lambda(theta, lambda, false));
      const auto se = score(data,
                            ModelParams::eta_lambda(cll(theta), lambda, false));
      const double dtde = -(1.0 - theta) * std::log1p(-theta);
      CHECK(se(0) == doctest::Approx(st(0) * dtde).epsilon(1e-10));
      CHECK(se(1) == doctest::Approx(st(1)).epsilon(1e-12));
    }
  }
}

TEST_CASE("expected negative hessian equals fisher information") {
  // Average the curvature over the full outcome distribution of a small
  // design; the result must be the expected information matrix.
  std::vector<PoolRow> rows;
  rows.push_back({2, 3, 0, {}});
  rows.push_back({6, 2, 0, {}});
  const auto params = ModelParams::theta_lambda(0.17, 0.4, false);
  Eigen::Matrix2d expected = Eigen::Matrix2d::Zero();
  for (long y1 = 0; y1 <= 3; ++y1) {
    for (long y2 = 0; y2 <= 2; ++y2) {
      rows[0].positives = y1;
      rows[1].positives = y2;
      const PooledDataset data(rows);
      const double mass = std::exp(poolbin_log_mass(data, params));
      expected -= mass * hessian(data, params);
    }
  }
  const InfoMatrix info =
      fisher_information({2, 6}, {3, 2}, params);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      CHECK(expected(r, c) == doctest::Approx(info.entries(r, c))
                                  .epsilon(1e-10)
                                  .scale(1.0));
    }
  }
}

TEST_CASE("score demands interior parameters") {
  const PooledDataset data = fd_design();
  CHECK_THROWS_AS(score(data, ModelParams::theta_lambda(0.0, 0.0)),
                  std::domain_error);
  CHECK_THROWS_AS(score(data, ModelParams::theta_lambda(1.0, 0.0)),
                  std::domain_error);
}
