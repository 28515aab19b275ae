#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pooltest/information.hpp"
#include "pooltest/params.hpp"

using namespace pooltest;

TEST_CASE("unit information closed forms") {
  // A pool of one with a perfect test is an ordinary Bernoulli observation.
  for (double theta : {0.05, 0.3, 0.84}) {
    CHECK(unit_information(1, theta, 0.0) ==
          doctest::Approx(1.0 / (theta * (1.0 - theta))).epsilon(1e-12));
  }
  CHECK(unit_information(2, 0.5, 0.0) ==
        doctest::Approx(8.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(unit_information(3, 0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(unit_information(3, 1.0, 0.0), std::domain_error);
}

TEST_CASE("unit information decreases strictly in pool size") {
  for (int i = 1; i <= 50; ++i) {
    const double theta = i / 51.0;
    double prev = unit_information(1, theta, 0.0);
    for (int s = 2; s <= 50; ++s) {
      const double cur = unit_information(s, theta, 0.0);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("fisher information reduces to the Bernoulli form for units") {
  const InfoMatrix info = fisher_information(
      {1}, {10}, ModelParams::theta_lambda(0.3, 0.0));
  CHECK(info.entries(0, 0) ==
        doctest::Approx(10.0 / (0.3 * 0.7)).epsilon(1e-12));
}

TEST_CASE("theta information is the unit-information total") {
  const std::vector<int> sizes{2, 5, 11, 40};
  const std::vector<long> counts{7, 3, 9, 2};
  for (double lambda : {-0.4, 0.0, 0.9}) {
    for (double theta : {0.004, 0.07, 0.35, 0.9}) {
      const auto params = ModelParams::theta_lambda(theta, lambda);
      const InfoMatrix info = fisher_information(sizes, counts, params);
      double total = 0.0;
      for (std::size_t i = 0; i < sizes.size(); ++i) {
        total += counts[i] * sizes[i] * unit_information(sizes[i], theta, lambda);
      }
      CHECK(info.entries(0, 0) == doctest::Approx(total).epsilon(1e-10));
    }
  }
}

TEST_CASE("eta-scale information is the Jacobian transform") {
  const std::vector<int> sizes{3, 8, 25};
  const std::vector<long> counts{6, 6, 4};
  for (double lambda : {-0.3, 0.0, 0.7}) {
    for (double theta : {0.01, 0.2, 0.6}) {
      const auto params = ModelParams::theta_lambda(theta, lambda);
      const InfoMatrix theta_info = fisher_information(sizes, counts, params);
      const InfoMatrix eta_info = fisher_information_eta(sizes, counts, params);
      // dtheta/deta = -(1-theta) log(1-theta) along the link.
      const double dtde = -(1.0 - theta) * std::log1p(-theta);
      Eigen::Matrix2d jac = Eigen::Matrix2d::Identity();
      jac(0, 0) = dtde;
      const Eigen::Matrix2d expected = jac.transpose() *
                                       theta_info.entries * jac;
      for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
          CHECK(eta_info.entries(r, c) ==
                doctest::Approx(expected(r, c))
                    .epsilon(1e-10)
                    .scale(std::abs(expected(r, c)) + 1.0));
        }
      }
      // The eta-scale matrix is a Gram matrix, hence PSD.
      CHECK(eta_info.entries(0, 0) >= 0.0);
      CHECK(eta_info.entries.determinant() >= -1e-8);
    }
  }
}

TEST_CASE("information per unit cost reduces to s times unit information") {
  // With no sampling cost and unit test cost the per-unit cost is 1/s.
  for (int s : {1, 4, 19}) {
    for (double theta : {0.02, 0.3}) {
      CHECK(ipuc(s, theta, 0.0, 0.0, 1.0) ==
            doctest::Approx(s * unit_information(s, theta, 0.0))
                .epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(ipuc(3, 0.5, 0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("optimal pool size follows the cutoff table") {
  // Above the first cutoff a single-unit test is best.
  CHECK(optimal_pool_size(0.7, 0.0, 0.0, 1.0) == 1);
  CHECK(optimal_pool_size(0.5, 0.0, 0.0, 1.0) == 2);
  // theta = 0.20 sits between the size-7 and size-6 cutoffs.
  CHECK(optimal_pool_size(0.20, 0.0, 0.0, 1.0) == 7);
  // Small prevalences push toward large pools.
  CHECK(optimal_pool_size(0.001, 0.0, 0.0, 1.0) > 100);
  // When sampling itself costs something, tests are no longer the whole
  // bill and smaller pools regain ground.
  CHECK(optimal_pool_size(0.05, 0.0, 1.0, 1.0) <=
        optimal_pool_size(0.05, 0.0, 0.0, 1.0));
}

TEST_CASE("prevalence cutoffs come back ordered and bracket the optimum") {
  const DesignTable table = prevalence_cutoffs(12, 0.0, 0.0, 1.0);
  REQUIRE(table.rows.size() == 12);
  CHECK(table.rows.front().pool_size == 1);
  CHECK(table.rows.front().cutoff == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    CHECK(table.rows[i].cutoff < table.rows[i - 1].cutoff);
  }
  // Any prevalence strictly inside (cutoff(s), cutoff(s-1)) selects s.
  for (std::size_t i = 1; i + 1 < table.rows.size(); ++i) {
    const double mid =
        0.5 * (table.rows[i].cutoff + table.rows[i - 1].cutoff);
    CHECK(optimal_pool_size(mid, 0.0, 0.0, 1.0) ==
          table.rows[i].pool_size);
  }
  CHECK_THROWS_AS(prevalence_cutoffs(1, 0.0, 0.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("information rejects regression parameter sets") {
  CHECK_THROWS_AS(
      fisher_information({2}, {5}, ModelParams::beta_lambda({-1.0}, 0.0)),
      std::invalid_argument);
}
