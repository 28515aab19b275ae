#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pooltest/dataset.hpp"
#include "pooltest/estimation.hpp"

namespace pooltest {

// A named run of expanded covariate columns (a numeric column spans one,
// a categorical column one per non-reference level).  Column indices refer
// to the dataset's covariate vectors, where index 0 is the intercept.
struct TermGroup {
  std::string name;
  std::size_t first_column = 0;
  std::size_t column_count = 1;
};

struct WaldTest {
  double statistic = 0.0;
  double p_value = 1.0;
  bool used_t = false;
  long df = 0;  // residual df backing the t reference when used_t
};

// Two-sided test of whether the excess intensity differs from zero, from a
// free-lambda fit.  The default reference is the standard normal; passing
// t_pvalues=true uses Student's t with the fit's residual df instead.
WaldTest wald_test_lambda(const FitResult& fit, bool t_pvalues = false);

// Fit with one free cll-scale effect per distinct pool size plus the data's
// non-intercept covariates.  Without covariates the per-size effects have the
// closed form cll(y_s/n_s), with all-negative or all-positive sizes mapping
// to -inf/+inf and zero deviance contribution.
FitResult fit_saturated(const PooledDataset& data);

struct AnovaRow {
  std::string label;
  long residual_df = 0;
  double residual_deviance = 0.0;
  std::optional<long> df_delta;
  std::optional<double> deviance_delta;
  std::optional<double> p_value;
};

// Likelihood ratio comparison of two nested fits on the same data.  The
// smaller model goes first; a swapped or mismatched pair is an error.
AnovaRow anova_nested(const FitResult& fit_small, const FitResult& fit_big);

// Sequential table: the intercept-only reference, then the free excess
// intensity when requested, then each covariate group in order.  The final
// row matches the full model fit.
std::vector<AnovaRow> anova_sequence(const PooledDataset& data,
                                     const std::vector<TermGroup>& groups,
                                     std::optional<double> lambda_fixed);

struct PppPlotData {
  struct HistRow {
    int pool_size = 0;
    long pools = 0;
  };
  struct CurveRow {
    int pool_size = 0;
    double phi = 0.0;
    bool available = true;
  };
  struct PointRow {
    int pool_size = 0;
    long pools = 0;
    long positives = 0;
    double phat = 0.0;
    double lower = 0.0;
    double upper = 1.0;
    bool adjusted = false;
  };
  std::vector<HistRow> histogram;
  std::vector<CurveRow> curve;
  std::vector<PointRow> points;
  bool leave_one_out = false;
  double level = 0.95;
};

// Everything needed to draw a pool probability plot: the pool-size histogram,
// per-size empirical positive fractions with cll-scale Wald intervals, and
// the fitted curve evaluated at each observed size (at the pool-weighted
// average covariate profile when the fit has covariates).  leave_one_out
// refits without each pool size before evaluating the curve there; sizes
// whose refit fails are marked unavailable.
PppPlotData ppp_plot_data(const FitResult& fit, const PooledDataset& data,
                          bool leave_one_out = false, double level = 0.95);

}  // namespace pooltest
