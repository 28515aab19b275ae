#include "pooltest/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pooltest/distribution.hpp"
#include "pooltest/special_functions.hpp"

namespace pooltest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Collapse across covariates to per-pool-size totals, sorted by size.
struct SizeCell {
  int s = 0;
  long n = 0;
  long y = 0;
};

std::vector<SizeCell> by_pool_size(const PooledDataset& data) {
  std::map<int, SizeCell> cells;
  for (const PoolRow& r : data.rows()) {
    SizeCell& c = cells[r.pool_size];
    c.s = r.pool_size;
    c.n += r.pool_count;
    c.y += r.positives;
  }
  std::vector<SizeCell> out;
  for (auto& kv : cells) out.push_back(kv.second);
  return out;
}

}  // namespace

WaldTest wald_test_lambda(const FitResult& fit, bool t_pvalues) {
  if (fit.estimates.lambda_fixed) {
    throw std::invalid_argument(
        "wald_test_lambda needs a fit with a free excess intensity");
  }
  if (!fit.covariance_available) {
    throw std::runtime_error("wald_test_lambda unavailable: " +
                             fit.covariance_unavailable_reason);
  }
  Eigen::Index li = fit.covariance.rows() - 1;  // lambda is the last term
  double se = std::sqrt(std::max(0.0, fit.covariance(li, li)));
  if (!(se > 0.0)) {
    throw std::runtime_error(
        "wald_test_lambda unavailable: zero standard error for the excess "
        "intensity");
  }
  WaldTest test;
  test.statistic = fit.estimates.lambda / se;
  test.used_t = t_pvalues;
  test.df = fit.residual_df;
  if (t_pvalues) {
    if (fit.residual_df < 1) {
      throw std::runtime_error(
          "wald_test_lambda unavailable: no residual degrees of freedom for "
          "the t reference");
    }
    test.p_value = 2.0 * student_t_sf(std::fabs(test.statistic),
                                      static_cast<double>(fit.residual_df));
  } else {
    test.p_value = 2.0 * normal_sf(std::fabs(test.statistic));
  }
  return test;
}

FitResult fit_saturated(const PooledDataset& data) {
  PooledDataset agg = aggregate(data);
  std::vector<SizeCell> size_cells = by_pool_size(agg);
  const std::size_t n_sizes = size_cells.size();
  const std::size_t m = agg.covariate_dim();  // includes intercept when present
  const std::size_t extra = m > 0 ? m - 1 : 0;

  FitResult fr;
  fr.model_label = "saturated";
  fr.ci_level = 0.95;
  fr.n_cells = static_cast<long>(agg.size());
  fr.data_fingerprint = agg.fingerprint();
  fr.residual_df = static_cast<long>(agg.size()) -
                   static_cast<long>(n_sizes + extra);
  for (const SizeCell& c : size_cells) {
    std::ostringstream name;
    name << "PoolSize" << c.s;
    fr.terms.push_back(name.str());
  }
  for (std::size_t j = 1; j < m; ++j) {
    fr.terms.push_back(agg.covariate_names().size() == m
                           ? agg.covariate_names()[j]
                           : "x" + std::to_string(j));
  }

  double sat_ll = detail::saturated_reference_loglik(agg);
  if (extra == 0) {
    // Closed form: each pool size sits at its empirical positive fraction.
    std::vector<double> mu;
    bool any_boundary = false;
    for (const SizeCell& c : size_cells) {
      double phat = static_cast<double>(c.y) / static_cast<double>(c.n);
      mu.push_back(cll(phat));
      if (c.y == 0 || c.y == c.n) any_boundary = true;
    }
    fr.estimates = ModelParams::beta_lambda(std::move(mu), 0.0, true);
    fr.loglik = sat_ll;
    fr.deviance = 0.0;
    fr.converged = true;
    fr.iterations = 0;
    if (any_boundary) {
      fr.covariance_available = false;
      fr.covariance_unavailable_reason =
          "some pool sizes are entirely negative or entirely positive";
    } else {
      // Independent cells: a diagonal covariance from the per-cell curvature.
      fr.covariance = Eigen::MatrixXd::Zero(n_sizes, n_sizes);
      for (std::size_t k = 0; k < n_sizes; ++k) {
        detail::RowTerms t = detail::row_terms_from_u(
            fr.estimates.beta[k]);
        double curv = -detail::row_d2loglik(size_cells[k].n, size_cells[k].y,
                                            t);
        fr.covariance(k, k) = 1.0 / curv;
      }
      fr.covariance_available = true;
    }
  } else {
    // Newton over per-size effects plus the non-intercept covariates.
    detail::NewtonSpec spec;
    const std::size_t dim = n_sizes + extra;
    std::map<int, std::size_t> size_index;
    for (std::size_t k = 0; k < n_sizes; ++k) {
      size_index[size_cells[k].s] = k;
    }
    spec.X = Eigen::MatrixXd::Zero(agg.size(), dim);
    spec.offset = Eigen::VectorXd::Zero(agg.size());
    for (std::size_t i = 0; i < agg.size(); ++i) {
      const PoolRow& r = agg.rows()[i];
      spec.pool_sizes.push_back(r.pool_size);
      spec.pool_counts.push_back(r.pool_count);
      spec.positives.push_back(r.positives);
      spec.X(i, size_index[r.pool_size]) = 1.0;
      for (std::size_t j = 1; j < m; ++j) {
        spec.X(i, n_sizes + j - 1) = r.covariates[j];
      }
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(spec.X);
    qr.setThreshold(1e-10);
    if (qr.rank() < spec.X.cols()) {
      throw std::invalid_argument(
          "saturated design is rank deficient: pool-size indicators and "
          "covariates overlap");
    }
    spec.start = Eigen::VectorXd::Zero(dim);
    for (std::size_t k = 0; k < n_sizes; ++k) {
      double adj = (static_cast<double>(size_cells[k].y) + 0.5) /
                   (static_cast<double>(size_cells[k].n) + 1.0);
      spec.start(k) = cll(adj);
    }
    detail::NewtonOutcome out = detail::maximize(spec);
    std::vector<double> v(out.v.data(), out.v.data() + out.v.size());
    fr.estimates = ModelParams::beta_lambda(std::move(v), 0.0, true);
    fr.loglik = out.loglik;
    fr.deviance = std::max(0.0, 2.0 * (sat_ll - out.loglik));
    fr.converged = out.converged;
    fr.iterations = out.iterations;
    Eigen::LLT<Eigen::MatrixXd> llt(Eigen::MatrixXd(-out.hessian));
    if (llt.info() == Eigen::Success) {
      fr.covariance =
          llt.solve(Eigen::MatrixXd::Identity(dim, dim));
      fr.covariance_available = true;
    } else {
      fr.covariance_available = false;
      fr.covariance_unavailable_reason =
          "observed information is not positive definite (separated cells)";
      fr.boundary_flags.insert(BoundaryFlag::kUnidentifiableSe);
    }
  }

  // The customary reference: intercept-only with the intensity pinned to 0.
  FitResult null_fit = fit(data, 0.0);
  fr.null_deviance = null_fit.deviance;
  return fr;
}

AnovaRow anova_nested(const FitResult& fit_small, const FitResult& fit_big) {
  if (fit_small.data_fingerprint != fit_big.data_fingerprint) {
    throw std::invalid_argument(
        "anova_nested: the two fits are not on the same data");
  }
  long df_delta = fit_small.residual_df - fit_big.residual_df;
  double dev_delta = fit_small.deviance - fit_big.deviance;
  if (df_delta < 0) {
    throw std::invalid_argument(
        "anova_nested: the first fit must be the smaller model");
  }
  if (dev_delta < -1e-8) {
    throw std::invalid_argument(
        "anova_nested: deviance increased; the models are not nested");
  }
  dev_delta = std::max(0.0, dev_delta);
  AnovaRow row;
  row.label = fit_big.model_label;
  row.residual_df = fit_big.residual_df;
  row.residual_deviance = fit_big.deviance;
  row.df_delta = df_delta;
  row.deviance_delta = dev_delta;
  row.p_value = df_delta == 0
                    ? 1.0
                    : chi2_sf(dev_delta, static_cast<double>(df_delta));
  return row;
}

namespace {

AnovaRow delta_row(const std::string& label, const FitResult& prev,
                   const FitResult& cur) {
  AnovaRow row = anova_nested(prev, cur);
  row.label = label;
  return row;
}

}  // namespace

std::vector<AnovaRow> anova_sequence(const PooledDataset& data,
                                     const std::vector<TermGroup>& groups,
                                     std::optional<double> lambda_fixed) {
  const bool free_lambda = !lambda_fixed.has_value();
  std::vector<AnovaRow> table;

  // Every model in the sequence is evaluated on the full data so the
  // deviances share one per-cell reference and the deltas telescope.
  FitResult prev = fit(data, lambda_fixed.value_or(0.0));
  AnovaRow null_row;
  null_row.label = "NULL";
  null_row.residual_df = prev.residual_df;
  null_row.residual_deviance = prev.deviance;
  table.push_back(null_row);

  if (free_lambda) {
    FitResult with_lambda = fit(data, std::nullopt);
    table.push_back(delta_row("ExcessIntensity", prev, with_lambda));
    prev = std::move(with_lambda);
  }

  std::size_t cols = 1;  // intercept
  for (const TermGroup& g : groups) {
    if (g.first_column != cols) {
      throw std::invalid_argument(
          "anova_sequence: term groups must tile the covariate columns in "
          "order");
    }
    cols += g.column_count;
    FitResult cur = detail::fit_glm_subset(data, cols, lambda_fixed);
    table.push_back(delta_row(g.name, prev, cur));
    prev = std::move(cur);
  }
  return table;
}

PppPlotData ppp_plot_data(const FitResult& fit_result,
                          const PooledDataset& data, bool leave_one_out,
                          double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("level must be in (0, 1)");
  }
  PppPlotData plot;
  plot.leave_one_out = leave_one_out;
  plot.level = level;
  double z = normal_quantile(0.5 + 0.5 * level);

  std::vector<SizeCell> cells = by_pool_size(data);

  // Pool-count weighted average covariate profile, the "average unit" the
  // curve is drawn for when the model has covariates.
  const ModelParams& est = fit_result.estimates;
  bool is_beta = est.parameterization == Parameterization::Beta;
  std::vector<double> xbar;
  if (is_beta) {
    xbar.assign(est.beta.size(), 0.0);
    double total = 0.0;
    for (const PoolRow& r : data.rows()) {
      if (r.covariates.size() != xbar.size()) {
        throw std::invalid_argument(
            "data covariates do not match the fitted coefficients");
      }
      double wgt = static_cast<double>(r.pool_count);
      total += wgt;
      for (std::size_t j = 0; j < xbar.size(); ++j) {
        xbar[j] += wgt * r.covariates[j];
      }
    }
    for (double& v : xbar) v /= total;
  }

  auto curve_phi = [&](const ModelParams& p) {
    return [&, p](int s) {
      if (p.parameterization == Parameterization::Beta) {
        double u = (1.0 + p.lambda) * std::log(static_cast<double>(s));
        for (std::size_t j = 0; j < xbar.size(); ++j) {
          u += xbar[j] * p.beta[j];
        }
        return detail::row_terms_from_u(u).phi;
      }
      return ppp_eta(s, p.eta, p.lambda);
    };
  };
  auto full_curve = curve_phi(est);

  for (const SizeCell& c : cells) {
    plot.histogram.push_back({c.s, c.n});

    PppPlotData::PointRow pt;
    pt.pool_size = c.s;
    pt.pools = c.n;
    pt.positives = c.y;
    double n = static_cast<double>(c.n);
    double y = static_cast<double>(c.y);
    pt.phat = y / n;
    pt.adjusted = (c.y == 0 || c.y == c.n);
    // Wald interval on the cll scale; boundary cells borrow a half count to
    // get the informative one-sided limit.
    double p_used = pt.adjusted
                        ? (c.y == 0 ? 0.5 / n : (n - 0.5) / n)
                        : pt.phat;
    double eta_hat = cll(p_used);
    double se = std::sqrt(p_used * (1.0 - p_used) / n) /
                ((1.0 - p_used) * (-std::log1p(-p_used)));
    pt.lower = c.y == 0 ? 0.0 : icll(eta_hat - z * se);
    pt.upper = c.y == c.n ? 1.0 : icll(eta_hat + z * se);
    plot.points.push_back(pt);

    PppPlotData::CurveRow cr;
    cr.pool_size = c.s;
    if (!leave_one_out) {
      cr.phi = full_curve(c.s);
      cr.available = true;
    } else {
      // Refit without this pool size, then look at it from outside.
      std::vector<PoolRow> keep;
      for (const PoolRow& r : data.rows()) {
        if (r.pool_size != c.s) keep.push_back(r);
      }
      cr.available = false;
      cr.phi = std::numeric_limits<double>::quiet_NaN();
      if (!keep.empty()) {
        try {
          PooledDataset sub(keep, data.covariate_names());
          std::optional<double> lf =
              est.lambda_fixed ? std::optional<double>(est.lambda)
                               : std::nullopt;
          FitResult refit = is_beta ? fit_glm(sub, lf) : fit(sub, lf);
          if (refit.converged) {
            cr.phi = curve_phi(refit.estimates)(c.s);
            cr.available = true;
          }
        } catch (const std::exception&) {
          // unidentifiable after exclusion; leave the point unavailable
        }
      }
    }
    plot.curve.push_back(cr);
  }
  return plot;
}

}  // namespace pooltest
