#include "pooltest/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "pooltest/distribution.hpp"
#include "pooltest/special_functions.hpp"

namespace pooltest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGradTol = 1e-8;    // contract: converged means sup-grad below this
constexpr double kPolishTol = 1e-13; // keep iterating while cheap progress remains
constexpr double kStepTol = 1e-12;
constexpr int kMaxIter = 100;
constexpr int kMaxHalvings = 30;

std::vector<std::string> make_terms(const PooledDataset& data, bool glm,
                                    std::size_t n_coef, bool with_lambda) {
  std::vector<std::string> terms;
  if (glm && data.has_covariates()) {
    for (std::size_t j = 0; j < n_coef; ++j) {
      if (data.covariate_names().size() == data.covariate_dim()) {
        terms.push_back(data.covariate_names()[j]);
      } else if (j == 0) {
        terms.push_back("Intercept");
      } else {
        std::ostringstream name;
        name << "x" << j;
        terms.push_back(name.str());
      }
    }
  } else {
    terms.push_back("Intercept");
  }
  if (with_lambda) terms.push_back("ExcessIntensity");
  return terms;
}

}  // namespace

std::string boundary_flag_name(BoundaryFlag flag) {
  switch (flag) {
    case BoundaryFlag::kThetaZero: return "THETA_ZERO";
    case BoundaryFlag::kThetaOne: return "THETA_ONE";
    case BoundaryFlag::kLambdaAtMinusOne: return "LAMBDA_AT_MINUS_ONE";
    case BoundaryFlag::kUnidentifiableSe: return "UNIDENTIFIABLE_SE";
  }
  return "UNKNOWN";
}

double le_start(const PooledDataset& data) {
  long pools = data.total_pools();
  long units = data.total_units();
  long pos = data.total_positives();
  if (pos == 0) return -kInf;
  if (pos == pools) return kInf;
  double phat = static_cast<double>(pos) / static_cast<double>(pools);
  // eta such that a pool of the average size N/n is positive with the
  // observed frequency: exp(eta) = -n log(1 - phat) / N.
  return std::log(-static_cast<double>(pools) * std::log1p(-phat) /
                  static_cast<double>(units));
}

namespace detail {

double saturated_reference_loglik(const PooledDataset& aggregated) {
  double ll = 0.0;
  for (const PoolRow& r : aggregated.rows()) {
    ll += log_choose(r.pool_count, r.positives);
    if (r.positives > 0 && r.positives < r.pool_count) {
      double n = static_cast<double>(r.pool_count);
      double y = static_cast<double>(r.positives);
      ll += y * std::log(y / n) + (n - y) * std::log1p(-y / n);
    }
  }
  return ll;
}

namespace {

// Loglik, gradient, and Hessian of the working objective at v.
double evaluate(const NewtonSpec& spec, const Eigen::VectorXd& v,
                Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
  const int dim = static_cast<int>(spec.X.cols());
  Eigen::VectorXd u = spec.X * v + spec.offset;
  if (grad) {
    grad->setZero(dim);
    hess->setZero(dim, dim);
  }
  double ll = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    RowTerms t = row_terms_from_u(u(i));
    ll += row_log_mass(spec.pool_counts[i], spec.positives[i], t);
    if (grad) {
      double l1 = row_dloglik(spec.pool_counts[i], spec.positives[i], t);
      double l2 = row_d2loglik(spec.pool_counts[i], spec.positives[i], t);
      grad->noalias() += l1 * spec.X.row(i).transpose();
      hess->noalias() += l2 * spec.X.row(i).transpose() * spec.X.row(i);
    }
  }
  return ll;
}

// Sup-norm of the gradient with the lambda component projected: a negative
// lambda-gradient at the lambda = -1 boundary pushes outward and does not
// count against convergence.
double projected_grad_norm(const NewtonSpec& spec, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& g) {
  double norm = 0.0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    double gj = g(j);
    if (static_cast<int>(j) == spec.lambda_index && v(j) <= -1.0 && gj < 0.0) {
      continue;
    }
    norm = std::max(norm, std::fabs(gj));
  }
  return norm;
}

Eigen::VectorXd project(const NewtonSpec& spec, Eigen::VectorXd v) {
  if (spec.lambda_index >= 0 && v(spec.lambda_index) < -1.0) {
    v(spec.lambda_index) = -1.0;
  }
  return v;
}

}  // namespace

NewtonOutcome maximize(const NewtonSpec& spec) {
  const int dim = static_cast<int>(spec.X.cols());
  NewtonOutcome out;
  out.v = project(spec, spec.start);
  Eigen::VectorXd g(dim);
  Eigen::MatrixXd H(dim, dim);
  out.loglik = evaluate(spec, out.v, &g, &H);
  out.ll_path.push_back(out.loglik);

  for (int iter = 1; iter <= kMaxIter; ++iter) {
    double gnorm = projected_grad_norm(spec, out.v, g);
    if (gnorm < kPolishTol) break;

    // Ascent direction from (-H + ridge I) d = g; the ridge grows until the
    // shifted curvature is positive definite.
    Eigen::MatrixXd A = -H;
    double scale = std::max(1.0, A.diagonal().cwiseAbs().maxCoeff());
    double ridge = 0.0;
    Eigen::VectorXd d;
    for (int attempt = 0; attempt < 25; ++attempt) {
      Eigen::LLT<Eigen::MatrixXd> llt(
          A + ridge * Eigen::MatrixXd::Identity(dim, dim));
      if (llt.info() == Eigen::Success) {
        d = llt.solve(g);
        break;
      }
      ridge = ridge == 0.0 ? 1e-10 * scale : ridge * 100.0;
    }
    if (d.size() == 0) break;  // curvature hopeless, give up here

    // Backtracking: halve until the step no longer loses likelihood.
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd v_next;
    double ll_next = 0.0;
    for (int h = 0; h <= kMaxHalvings; ++h) {
      v_next = project(spec, out.v + step * d);
      ll_next = evaluate(spec, v_next, nullptr, nullptr);
      if (std::isfinite(ll_next) && ll_next >= out.loglik - 1e-12) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = iter;
    if (!accepted) break;

    double move = (v_next - out.v).cwiseAbs().maxCoeff();
    out.v = v_next;
    out.loglik = evaluate(spec, out.v, &g, &H);
    out.ll_path.push_back(out.loglik);
    if (move < kStepTol * (1.0 + out.v.cwiseAbs().maxCoeff())) break;
  }

  out.hessian = H;
  double gnorm = projected_grad_norm(spec, out.v, g);
  out.converged = gnorm < kGradTol;
  out.lambda_at_boundary = spec.lambda_index >= 0 &&
                           out.v(spec.lambda_index) <= -1.0 &&
                           g(spec.lambda_index) < 0.0;
  return out;
}

}  // namespace detail

namespace {

using detail::NewtonOutcome;
using detail::NewtonSpec;

// One-dimensional maximization by golden-section search.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double tol) {
  const double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < 200 && (b - a) > tol; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct ModelShape {
  bool glm = false;
  std::optional<double> lambda_fixed;
  // Number of covariate columns the model reads (0 = all of them); the
  // remaining columns still participate in cell aggregation so nested models
  // share one deviance reference.
  std::size_t active_columns = 0;

  std::size_t coef_count(const PooledDataset& agg) const {
    if (!glm) return 1u;
    return active_columns == 0 ? agg.covariate_dim() : active_columns;
  }
};

NewtonSpec build_spec(const PooledDataset& agg, const ModelShape& shape) {
  const std::size_t n_cells = agg.size();
  const std::size_t n_coef = shape.coef_count(agg);
  const bool free_lambda = !shape.lambda_fixed.has_value();
  const int dim = static_cast<int>(n_coef) + (free_lambda ? 1 : 0);

  NewtonSpec spec;
  spec.X.resize(n_cells, dim);
  spec.offset.resize(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    const PoolRow& r = agg.rows()[i];
    spec.pool_sizes.push_back(r.pool_size);
    spec.pool_counts.push_back(r.pool_count);
    spec.positives.push_back(r.positives);
    double logs = std::log(static_cast<double>(r.pool_size));
    if (shape.glm) {
      for (std::size_t j = 0; j < n_coef; ++j) {
        spec.X(i, j) = r.covariates[j];
      }
    } else {
      spec.X(i, 0) = 1.0;
    }
    if (free_lambda) {
      spec.X(i, dim - 1) = logs;
      spec.offset(i) = logs;  // u = Xb + (1 + lambda) log s
    } else {
      spec.offset(i) = (1.0 + *shape.lambda_fixed) * logs;
    }
  }
  spec.lambda_index = free_lambda ? dim - 1 : -1;
  spec.start = Eigen::VectorXd::Zero(dim);
  return spec;
}

void check_rank(const NewtonSpec& spec, const std::vector<std::string>& terms) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(spec.X);
  qr.setThreshold(1e-10);
  Eigen::Index rank = qr.rank();
  if (rank >= spec.X.cols()) return;
  // The pivot order puts the independent columns first; the remainder are
  // the redundant ones worth naming.
  std::ostringstream msg;
  msg << "covariate columns are linearly dependent:";
  auto perm = qr.colsPermutation().indices();
  for (Eigen::Index k = rank; k < spec.X.cols(); ++k) {
    std::size_t col = static_cast<std::size_t>(perm(k));
    msg << " " << (col < terms.size() ? terms[col] : "column");
  }
  throw std::invalid_argument(msg.str());
}

FitResult boundary_fit(const PooledDataset& data, const PooledDataset& agg,
                       const ModelShape& shape, double ci_level,
                       BoundaryFlag which, const std::string& label) {
  const bool free_lambda = !shape.lambda_fixed.has_value();
  const std::size_t n_coef = shape.coef_count(agg);
  FitResult fr;
  fr.model_label = label;
  fr.terms = make_terms(data, shape.glm, n_coef, free_lambda);
  double eta_hat = which == BoundaryFlag::kThetaZero ? -kInf : kInf;
  double lambda_hat = shape.lambda_fixed.value_or(0.0);
  if (shape.glm) {
    std::vector<double> beta(n_coef, 0.0);
    beta[0] = eta_hat;
    fr.estimates =
        ModelParams::beta_lambda(std::move(beta), lambda_hat, !free_lambda);
  } else {
    fr.estimates = ModelParams::eta_lambda(eta_hat, lambda_hat, !free_lambda);
  }
  fr.boundary_flags.insert(which);
  fr.converged = true;
  fr.iterations = 0;
  fr.loglik = poolbin_log_mass(agg, fr.estimates);
  fr.deviance = 0.0;
  fr.null_deviance = 0.0;
  fr.residual_df = static_cast<long>(agg.size()) -
                   static_cast<long>(n_coef + (free_lambda ? 1u : 0u));
  fr.covariance_available = false;
  fr.covariance_unavailable_reason =
      "estimate lies on the boundary of the parameter space";
  fr.ci_level = ci_level;
  fr.n_cells = static_cast<long>(agg.size());
  fr.data_fingerprint = agg.fingerprint();
  return fr;
}

FitResult fit_impl(const PooledDataset& data, const ModelShape& shape,
                   double ci_level, bool compute_null,
                   const std::string& label) {
  if (data.empty()) throw std::invalid_argument("fit: empty dataset");
  if (shape.glm) {
    if (!data.has_covariates()) {
      throw std::invalid_argument("fit_glm: data has no covariate columns");
    }
    for (const PoolRow& r : data.rows()) {
      if (r.covariates[0] != 1.0) {
        throw std::invalid_argument(
            "fit_glm: covariate vectors must start with the intercept 1");
      }
    }
  }
  const bool free_lambda = !shape.lambda_fixed.has_value();
  PooledDataset agg = aggregate(data);
  if (free_lambda && agg.distinct_pool_sizes() < 2) {
    throw std::invalid_argument(
        "a free excess intensity needs at least two distinct pool sizes; fix "
        "lambda or extend the design");
  }

  long pos = agg.total_positives();
  if (pos == 0) {
    return boundary_fit(data, agg, shape, ci_level, BoundaryFlag::kThetaZero,
                        label);
  }
  if (pos == agg.total_pools()) {
    return boundary_fit(data, agg, shape, ci_level, BoundaryFlag::kThetaOne,
                        label);
  }

  const std::size_t n_coef = shape.coef_count(agg);
  std::vector<std::string> terms =
      make_terms(data, shape.glm, n_coef, free_lambda);
  NewtonSpec spec = build_spec(agg, shape);
  check_rank(spec, terms);
  spec.start(0) = le_start(agg);
  NewtonOutcome best = detail::maximize(spec);

  if (!best.converged && free_lambda) {
    // Profile fallback: inner fixed-lambda fits are near concave and easy,
    // the outer lambda line is searched by golden section.
    ModelShape inner_shape = shape;
    auto profile = [&](double lam) {
      inner_shape.lambda_fixed = lam;
      NewtonSpec inner = build_spec(agg, inner_shape);
      inner.start(0) = le_start(agg);
      return detail::maximize(inner).loglik;
    };
    double lam_best = golden_max(profile, -1.0, 5.0, 1e-10);
    inner_shape.lambda_fixed = lam_best;
    NewtonSpec inner = build_spec(agg, inner_shape);
    inner.start(0) = le_start(agg);
    NewtonOutcome inner_out = detail::maximize(inner);
    NewtonSpec polish = spec;
    polish.start.head(inner_out.v.size()) = inner_out.v;
    polish.start(spec.lambda_index) = lam_best;
    NewtonOutcome polished = detail::maximize(polish);
    if (polished.loglik >= best.loglik) best = polished;
  }

  FitResult fr;
  fr.model_label = label;
  fr.terms = terms;
  fr.ci_level = ci_level;
  fr.iterations = best.iterations;
  fr.converged = best.converged;
  fr.loglik = best.loglik;
  fr.n_cells = static_cast<long>(agg.size());
  fr.data_fingerprint = agg.fingerprint();

  double lambda_hat = free_lambda ? best.v(spec.lambda_index)
                                  : *shape.lambda_fixed;
  if (shape.glm) {
    std::vector<double> beta(n_coef);
    for (std::size_t j = 0; j < beta.size(); ++j) beta[j] = best.v(j);
    fr.estimates = ModelParams::beta_lambda(std::move(beta), lambda_hat,
                                            !free_lambda);
  } else {
    fr.estimates = ModelParams::eta_lambda(best.v(0), lambda_hat, !free_lambda);
  }
  if (best.lambda_at_boundary) {
    fr.boundary_flags.insert(BoundaryFlag::kLambdaAtMinusOne);
  }

  std::size_t free_count = n_coef + (free_lambda ? 1u : 0u);
  fr.residual_df = static_cast<long>(agg.size()) -
                   static_cast<long>(free_count);
  double sat = detail::saturated_reference_loglik(agg);
  fr.deviance = std::max(0.0, 2.0 * (sat - fr.loglik));

  // Standard errors: a free lambda supported by fewer than three distinct
  // pool sizes pins the curve through the data points and leaves no slack to
  // gauge uncertainty, so the covariance is withheld up front.
  bool se_identified = true;
  std::string se_reason;
  if (best.lambda_at_boundary) {
    se_identified = false;
    se_reason = "excess intensity estimate sits at the lambda = -1 boundary";
  } else if (free_lambda && n_coef == 1u && agg.distinct_pool_sizes() < 3) {
    se_identified = false;
    se_reason =
        "standard errors with a free excess intensity need at least three "
        "distinct pool sizes";
    fr.boundary_flags.insert(BoundaryFlag::kUnidentifiableSe);
  }
  if (se_identified) {
    Eigen::MatrixXd A = -best.hessian;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() == Eigen::Success) {
      fr.covariance = llt.solve(
          Eigen::MatrixXd::Identity(A.rows(), A.cols()));
      fr.covariance_available = true;
    } else {
      se_identified = false;
      se_reason =
          "observed information is not positive definite at the estimates";
      fr.boundary_flags.insert(BoundaryFlag::kUnidentifiableSe);
    }
  }
  if (!se_identified) {
    fr.covariance_available = false;
    fr.covariance_unavailable_reason = se_reason;
    fr.covariance.resize(0, 0);
  }

  if (compute_null) {
    ModelShape null_shape;
    null_shape.glm = false;
    null_shape.lambda_fixed = shape.lambda_fixed.value_or(0.0);
    FitResult null_fit = fit_impl(data, null_shape, ci_level, false, "null");
    fr.null_deviance = null_fit.deviance;
  } else {
    fr.null_deviance = fr.deviance;
  }
  return fr;
}

}  // namespace

FitResult fit(const PooledDataset& data, std::optional<double> lambda_fixed,
              double ci_level) {
  ModelShape shape;
  shape.glm = false;
  shape.lambda_fixed = lambda_fixed;
  return fit_impl(data, shape, ci_level, true, "pooled-binomial");
}

FitResult fit_glm(const PooledDataset& data,
                  std::optional<double> lambda_fixed, double ci_level) {
  ModelShape shape;
  shape.glm = true;
  shape.lambda_fixed = lambda_fixed;
  return fit_impl(data, shape, ci_level, true, "pooled-binomial-glm");
}

namespace detail {

FitResult fit_glm_subset(const PooledDataset& data, std::size_t n_columns,
                         std::optional<double> lambda_fixed, double ci_level) {
  if (n_columns < 1 || n_columns > data.covariate_dim()) {
    throw std::invalid_argument(
        "fit_glm_subset: column count out of range for the data");
  }
  ModelShape shape;
  shape.glm = true;
  shape.lambda_fixed = lambda_fixed;
  shape.active_columns = n_columns;
  return fit_impl(data, shape, ci_level, true, "pooled-binomial-glm");
}

}  // namespace detail

std::vector<double> standard_errors(const FitResult& fit) {
  if (!fit.covariance_available) {
    throw std::runtime_error("standard errors unavailable: " +
                             fit.covariance_unavailable_reason);
  }
  std::vector<double> se;
  for (Eigen::Index j = 0; j < fit.covariance.rows(); ++j) {
    se.push_back(std::sqrt(std::max(0.0, fit.covariance(j, j))));
  }
  return se;
}

PrevalencePrediction predict_prevalence(const FitResult& fit,
                                        const std::vector<double>& x_new,
                                        double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("prediction level must be in (0, 1)");
  }
  if (!fit.covariance_available) {
    throw std::runtime_error("prediction interval unavailable: " +
                             fit.covariance_unavailable_reason);
  }
  const ModelParams& est = fit.estimates;
  bool is_beta = est.parameterization == Parameterization::Beta;
  std::size_t n_coef = is_beta ? est.beta.size() : 1u;
  std::vector<double> x = x_new;
  if (x.empty()) {
    x.assign(n_coef, 0.0);
    x[0] = 1.0;
  }
  if (x.size() != n_coef) {
    throw std::invalid_argument(
        "covariate profile length does not match the fitted coefficients");
  }
  double lp;
  if (is_beta) {
    lp = 0.0;
    for (std::size_t j = 0; j < n_coef; ++j) lp += x[j] * est.beta[j];
  } else {
    if (x[0] != 1.0) {
      throw std::invalid_argument(
          "a fit without covariates only predicts the intercept profile {1}");
    }
    lp = est.eta;
  }
  double var = 0.0;
  for (std::size_t a = 0; a < n_coef; ++a) {
    for (std::size_t b = 0; b < n_coef; ++b) {
      var += x[a] * x[b] * fit.covariance(a, b);
    }
  }
  double z = normal_quantile(0.5 + 0.5 * level);
  double se = std::sqrt(std::max(0.0, var));
  PrevalencePrediction out;
  out.level = level;
  out.theta = icll(lp);
  out.lower = icll(lp - z * se);
  out.upper = icll(lp + z * se);
  return out;
}

}  // namespace pooltest
