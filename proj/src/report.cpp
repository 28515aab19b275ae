#include "pooltest/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "pooltest/special_functions.hpp"

namespace pooltest {

namespace {

using nlohmann::ordered_json;

// Free coefficients in solver order (terms order); lambda last when free.
std::vector<double> coefficient_values(const FitResult& fit) {
  std::vector<double> values;
  if (fit.estimates.parameterization == Parameterization::Beta) {
    values = fit.estimates.beta;
  } else {
    values.push_back(fit.estimates.eta);
  }
  if (!fit.estimates.lambda_fixed) values.push_back(fit.estimates.lambda);
  if (values.size() != fit.terms.size()) {
    throw std::logic_error("coefficient count does not match term labels");
  }
  return values;
}

ordered_json number_or_null(double v) {
  // nlohmann already writes non-finite values as null; being explicit keeps
  // the intent visible at the call sites that expect boundary estimates.
  if (!std::isfinite(v)) return nullptr;
  return v;
}

std::string pad(const std::string& s, std::size_t width) {
  if (s.size() >= width) return s;
  return std::string(width - s.size(), ' ') + s;
}

std::string opt_sig(const std::optional<double>& v) {
  return v.has_value() ? format_sig(*v) : "NA";
}

std::string opt_csv(const std::optional<double>& v) {
  return v.has_value() ? format_sig(*v) : "";
}

std::string opt_long(const std::optional<long>& v) {
  return v.has_value() ? std::to_string(*v) : "";
}

void render_table(std::ostringstream& out,
                  const std::vector<std::vector<std::string>>& cells) {
  if (cells.empty()) return;
  std::vector<std::size_t> widths(cells.front().size(), 0);
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      widths[j] = std::max(widths[j], row[j].size());
    }
  }
  for (const auto& row : cells) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << "  ";
      // First column is a label, left-aligned; numbers right-align.
      if (j == 0) {
        out << row[j] << std::string(widths[j] - row[j].size(), ' ');
      } else {
        out << pad(row[j], widths[j]);
      }
    }
    out << '\n';
  }
}

}  // namespace

std::string format_sig(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, value);
  return buf;
}

nlohmann::ordered_json fit_result_to_json(const FitResult& fit) {
  ordered_json j;
  j["model"] = fit.model_label;
  const std::vector<double> values = coefficient_values(fit);
  ordered_json estimates = ordered_json::object();
  for (std::size_t i = 0; i < fit.terms.size(); ++i) {
    estimates[fit.terms[i]] = number_or_null(values[i]);
  }
  j["estimates"] = estimates;
  if (fit.covariance_available) {
    ordered_json se = ordered_json::object();
    for (std::size_t i = 0; i < fit.terms.size(); ++i) {
      se[fit.terms[i]] = std::sqrt(fit.covariance(i, i));
    }
    j["se"] = se;
    ordered_json vcov = ordered_json::array();
    for (Eigen::Index r = 0; r < fit.covariance.rows(); ++r) {
      ordered_json row = ordered_json::array();
      for (Eigen::Index c = 0; c < fit.covariance.cols(); ++c) {
        row.push_back(fit.covariance(r, c));
      }
      vcov.push_back(row);
    }
    j["vcov"] = vcov;
  } else {
    j["se"] = nullptr;
    j["vcov"] = nullptr;
  }
  j["loglik"] = number_or_null(fit.loglik);
  j["deviance"] = number_or_null(fit.deviance);
  j["null_deviance"] = number_or_null(fit.null_deviance);
  j["df_residual"] = fit.residual_df;
  j["converged"] = fit.converged;
  ordered_json flags = ordered_json::array();
  for (BoundaryFlag f : fit.boundary_flags) {
    flags.push_back(boundary_flag_name(f));
  }
  j["flags"] = flags;
  j["lambda"] = number_or_null(fit.estimates.lambda);
  j["lambda_fixed"] = fit.estimates.lambda_fixed;
  j["theta"] = number_or_null(fit.estimates.theta);
  j["level"] = fit.ci_level;
  j["iterations"] = fit.iterations;
  j["covariance_note"] = fit.covariance_unavailable_reason;
  return j;
}

std::vector<CoefficientRow> coefficient_rows(const FitResult& fit,
                                             bool t_pvalues) {
  const std::vector<double> values = coefficient_values(fit);
  std::vector<CoefficientRow> rows(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    rows[i].term = fit.terms[i];
    rows[i].estimate = values[i];
    if (!fit.covariance_available) continue;
    const double se = std::sqrt(fit.covariance(i, i));
    rows[i].se = se;
    if (!(se > 0.0) || !std::isfinite(values[i])) continue;
    const double stat = values[i] / se;
    rows[i].statistic = stat;
    if (t_pvalues) {
      if (fit.residual_df >= 1) {
        rows[i].p = 2.0 * student_t_sf(std::abs(stat),
                                       static_cast<double>(fit.residual_df));
      }
    } else {
      rows[i].p = 2.0 * normal_sf(std::abs(stat));
    }
  }
  return rows;
}

std::string coefficient_table_text(const std::vector<CoefficientRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"term", "estimate", "se", "statistic", "p"});
  for (const auto& r : rows) {
    cells.push_back({r.term, format_sig(r.estimate), opt_sig(r.se),
                     opt_sig(r.statistic), opt_sig(r.p)});
  }
  std::ostringstream out;
  render_table(out, cells);
  return out.str();
}

std::string coefficient_table_csv(const std::vector<CoefficientRow>& rows) {
  std::ostringstream out;
  out << "term,estimate,se,statistic,p\n";
  for (const auto& r : rows) {
    out << r.term << ',' << format_sig(r.estimate) << ',' << opt_csv(r.se)
        << ',' << opt_csv(r.statistic) << ',' << opt_csv(r.p) << '\n';
  }
  return out.str();
}

std::string anova_table_text(const std::vector<AnovaRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(
      {"model", "df_resid", "resid_deviance", "df", "deviance", "p"});
  for (const auto& r : rows) {
    cells.push_back({r.label, std::to_string(r.residual_df),
                     format_sig(r.residual_deviance), opt_long(r.df_delta),
                     r.deviance_delta.has_value()
                         ? format_sig(*r.deviance_delta)
                         : "",
                     r.p_value.has_value() ? format_sig(*r.p_value) : ""});
  }
  std::ostringstream out;
  render_table(out, cells);
  return out.str();
}

std::string anova_table_csv(const std::vector<AnovaRow>& rows) {
  std::ostringstream out;
  out << "model,df_resid,resid_deviance,df,deviance,p\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.residual_df << ','
        << format_sig(r.residual_deviance) << ',' << opt_long(r.df_delta)
        << ',' << opt_csv(r.deviance_delta) << ',' << opt_csv(r.p_value)
        << '\n';
  }
  return out.str();
}

nlohmann::ordered_json anova_to_json(const std::vector<AnovaRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["model"] = r.label;
    j["df_resid"] = r.residual_df;
    j["resid_deviance"] = r.residual_deviance;
    j["df"] = r.df_delta.has_value() ? ordered_json(*r.df_delta)
                                     : ordered_json(nullptr);
    j["deviance"] = r.deviance_delta.has_value()
                        ? ordered_json(*r.deviance_delta)
                        : ordered_json(nullptr);
    j["p"] = r.p_value.has_value() ? ordered_json(*r.p_value)
                                   : ordered_json(nullptr);
    arr.push_back(j);
  }
  return arr;
}

nlohmann::ordered_json wald_to_json(const WaldTest& test) {
  ordered_json j;
  j["statistic"] = test.statistic;
  j["p"] = test.p_value;
  j["reference"] = test.used_t ? "t" : "normal";
  j["df"] = test.used_t ? ordered_json(test.df) : ordered_json(nullptr);
  return j;
}

std::string design_table_text(const DesignTable& table) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"pool_size", "cutoff"});
  char buf[32];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", row.cutoff);
    cells.push_back({std::to_string(row.pool_size), buf});
  }
  std::ostringstream out;
  render_table(out, cells);
  return out.str();
}

std::string design_table_csv(const DesignTable& table) {
  std::ostringstream out;
  out << "pool_size,cutoff\n";
  char buf[32];
  for (const auto& row : table.rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", row.cutoff);
    out << row.pool_size << ',' << buf << '\n';
  }
  return out.str();
}

std::string ppp_plot_csv(const PppPlotData& plot) {
  std::ostringstream out;
  out << "section,pool_size,pools,positives,phat,lower,upper,curve_phi,"
         "adjusted,available\n";
  for (const auto& h : plot.histogram) {
    out << "HIST," << h.pool_size << ',' << h.pools << ",,,,,,,\n";
  }
  for (const auto& p : plot.points) {
    out << "POINT," << p.pool_size << ',' << p.pools << ',' << p.positives
        << ',' << format_sig(p.phat) << ',' << format_sig(p.lower) << ','
        << format_sig(p.upper) << ",," << (p.adjusted ? 1 : 0) << ",\n";
  }
  for (const auto& c : plot.curve) {
    out << "CURVE," << c.pool_size << ",,,,,,";
    if (c.available) out << format_sig(c.phi);
    out << ",," << (c.available ? 1 : 0) << '\n';
  }
  return out.str();
}

nlohmann::ordered_json ppp_plot_to_json(const PppPlotData& plot) {
  ordered_json j;
  j["level"] = plot.level;
  j["leave_one_out"] = plot.leave_one_out;
  ordered_json hist = ordered_json::array();
  for (const auto& h : plot.histogram) {
    hist.push_back({{"pool_size", h.pool_size}, {"pools", h.pools}});
  }
  j["histogram"] = hist;
  ordered_json points = ordered_json::array();
  for (const auto& p : plot.points) {
    ordered_json row;
    row["pool_size"] = p.pool_size;
    row["pools"] = p.pools;
    row["positives"] = p.positives;
    row["phat"] = p.phat;
    row["lower"] = p.lower;
    row["upper"] = p.upper;
    row["adjusted"] = p.adjusted;
    points.push_back(row);
  }
  j["points"] = points;
  ordered_json curve = ordered_json::array();
  for (const auto& c : plot.curve) {
    ordered_json row;
    row["pool_size"] = c.pool_size;
    row["phi"] = c.available ? ordered_json(c.phi) : ordered_json(nullptr);
    row["available"] = c.available;
    curve.push_back(row);
  }
  j["curve"] = curve;
  return j;
}

nlohmann::ordered_json coverage_to_json(const CoverageSummary& summary) {
  ordered_json j;
  j["study"] = "coverage";
  j["level"] = summary.level;
  j["replicates"] = summary.replicates;
  j["used"] = summary.used;
  j["boundary"] = summary.boundary_count;
  j["nonconverged"] = summary.nonconverged_count;
  j["coverage_theta"] = number_or_null(summary.coverage_theta);
  j["coverage_lambda"] = number_or_null(summary.coverage_lambda);
  j["mean_bias"] = number_or_null(summary.mean_bias);
  j["mean_se"] = number_or_null(summary.mean_se);
  j["rng"] = summary.rng_algorithm;
  return j;
}

std::string coverage_to_csv(const CoverageSummary& summary) {
  std::ostringstream out;
  out << "level,replicates,used,boundary,nonconverged,coverage_theta,"
         "coverage_lambda,mean_bias,mean_se,rng\n";
  out << format_sig(summary.level) << ',' << summary.replicates << ','
      << summary.used << ',' << summary.boundary_count << ','
      << summary.nonconverged_count << ','
      << format_sig(summary.coverage_theta) << ','
      << format_sig(summary.coverage_lambda) << ','
      << format_sig(summary.mean_bias) << ',' << format_sig(summary.mean_se)
      << ',' << summary.rng_algorithm << '\n';
  return out.str();
}

nlohmann::ordered_json calibration_to_json(const CalibrationSummary& summary) {
  ordered_json j;
  j["study"] = "lambda_calibration";
  j["replicates"] = summary.replicates;
  j["used"] = summary.used;
  j["boundary"] = summary.boundary_count;
  j["nonconverged"] = summary.nonconverged_count;
  j["ks_distance"] = summary.ks_distance;
  j["rng"] = summary.rng_algorithm;
  j["p_values"] = summary.p_values;
  return j;
}

std::string calibration_to_csv(const CalibrationSummary& summary) {
  std::ostringstream out;
  out << "replicates,used,boundary,nonconverged,ks_distance,rng\n";
  out << summary.replicates << ',' << summary.used << ','
      << summary.boundary_count << ',' << summary.nonconverged_count << ','
      << format_sig(summary.ks_distance) << ',' << summary.rng_algorithm
      << '\n';
  return out.str();
}

}  // namespace pooltest
