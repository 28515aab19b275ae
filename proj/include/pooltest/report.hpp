#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pooltest/diagnostics.hpp"
#include "pooltest/estimation.hpp"
#include "pooltest/information.hpp"
#include "pooltest/simulation.hpp"

namespace pooltest {

// value with 6 significant digits, the default for human-readable tables.
std::string format_sig(double value, int digits = 6);

// Machine artifact for a fit; key order is fixed so outputs diff cleanly.
nlohmann::ordered_json fit_result_to_json(const FitResult& fit);

struct CoefficientRow {
  std::string term;
  double estimate = 0.0;
  std::optional<double> se;
  std::optional<double> statistic;
  std::optional<double> p;
};

// One row per free parameter; statistics are Wald z by default, Student t
// on the fit's residual df when t_pvalues is set.  SEs and p-values are
// absent when the fit's covariance is unavailable.
std::vector<CoefficientRow> coefficient_rows(const FitResult& fit,
                                             bool t_pvalues = false);

std::string coefficient_table_text(const std::vector<CoefficientRow>& rows);
std::string coefficient_table_csv(const std::vector<CoefficientRow>& rows);

std::string anova_table_text(const std::vector<AnovaRow>& rows);
std::string anova_table_csv(const std::vector<AnovaRow>& rows);
nlohmann::ordered_json anova_to_json(const std::vector<AnovaRow>& rows);

nlohmann::ordered_json wald_to_json(const WaldTest& test);

std::string design_table_text(const DesignTable& table);
std::string design_table_csv(const DesignTable& table);

std::string ppp_plot_csv(const PppPlotData& plot);
nlohmann::ordered_json ppp_plot_to_json(const PppPlotData& plot);

nlohmann::ordered_json coverage_to_json(const CoverageSummary& summary);
std::string coverage_to_csv(const CoverageSummary& summary);
nlohmann::ordered_json calibration_to_json(const CalibrationSummary& summary);
std::string calibration_to_csv(const CalibrationSummary& summary);

}  // namespace pooltest
