#include "pooltest/cli.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "pooltest/csv.hpp"
#include "pooltest/diagnostics.hpp"
#include "pooltest/estimation.hpp"
#include "pooltest/information.hpp"
#include "pooltest/report.hpp"
#include "pooltest/simulation.hpp"

namespace pooltest {

namespace {

using nlohmann::ordered_json;

// Options shared by the subcommands that read a dataset.
struct DataOptions {
  std::string path;
  std::string response = "positive";
  std::string pools = "pools";
  std::string pool_size = "poolsize";
  std::string covariates;  // comma-separated column names
  bool fixed_intensity = false;
  double level = 0.95;
};

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream in(s);
  while (std::getline(in, part, ',')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

ModelSpec to_model_spec(const DataOptions& opts) {
  ModelSpec spec;
  spec.response = opts.response;
  spec.pools = opts.pools;
  spec.pool_size = opts.pool_size;
  spec.covariates = split_commas(opts.covariates);
  spec.fixed_intensity = opts.fixed_intensity;
  spec.level = opts.level;
  return spec;
}

struct LoadedFit {
  LoadedData loaded;
  FitResult fit_result;
  std::optional<double> lambda_fixed;
};

LoadedFit load_and_fit(const DataOptions& opts) {
  LoadedFit out;
  const ModelSpec spec = to_model_spec(opts);
  out.loaded = load_csv(opts.path, spec);
  if (opts.fixed_intensity) out.lambda_fixed = 0.0;
  out.fit_result = spec.covariates.empty()
                       ? fit(out.loaded.data, out.lambda_fixed, opts.level)
                       : fit_glm(out.loaded.data, out.lambda_fixed, opts.level);
  return out;
}

ordered_json coefficient_rows_to_json(const std::vector<CoefficientRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    ordered_json j;
    j["term"] = r.term;
    j["estimate"] = r.estimate;
    j["se"] = r.se.has_value() ? ordered_json(*r.se) : ordered_json(nullptr);
    j["statistic"] = r.statistic.has_value() ? ordered_json(*r.statistic)
                                             : ordered_json(nullptr);
    j["p"] = r.p.has_value() ? ordered_json(*r.p) : ordered_json(nullptr);
    arr.push_back(j);
  }
  return arr;
}

void run_fit(const DataOptions& opts, bool t_pvalues, const std::string& format,
             std::ostream& out) {
  LoadedFit lf = load_and_fit(opts);
  const auto coef = coefficient_rows(lf.fit_result, t_pvalues);
  const auto anova =
      anova_sequence(lf.loaded.data, lf.loaded.groups, lf.lambda_fixed);
  if (format == "csv") {
    out << coefficient_table_csv(coef) << '\n' << anova_table_csv(anova);
    return;
  }
  ordered_json doc = fit_result_to_json(lf.fit_result);
  doc["coefficients"] = coefficient_rows_to_json(coef);
  doc["anova"] = anova_to_json(anova);
  out << doc.dump(2) << '\n';
}

void run_diagnose(const DataOptions& opts, bool t_pvalues,
                  const std::string& format, std::ostream& out) {
  LoadedFit lf = load_and_fit(opts);
  FitResult saturated = fit_saturated(lf.loaded.data);
  AnovaRow row = anova_nested(lf.fit_result, saturated);
  row.label = "Actual vs saturated";

  std::optional<WaldTest> wald;
  std::string wald_note;
  if (!lf.lambda_fixed.has_value()) {
    try {
      wald = wald_test_lambda(lf.fit_result, t_pvalues);
    } catch (const std::exception& e) {
      wald_note = e.what();
    }
  } else {
    wald_note = "excess intensity was held fixed";
  }

  if (format == "csv") {
    out << anova_table_csv({row});
    if (wald.has_value()) {
      out << "\nwald_statistic,wald_p,reference\n"
          << format_sig(wald->statistic) << ',' << format_sig(wald->p_value)
          << ',' << (wald->used_t ? "t" : "normal") << '\n';
    }
    return;
  }
  ordered_json doc;
  doc["actual"] = fit_result_to_json(lf.fit_result);
  doc["saturated"] = fit_result_to_json(saturated);
  doc["anova"] = anova_to_json({row});
  doc["lambda_wald"] =
      wald.has_value() ? wald_to_json(*wald) : ordered_json(nullptr);
  if (!wald_note.empty()) doc["lambda_wald_note"] = wald_note;
  out << doc.dump(2) << '\n';
}

void run_ppp_plot(const DataOptions& opts, bool loo, const std::string& format,
                  std::ostream& out) {
  LoadedFit lf = load_and_fit(opts);
  PppPlotData plot = ppp_plot_data(lf.fit_result, lf.loaded.data, loo,
                                   opts.level);
  if (format == "json") {
    out << ppp_plot_to_json(plot).dump(2) << '\n';
  } else {
    out << ppp_plot_csv(plot);
  }
}

// key=value lines with '#' comments, mirroring SimConfig.
SimConfig parse_sim_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("simulate: cannot open config file: " + path);
  }
  std::map<std::string, std::string> kv;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("simulate: config line " +
                               std::to_string(line_no) +
                               " is not key=value: " + line);
    }
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string()
                                    : s.substr(b, e - b + 1);
    };
    kv[strip(line.substr(0, eq))] = strip(line.substr(eq + 1));
  }

  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto need = [&](const std::string& key) {
    auto v = take(key);
    if (!v.has_value()) {
      throw std::runtime_error("simulate: config is missing key: " + key);
    }
    return *v;
  };
  auto as_double = [](const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (errno != 0 || end != v.c_str() + v.size()) {
      throw std::runtime_error("simulate: config key " + key +
                               " is not a number: " + v);
    }
    return x;
  };
  auto as_bool = [](const std::string& key, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw std::runtime_error("simulate: config key " + key +
                             " is not a boolean: " + v);
  };

  SimConfig config;
  config.n_pools = static_cast<long>(as_double("n_pools", need("n_pools")));
  const std::string law = need("law");
  if (law == "fixed") {
    config.law = PoolSizeLaw::fixed(
        static_cast<int>(as_double("pool_size", need("pool_size"))));
  } else if (law == "poisson") {
    config.law =
        PoolSizeLaw::poisson(as_double("poisson_mean", need("poisson_mean")));
  } else if (law == "list") {
    std::vector<int> sizes;
    for (const auto& part : split_commas(need("sizes"))) {
      sizes.push_back(static_cast<int>(as_double("sizes", part)));
    }
    config.law = PoolSizeLaw::list(std::move(sizes));
  } else {
    throw std::runtime_error("simulate: config law must be fixed, poisson, "
                             "or list, got: " + law);
  }
  const double theta = as_double("theta", need("theta"));
  double lambda = 0.0;
  if (auto v = take("lambda")) lambda = as_double("lambda", *v);
  config.true_params = ModelParams::theta_lambda(theta, lambda);
  if (auto v = take("replicates")) {
    config.replicates = static_cast<int>(as_double("replicates", *v));
  } else {
    config.replicates = 1;
  }
  if (auto v = take("seed")) {
    config.master_seed =
        static_cast<std::uint64_t>(as_double("seed", *v));
  }
  if (auto v = take("free_lambda")) {
    config.free_lambda = as_bool("free_lambda", *v);
  }
  if (auto v = take("level")) config.level = as_double("level", *v);
  // "study" is consumed by the caller; anything else is a typo.
  kv.erase("study");
  if (!kv.empty()) {
    throw std::runtime_error("simulate: unknown config key: " +
                             kv.begin()->first);
  }
  return config;
}

std::string config_study(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto strip = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string()
                                    : s.substr(b, e - b + 1);
    };
    if (strip(line.substr(0, eq)) == "study") {
      return strip(line.substr(eq + 1));
    }
  }
  return "dataset";
}

void run_simulate(const std::string& config_path,
                  std::optional<std::uint64_t> seed_flag,
                  std::optional<int> replicates_flag,
                  const std::string& format, std::ostream& out) {
  SimConfig config = parse_sim_config(config_path);
  const std::string study = config_study(config_path);
  if (seed_flag.has_value()) config.master_seed = *seed_flag;
  if (const char* env = std::getenv("POOLTEST_SEED")) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0') {
      throw std::runtime_error(
          "simulate: POOLTEST_SEED is not an unsigned integer");
    }
    config.master_seed = static_cast<std::uint64_t>(v);
  }
  if (replicates_flag.has_value()) config.replicates = *replicates_flag;

  if (study == "dataset") {
    for (int r = 0; r < config.replicates; ++r) {
      if (config.replicates > 1) out << "# replicate " << r << '\n';
      out << dataset_to_csv(simulate_dataset(config, r));
    }
  } else if (study == "coverage") {
    CoverageSummary summary = coverage_study(config, config.level);
    if (format == "csv") {
      out << coverage_to_csv(summary);
    } else {
      out << coverage_to_json(summary).dump(2) << '\n';
    }
  } else if (study == "calibration") {
    CalibrationSummary summary = lambda_calibration_study(config);
    if (format == "csv") {
      out << calibration_to_csv(summary);
    } else {
      out << calibration_to_json(summary).dump(2) << '\n';
    }
  } else {
    throw std::runtime_error("simulate: config study must be dataset, "
                             "coverage, or calibration, got: " + study);
  }
}

void add_data_options(CLI::App* cmd, DataOptions* opts) {
  cmd->add_option("--data", opts->path, "CSV file with one record per row")
      ->required();
  cmd->add_option("--response", opts->response,
                  "positive-pool count column (default positive)");
  cmd->add_option("--pools", opts->pools,
                  "pool count column (default pools)");
  cmd->add_option("--poolsize", opts->pool_size,
                  "pool size column (default poolsize)");
  cmd->add_option("--covariates", opts->covariates,
                  "comma-separated covariate columns");
  cmd->add_flag("--fixed-intensity", opts->fixed_intensity,
                "hold the excess intensity at zero");
  cmd->add_option("--level", opts->level,
                  "confidence level (default 0.95)");
}

std::string exception_kind(const std::exception& e) {
  if (dynamic_cast<const std::invalid_argument*>(&e)) {
    return "invalid_argument";
  }
  if (dynamic_cast<const std::domain_error*>(&e)) return "domain_error";
  if (dynamic_cast<const std::runtime_error*>(&e)) return "runtime_error";
  if (dynamic_cast<const std::logic_error*>(&e)) return "logic_error";
  return "error";
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"pooled-testing prevalence estimation toolkit"};
  app.require_subcommand(1);
  bool errors_json = false;
  app.add_flag("--errors-json", errors_json,
               "emit errors as a JSON artifact on stdout");

  DataOptions fit_opts;
  bool fit_t_pvalues = false;
  std::string fit_format = "json";
  CLI::App* fit_cmd = app.add_subcommand("fit", "maximum likelihood fit");
  add_data_options(fit_cmd, &fit_opts);
  fit_cmd->add_flag("--t-pvalues", fit_t_pvalues,
                    "use Student's t on residual df for p-values");
  fit_cmd->add_option("--out", fit_format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  DataOptions diag_opts;
  bool diag_t_pvalues = false;
  std::string diag_format = "json";
  CLI::App* diag_cmd =
      app.add_subcommand("diagnose", "model adequacy checks");
  add_data_options(diag_cmd, &diag_opts);
  diag_cmd->add_flag("--t-pvalues", diag_t_pvalues,
                     "use Student's t on residual df for p-values");
  diag_cmd->add_option("--out", diag_format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  DataOptions plot_opts;
  bool plot_loo = false;
  std::string plot_format = "csv";
  CLI::App* plot_cmd =
      app.add_subcommand("ppp-plot", "positive-pool probability plot data");
  add_data_options(plot_cmd, &plot_opts);
  plot_cmd->add_flag("--loo", plot_loo,
                     "leave-one-pool-size-out fitted curve");
  plot_cmd->add_option("--out", plot_format, "output format: csv or json")
      ->check(CLI::IsMember({"json", "csv"}));

  double design_theta = 0.0;
  double design_lambda = 0.0;
  double design_a = 0.0;
  double design_t = 1.0;
  int design_max_pool = 500;
  bool design_table = false;
  CLI::App* design_cmd =
      app.add_subcommand("design", "information-optimal pool sizes");
  CLI::Option* theta_opt = design_cmd->add_option(
      "--theta", design_theta, "prevalence the design targets");
  design_cmd->add_option("--lambda", design_lambda,
                         "excess intensity (default 0)");
  design_cmd->add_option("--cost-sample", design_a,
                         "cost per sampled unit (default 0)");
  design_cmd->add_option("--cost-test", design_t,
                         "cost per test (default 1)");
  design_cmd->add_option("--max-pool", design_max_pool,
                         "largest pool size considered (default 500)");
  design_cmd->add_flag("--table", design_table,
                       "emit the full cutoff table instead");

  std::string sim_config_path;
  std::uint64_t sim_seed = 0;
  int sim_replicates = 0;
  std::string sim_format = "json";
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "synthetic datasets and studies");
  sim_cmd->add_option("--config", sim_config_path, "study config file")
      ->required();
  CLI::Option* seed_opt =
      sim_cmd->add_option("--seed", sim_seed, "master seed override");
  CLI::Option* reps_opt = sim_cmd->add_option(
      "--replicates", sim_replicates, "replicate count override");
  sim_cmd->add_option("--out", sim_format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (app.got_subcommand(fit_cmd)) {
      run_fit(fit_opts, fit_t_pvalues, fit_format, out);
    } else if (app.got_subcommand(diag_cmd)) {
      run_diagnose(diag_opts, diag_t_pvalues, diag_format, out);
    } else if (app.got_subcommand(plot_cmd)) {
      run_ppp_plot(plot_opts, plot_loo, plot_format, out);
    } else if (app.got_subcommand(design_cmd)) {
      if (design_table) {
        out << design_table_csv(prevalence_cutoffs(design_max_pool,
                                                   design_lambda, design_a,
                                                   design_t));
      } else {
        if (theta_opt->count() == 0) {
          throw std::invalid_argument(
              "design: --theta is required without --table");
        }
        out << optimal_pool_size(design_theta, design_lambda, design_a,
                                 design_t, design_max_pool)
            << '\n';
      }
    } else if (app.got_subcommand(sim_cmd)) {
      std::optional<std::uint64_t> seed_flag;
      if (seed_opt->count() > 0) seed_flag = sim_seed;
      std::optional<int> reps_flag;
      if (reps_opt->count() > 0) reps_flag = sim_replicates;
      run_simulate(sim_config_path, seed_flag, reps_flag, sim_format, out);
    }
  } catch (const std::exception& e) {
    if (errors_json) {
      ordered_json doc;
      doc["error"] = {{"type", exception_kind(e)}, {"message", e.what()}};
      out << doc.dump(2) << '\n';
    }
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace pooltest
