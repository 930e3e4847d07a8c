#include "ssanova/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssanova/errors.hpp"

namespace ssanova {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_cell(const std::string& token, int line_no, const std::string& column) {
  const std::string t = trim(token);
  double v = 0.0;
  const char* begin = t.data();
  const char* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw Error(ErrorCode::Ingestion, "line " + std::to_string(line_no) + ", column '" +
                                          column + "': cannot parse '" + t + "' as a number");
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::Ingestion, "line " + std::to_string(line_no) + ", column '" +
                                          column + "': non-finite value '" + t + "'");
  }
  return v;
}

ordered_json spec_block(const KernelSpec& spec) {
  return ordered_json{{"m", spec.m}, {"q", spec.q}, {"r", spec.r}};
}

ordered_json input_block(const DatasetMeta& meta) {
  ordered_json j{{"path", meta.path},
                 {"response", meta.response},
                 {"standardized", meta.standardized}};
  if (meta.standardized) j["x_max"] = meta.x_max;
  return j;
}

ordered_json header_block(const RunInfo& info) {
  ordered_json j{{"command", info.command},
                 {"spec", spec_block(info.spec)},
                 {"n", info.n},
                 {"seed", info.seed}};
  if (!info.input.path.empty()) j["input"] = input_block(info.input);
  return j;
}

ordered_json test_config_block(const TestConfig& cfg) {
  return ordered_json{{"beta", cfg.beta.orders()},
                      {"B", cfg.bootstrap_samples},
                      {"p", cfg.num_points},
                      {"alpha", cfg.alpha},
                      {"weights", weight_family_name(cfg.weights)},
                      {"density", "uniform"}};
}

std::string finish(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

const char* weight_family_name(WeightFamily family) {
  switch (family) {
    case WeightFamily::ExponentialMeanOne:
      return "exp";
    case WeightFamily::TwoPointZeroTwo:
      return "two-point";
  }
  return "exp";
}

WeightFamily parse_weight_family(const std::string& name) {
  if (name == "exp") return WeightFamily::ExponentialMeanOne;
  if (name == "two-point") return WeightFamily::TwoPointZeroTwo;
  throw Error(ErrorCode::Parameter,
              "unknown weight family '" + name + "' (expected 'exp' or 'two-point')");
}

LoadedDataset load_dataset(const std::string& path, const std::string& response_column,
                           bool standardize) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::Ingestion, "cannot open '" + path + "' for reading");
  }

  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::Ingestion, "'" + path + "' is empty (expected a header row)");
  }
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 2) {
    throw Error(ErrorCode::Ingestion,
                "header must contain at least one covariate and the response column");
  }
  for (const std::string& name : header) {
    if (name.empty()) {
      throw Error(ErrorCode::Ingestion, "header contains an empty column name");
    }
    if (std::count(header.begin(), header.end(), name) > 1) {
      throw Error(ErrorCode::Ingestion, "duplicate column name '" + name + "' in header");
    }
  }
  const auto resp_it = std::find(header.begin(), header.end(), response_column);
  if (resp_it == header.end()) {
    throw Error(ErrorCode::Ingestion,
                "response column '" + response_column + "' not found in header");
  }
  const int resp_idx = static_cast<int>(resp_it - header.begin());
  const int cols = static_cast<int>(header.size());
  const int r = cols - 1;

  std::vector<double> xs;
  std::vector<double> ys;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;  // ignore blank lines
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != cols) {
      throw Error(ErrorCode::Ingestion, "line " + std::to_string(line_no) + " has " +
                                            std::to_string(fields.size()) +
                                            " fields, expected " + std::to_string(cols));
    }
    for (int j = 0; j < cols; ++j) {
      const double v = parse_cell(fields[static_cast<std::size_t>(j)], line_no,
                                  header[static_cast<std::size_t>(j)]);
      if (j == resp_idx) {
        ys.push_back(v);
      } else {
        xs.push_back(v);
      }
    }
  }
  const int n = static_cast<int>(ys.size());
  if (n < 1) {
    throw Error(ErrorCode::Ingestion, "'" + path + "' contains no data rows");
  }

  Eigen::MatrixXd X(n, r);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < r; ++j) X(i, j) = xs[static_cast<std::size_t>(i) * r + j];
  }
  Eigen::VectorXd y = Eigen::Map<Eigen::VectorXd>(ys.data(), n);

  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(r));
  for (int j = 0; j < cols; ++j) {
    if (j != resp_idx) names.push_back(header[static_cast<std::size_t>(j)]);
  }

  DatasetMeta meta;
  meta.path = path;
  meta.response = response_column;
  meta.standardized = standardize;
  meta.x_max.resize(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j) meta.x_max[static_cast<std::size_t>(j)] = X.col(j).maxCoeff();

  if (standardize) {
    for (int j = 0; j < r; ++j) {
      const double mx = meta.x_max[static_cast<std::size_t>(j)];
      if (!(mx > 0.0)) {
        throw Error(ErrorCode::Ingestion, "column '" + names[static_cast<std::size_t>(j)] +
                                              "' has non-positive maximum " + fmt17(mx) +
                                              "; cannot standardize by x/x_max");
      }
      X.col(j) /= mx;
    }
  }

  return LoadedDataset{Dataset(std::move(X), std::move(y), std::move(names)), std::move(meta)};
}

void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name) {
  std::string out;
  const int r = data.r();
  for (int j = 0; j < r; ++j) {
    out += data.names().empty() ? "x" + std::to_string(j + 1) : data.names()[static_cast<std::size_t>(j)];
    out += ',';
  }
  out += response_name;
  out += '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < r; ++j) {
      out += fmt17(data.X()(i, j));
      out += ',';
    }
    out += fmt17(data.y()(i));
    out += '\n';
  }
  write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::Ingestion, "cannot open '" + path + "' for writing");
  }
  out << content;
  if (!out) {
    throw Error(ErrorCode::Ingestion, "failed while writing '" + path + "'");
  }
}

std::string model_summary_json(const RunInfo& info, const FittedModel& model,
                               const std::string& lambda_source) {
  ordered_json j = header_block(info);
  j["lambda"] = model.lambda();
  j["lambda_source"] = lambda_source;
  j["residual_norm"] = model.solve_residual() * model.y_train().norm();
  j["coeff_norm"] = model.coeffs().norm();
  return finish(j);
}

std::string tuning_result_json(const RunInfo& info, const TuningResult& result) {
  ordered_json j = header_block(info);
  j["grid_size"] = result.profile.size();
  j["best_lambda"] = result.best_lambda;
  j["best_loglik"] = result.best_loglik;
  j["sigma_hat_sq"] = result.sigma_hat_sq;
  ordered_json profile = ordered_json::array();
  for (const ProfilePoint& point : result.profile) {
    profile.push_back(ordered_json{
        {"lambda", point.lambda}, {"loglik", point.loglik}, {"sigma_sq", point.sigma_sq}});
  }
  j["profile"] = std::move(profile);
  return finish(j);
}

namespace {

ordered_json outcome_block(const TestOutcome& outcome) {
  return ordered_json{{"statistic", outcome.statistic},
                      {"critical_value", outcome.critical_value},
                      {"p_value", outcome.p_value},
                      {"reject", outcome.reject}};
}

}  // namespace

std::string test_outcome_json(const RunInfo& info, const TestConfig& cfg, double lambda,
                              const std::string& lambda_source, const TestOutcome& outcome) {
  ordered_json j = header_block(info);
  j["lambda"] = lambda;
  j["lambda_source"] = lambda_source;
  j["test"] = test_config_block(cfg);
  j["result"] = outcome_block(outcome);
  return finish(j);
}

std::string test_suite_json(const RunInfo& info, const TestConfig& cfg, double lambda,
                            const std::string& lambda_source,
                            const std::vector<std::pair<DerivativeOrder, TestOutcome>>& results) {
  ordered_json j = header_block(info);
  j["lambda"] = lambda;
  j["lambda_source"] = lambda_source;
  ordered_json base = test_config_block(cfg);
  base.erase("beta");
  j["test"] = std::move(base);
  ordered_json items = ordered_json::array();
  for (const auto& [beta, outcome] : results) {
    ordered_json item{{"beta", beta.orders()}};
    item.update(outcome_block(outcome));
    items.push_back(std::move(item));
  }
  j["results"] = std::move(items);
  return finish(j);
}

std::string experiment_report_json(const RunInfo& info, const ExperimentReport& report,
                                   const TestConfig* test_cfg) {
  ordered_json j = header_block(info);
  j["dgp"] = ordered_json{{"id", report.dgp.id},
                          {"b", report.dgp.b},
                          {"sigma", report.dgp.sigma},
                          {"n", report.dgp.n}};
  j["metric"] = report.metric;
  j["replicates"] = report.replicates;
  if (test_cfg != nullptr) j["test"] = test_config_block(*test_cfg);
  j["summary"] = ordered_json{{"mean", report.summary.mean}, {"sd", report.summary.sd}};
  return finish(j);
}

std::string error_report_json(const std::string& code_name, int exit_status,
                              const std::string& message) {
  ordered_json j{{"error",
                  ordered_json{{"code", code_name},
                               {"exit_status", exit_status},
                               {"message", message}}}};
  return finish(j);
}

std::string bootstrap_stats_csv(const TestOutcome& outcome) {
  std::string out = "k,phi_star\n";
  for (std::size_t k = 0; k < outcome.bootstrap_stats.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    out += fmt17(outcome.bootstrap_stats[k]);
    out += '\n';
  }
  return out;
}

std::string tuning_profile_csv(const TuningResult& result) {
  std::string out = "lambda,loglik,sigma_sq\n";
  for (const ProfilePoint& point : result.profile) {
    out += fmt17(point.lambda);
    out += ',';
    out += fmt17(point.loglik);
    out += ',';
    out += fmt17(point.sigma_sq);
    out += '\n';
  }
  return out;
}

std::string experiment_values_csv(const ExperimentReport& report) {
  std::string out = "replicate,seed,value\n";
  for (std::size_t k = 0; k < report.values.size(); ++k) {
    out += std::to_string(k + 1);
    out += ',';
    out += std::to_string(report.replicate_seeds[k]);
    out += ',';
    out += fmt17(report.values[k]);
    out += '\n';
  }
  return out;
}

std::string predictions_csv(const Eigen::MatrixXd& points, const std::vector<std::string>& names,
                            const Eigen::VectorXd& fitted) {
  if (points.rows() != fitted.size()) {
    throw Error(ErrorCode::Shape, "points and fitted values disagree in length");
  }
  std::string out;
  for (int j = 0; j < points.cols(); ++j) {
    out += names.empty() ? "x" + std::to_string(j + 1) : names[static_cast<std::size_t>(j)];
    out += ',';
  }
  out += "fitted\n";
  for (int i = 0; i < points.rows(); ++i) {
    for (int j = 0; j < points.cols(); ++j) {
      out += fmt17(points(i, j));
      out += ',';
    }
    out += fmt17(fitted(i));
    out += '\n';
  }
  return out;
}

}  // namespace ssanova
