#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ssanova/hypotest.hpp"
#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"
#include "ssanova/simlab.hpp"
#include "ssanova/tuning.hpp"

namespace ssanova {

/// Provenance of an ingested dataset, echoed into result artifacts.
struct DatasetMeta {
  std::string path;
  std::string response = "y";
  bool standardized = false;
  std::vector<double> x_max;  // per-covariate column maxima (raw scale)
};

struct LoadedDataset {
  Dataset data;
  DatasetMeta meta;
};

/// Read a header-row CSV ('.' decimal separator), take `response_column` as
/// the response and every other column as a covariate.  With `standardize`,
/// covariates are mapped x -> x / x_max per column before validation.
LoadedDataset load_dataset(const std::string& path, const std::string& response_column = "y",
                           bool standardize = false);

/// Write a dataset as CSV with 17-significant-digit values, so reloading
/// reproduces the numbers exactly.
void write_dataset_csv(const std::string& path, const Dataset& data,
                       const std::string& response_name = "y");

/// Overwrite `path` with `content`.
void write_text_file(const std::string& path, const std::string& content);

// --- JSON result artifacts -------------------------------------------------
// All serializers produce deterministic, timestamp-free documents that
// validate against the schemas shipped under schemas/.

/// Configuration block echoed into every artifact.
struct RunInfo {
  std::string command;
  KernelSpec spec;
  int n = 0;
  std::uint64_t seed = 0;
  DatasetMeta input;
};

std::string model_summary_json(const RunInfo& info, const FittedModel& model,
                               const std::string& lambda_source);

std::string tuning_result_json(const RunInfo& info, const TuningResult& result);

std::string test_outcome_json(const RunInfo& info, const TestConfig& cfg, double lambda,
                              const std::string& lambda_source, const TestOutcome& outcome);

/// One document holding several named test outcomes (the `--suite` flow).
std::string test_suite_json(const RunInfo& info, const TestConfig& cfg, double lambda,
                            const std::string& lambda_source,
                            const std::vector<std::pair<DerivativeOrder, TestOutcome>>& results);

/// `test_cfg` is echoed for "err" experiments and ignored when null.
std::string experiment_report_json(const RunInfo& info, const ExperimentReport& report,
                                   const TestConfig* test_cfg = nullptr);

/// Machine-readable error artifact; `exit_status` mirrors the process code.
std::string error_report_json(const std::string& code_name, int exit_status,
                              const std::string& message);

// --- CSV result artifacts ---------------------------------------------------

/// Canonical names for CLI flags and JSON fields ("exp", "two-point").
const char* weight_family_name(WeightFamily family);
WeightFamily parse_weight_family(const std::string& name);

std::string bootstrap_stats_csv(const TestOutcome& outcome);
std::string tuning_profile_csv(const TuningResult& result);
std::string experiment_values_csv(const ExperimentReport& report);
std::string predictions_csv(const Eigen::MatrixXd& points,
                            const std::vector<std::string>& names,
                            const Eigen::VectorXd& fitted);

}  // namespace ssanova
