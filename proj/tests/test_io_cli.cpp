#include <doctest.h>

#include <Eigen/Dense>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "cli_runner.hpp"
#include "schema_validate.hpp"
#include "ssanova/errors.hpp"
#include "ssanova/io.hpp"
#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"
#include "ssanova/rng.hpp"
#include "ssanova/simlab.hpp"
#include "ssanova/tuning.hpp"

using namespace ssanova;
using clirunner::read_file;
using clirunner::run_cli;
using clirunner::TempDir;
using clirunner::write_file;
using nlohmann::json;

#ifndef SSANOVA_SCHEMA_DIR
#error "SSANOVA_SCHEMA_DIR must be defined by the build"
#endif

namespace {

json load_schema(const std::string& name) {
  return json::parse(read_file(std::filesystem::path(SSANOVA_SCHEMA_DIR) / name));
}

void check_schema(const std::string& schema_name, const std::string& document) {
  const auto violations = testutil::schema_violations(load_schema(schema_name),
                                                      json::parse(document));
  for (const auto& v : violations) {
    FAIL_CHECK(schema_name << ": " << v);
  }
  CHECK(violations.empty());
}

const char* kSmallCsv =
    "x1,x2,y\n"
    "0.05,0.90,1.20\n"
    "0.15,0.35,-0.40\n"
    "0.25,0.60,0.75\n"
    "0.35,0.10,0.10\n"
    "0.45,0.85,-1.10\n"
    "0.55,0.25,0.95\n"
    "0.65,0.70,0.30\n"
    "0.75,0.05,-0.85\n"
    "0.85,0.50,0.55\n"
    "0.95,0.95,-0.20\n";

RunInfo tiny_info(const std::string& command, const KernelSpec& spec, int n) {
  RunInfo info;
  info.command = command;
  info.spec = spec;
  info.n = n;
  info.seed = 42;
  info.input.path = "data.csv";
  info.input.response = "y";
  info.input.standardized = false;
  return info;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("standardization divides each covariate by its column maximum") {
  TempDir dir;
  const auto path = dir.path() / "raw.csv";
  write_file(path, "x1,y\n1,0.5\n2,1.5\n4,2.5\n");

  const LoadedDataset loaded = load_dataset(path.string(), "y", true);
  CHECK(loaded.data.n() == 3);
  CHECK(loaded.data.r() == 1);
  CHECK(loaded.data.X()(0, 0) == 0.25);
  CHECK(loaded.data.X()(1, 0) == 0.5);
  CHECK(loaded.data.X()(2, 0) == 1.0);
  CHECK(loaded.meta.standardized);
  REQUIRE(loaded.meta.x_max.size() == 1);
  CHECK(loaded.meta.x_max[0] == 4.0);
}

TEST_CASE("the response column may sit anywhere in the header") {
  TempDir dir;
  const auto path = dir.path() / "mid.csv";
  write_file(path, "x1,y,x2\n0.1,7.0,0.9\n0.2,8.0,0.8\n");
  const LoadedDataset loaded = load_dataset(path.string(), "y", false);
  CHECK(loaded.data.r() == 2);
  CHECK(loaded.data.names() == std::vector<std::string>{"x1", "x2"});
  CHECK(loaded.data.y()(0) == 7.0);
  CHECK(loaded.data.X()(0, 1) == 0.9);
}

TEST_CASE("blank lines and CRLF endings are tolerated") {
  TempDir dir;
  const auto path = dir.path() / "crlf.csv";
  write_file(path, "x1,y\r\n0.5,1.0\r\n\r\n0.7,2.0\r\n");
  const LoadedDataset loaded = load_dataset(path.string(), "y", false);
  CHECK(loaded.data.n() == 2);
  CHECK(loaded.data.X()(1, 0) == 0.7);
}

TEST_CASE("ingestion failures carry the offending location") {
  TempDir dir;

  const auto nan_path = dir.path() / "nan.csv";
  write_file(nan_path, "x1,y\n0.5,1.0\nNaN,2.0\n");
  try {
    load_dataset(nan_path.string(), "y", false);
    FAIL("expected ingestion error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Ingestion);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    CHECK(std::string(e.what()).find("'x1'") != std::string::npos);
  }

  const auto text_path = dir.path() / "text.csv";
  write_file(text_path, "x1,y\n0.5,oops\n");
  CHECK_THROWS_AS(load_dataset(text_path.string(), "y", false), Error);

  const auto missing_resp = dir.path() / "noresp.csv";
  write_file(missing_resp, "x1,x2\n0.5,0.5\n");
  try {
    load_dataset(missing_resp.string(), "y", false);
    FAIL("expected ingestion error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Ingestion);
    CHECK(std::string(e.what()).find("'y'") != std::string::npos);
  }

  const auto dup_path = dir.path() / "dup.csv";
  write_file(dup_path, "x1,x1,y\n0.5,0.5,1.0\n");
  CHECK_THROWS_AS(load_dataset(dup_path.string(), "y", false), Error);

  const auto ragged_path = dir.path() / "ragged.csv";
  write_file(ragged_path, "x1,x2,y\n0.5,0.5,1.0\n0.5,1.0\n");
  try {
    load_dataset(ragged_path.string(), "y", false);
    FAIL("expected ingestion error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }

  const auto empty_path = dir.path() / "empty.csv";
  write_file(empty_path, "");
  CHECK_THROWS_AS(load_dataset(empty_path.string(), "y", false), Error);

  const auto headeronly_path = dir.path() / "headeronly.csv";
  write_file(headeronly_path, "x1,y\n");
  CHECK_THROWS_AS(load_dataset(headeronly_path.string(), "y", false), Error);

  CHECK_THROWS_AS(load_dataset((dir.path() / "missing.csv").string(), "y", false), Error);

  // standardizing a non-positive column cannot work
  const auto zeromax_path = dir.path() / "zeromax.csv";
  write_file(zeromax_path, "x1,y\n0,1.0\n0,2.0\n");
  try {
    load_dataset(zeromax_path.string(), "y", true);
    FAIL("expected ingestion error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Ingestion);
  }

  // raw covariates outside the unit interval are a domain error
  const auto wide_path = dir.path() / "wide.csv";
  write_file(wide_path, "x1,y\n0.5,1.0\n1.5,2.0\n");
  try {
    load_dataset(wide_path.string(), "y", false);
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
  }
}

TEST_CASE("datasets survive a write/load round trip bitwise") {
  TempDir dir;
  Rng rng(substream_key(21u, StreamPurpose::DgpCovariates, 0));
  const Dataset data = gen_dgp(DgpSpec(1, 1.0, 0.7, 40), rng);

  const auto path = dir.path() / "roundtrip.csv";
  write_dataset_csv(path.string(), data, "y");
  const LoadedDataset loaded = load_dataset(path.string(), "y", false);
  CHECK(loaded.data.n() == data.n());
  CHECK(loaded.data.r() == data.r());
  CHECK(loaded.data.X() == data.X());
  CHECK(loaded.data.y() == data.y());
  CHECK(loaded.data.names() == data.names());
}

TEST_CASE("weight family names round trip and reject unknowns") {
  CHECK(std::string(weight_family_name(WeightFamily::ExponentialMeanOne)) == "exp");
  CHECK(std::string(weight_family_name(WeightFamily::TwoPointZeroTwo)) == "two-point");
  CHECK(parse_weight_family("exp") == WeightFamily::ExponentialMeanOne);
  CHECK(parse_weight_family("two-point") == WeightFamily::TwoPointZeroTwo);
  try {
    parse_weight_family("gaussian");
    FAIL("expected parameter error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Parameter);
  }
}

TEST_CASE("all JSON artifacts validate against the shipped schemas") {
  Rng rng(substream_key(33u, StreamPurpose::DgpCovariates, 0));
  const DgpSpec dgp(1, 0.5, 0.5, 15);
  const Dataset data = gen_dgp(dgp, rng);
  const KernelSpec spec(2, 2, 2);
  const FittedModel model = fit(spec, data, 0.1);

  check_schema("model_summary.schema.json",
               model_summary_json(tiny_info("fit", spec, data.n()), model, "fixed"));

  const TuningResult tuned = select_lambda(spec, data, TuningGrid::log_spaced(6, 1e-6, 1.0));
  check_schema("tuning_result.schema.json",
               tuning_result_json(tiny_info("tune", spec, data.n()), tuned));

  TestConfig cfg;
  cfg.beta = DerivativeOrder({1, 1});
  cfg.bootstrap_samples = 8;
  cfg.num_points = 6;
  cfg.seed = 42;
  const TestOutcome outcome = bootstrap_test(model, cfg);
  check_schema("test_outcome.schema.json",
               test_outcome_json(tiny_info("test", spec, data.n()), cfg, 0.1, "fixed", outcome));

  std::vector<std::pair<DerivativeOrder, TestOutcome>> suite;
  suite.emplace_back(DerivativeOrder::unit(2, 0), outcome);
  suite.emplace_back(DerivativeOrder({1, 1}), outcome);
  check_schema("test_suite.schema.json",
               test_suite_json(tiny_info("test", spec, data.n()), cfg, 0.1, "fixed", suite));

  RmseOptions rmse_opts;
  rmse_opts.eval_points = 10;
  rmse_opts.grid = TuningGrid::log_spaced(4, 1e-4, 1.0);
  const ExperimentReport rmse_report = rmse_experiment(dgp, 2, 5u, rmse_opts);
  RunInfo sim_info = tiny_info("simulate", spec, dgp.n);
  sim_info.input = DatasetMeta{};  // simulations ingest nothing
  check_schema("experiment_report.schema.json",
               experiment_report_json(sim_info, rmse_report));

  ExperimentOptions err_opts;
  err_opts.grid = TuningGrid::log_spaced(4, 1e-4, 1.0);
  TestConfig err_cfg = cfg;
  const ExperimentReport err_report = err_experiment(dgp, err_cfg, 2, 5u, err_opts);
  check_schema("experiment_report.schema.json",
               experiment_report_json(sim_info, err_report, &err_cfg));

  check_schema("error_report.schema.json", error_report_json("ingestion", 3, "boom"));

  // the experiment JSON echoes the test block only for err runs
  const json rmse_doc = json::parse(experiment_report_json(sim_info, rmse_report));
  CHECK(!rmse_doc.contains("test"));
  const json err_doc = json::parse(experiment_report_json(sim_info, err_report, &err_cfg));
  CHECK(err_doc.contains("test"));
}

TEST_CASE("CSV artifacts have the documented layout") {
  TestOutcome outcome;
  outcome.bootstrap_stats = {0.5, 1.25, 0.75};
  const std::string stats = bootstrap_stats_csv(outcome);
  CHECK(stats == "k,phi_star\n1,0.5\n2,1.25\n3,0.75\n");

  TuningResult tuned;
  tuned.profile = {{0.001, -3.5, 0.25}, {0.01, -3.25, 0.5}};
  const std::string profile = tuning_profile_csv(tuned);
  CHECK(profile == "lambda,loglik,sigma_sq\n0.001,-3.5,0.25\n0.01,-3.25,0.5\n");

  ExperimentReport report;
  report.values = {1.0, 0.0};
  report.replicate_seeds = {11u, 12u};
  const std::string values = experiment_values_csv(report);
  CHECK(values == "replicate,seed,value\n1,11,1\n2,12,0\n");

  Eigen::MatrixXd pts(2, 2);
  pts << 0.25, 0.5, 0.75, 1.0;
  Eigen::VectorXd fitted(2);
  fitted << 1.5, -2.5;
  const std::string preds = predictions_csv(pts, {"a", "b"}, fitted);
  CHECK(preds == "a,b,fitted\n0.25,0.5,1.5\n0.75,1,-2.5\n");
}

}  // TEST_SUITE

TEST_SUITE("cli") {

TEST_CASE("fit writes a valid model summary and per-row predictions") {
  TempDir dir;
  write_file(dir.path() / "data.csv", kSmallCsv);
  const auto res = run_cli({"fit", "data.csv", "--lambda", "0.5", "--q", "2", "--out", "art"},
                           dir.path());
  CHECK(res.exit_code == 0);
  CHECK(res.err.empty());

  const std::string summary = read_file(dir.path() / "art" / "model_summary.json");
  check_schema("model_summary.schema.json", summary);
  const json doc = json::parse(summary);
  CHECK(doc["lambda"] == 0.5);
  CHECK(doc["lambda_source"] == "fixed");
  CHECK(doc["n"] == 10);
  CHECK(doc["spec"]["q"] == 2);
  CHECK(doc["input"]["response"] == "y");

  const std::string preds = read_file(dir.path() / "art" / "predictions.csv");
  CHECK(std::count(preds.begin(), preds.end(), '\n') == 11);  // header + 10 rows
  CHECK(preds.rfind("x1,x2,fitted\n", 0) == 0);
}

TEST_CASE("tune then test --lambda auto echoes the tuned lambda") {
  TempDir dir;
  write_file(dir.path() / "data.csv", kSmallCsv);

  const auto tune_res =
      run_cli({"tune", "data.csv", "--grid-size", "12", "--out", "tuneout"}, dir.path());
  CHECK(tune_res.exit_code == 0);
  const std::string tuning = read_file(dir.path() / "tuneout" / "tuning_result.json");
  check_schema("tuning_result.schema.json", tuning);
  const json tuned = json::parse(tuning);

  const std::string profile_csv = read_file(dir.path() / "tuneout" / "tuning_profile.csv");
  CHECK(std::count(profile_csv.begin(), profile_csv.end(), '\n') == 13);  // header + grid

  const auto test_res = run_cli({"test", "data.csv", "--lambda", "auto", "--grid-size", "12",
                                 "--beta", "1,0", "--B", "12", "--p", "10", "--seed", "3",
                                 "--out", "testout"},
                                dir.path());
  CHECK(test_res.exit_code == 0);
  const std::string outcome = read_file(dir.path() / "testout" / "test_outcome.json");
  check_schema("test_outcome.schema.json", outcome);
  const json test_doc = json::parse(outcome);
  CHECK(test_doc["lambda_source"] == "auto");
  CHECK(test_doc["lambda"] == tuned["best_lambda"]);
  CHECK(test_doc["test"]["B"] == 12);

  const std::string stats_csv = read_file(dir.path() / "testout" / "bootstrap_stats.csv");
  CHECK(std::count(stats_csv.begin(), stats_csv.end(), '\n') == 13);
}

TEST_CASE("identical test runs produce byte-identical artifacts") {
  TempDir dir;
  write_file(dir.path() / "data.csv", kSmallCsv);
  const std::vector<std::string> args = {"test",   "data.csv", "--lambda", "0.05", "--beta",
                                         "1,0",    "--B",      "15",       "--p",  "12",
                                         "--seed", "20240601"};
  auto with_out = [&](const std::string& out) {
    std::vector<std::string> a = args;
    a.push_back("--out");
    a.push_back(out);
    return a;
  };
  const auto first = run_cli(with_out("run1"), dir.path());
  const auto second = run_cli(with_out("run2"), dir.path());
  CHECK(first.exit_code == 0);
  CHECK(second.exit_code == 0);
  CHECK(read_file(dir.path() / "run1" / "test_outcome.json") ==
        read_file(dir.path() / "run2" / "test_outcome.json"));
  CHECK(read_file(dir.path() / "run1" / "bootstrap_stats.csv") ==
        read_file(dir.path() / "run2" / "bootstrap_stats.csv"));
}

TEST_CASE("a zero response never rejects") {
  TempDir dir;
  write_file(dir.path() / "zero.csv",
             "x1,y\n0.1,0\n0.3,0\n0.5,0\n0.7,0\n0.9,0\n");
  const auto res = run_cli({"test", "zero.csv", "--lambda", "0.1", "--beta", "1", "--B", "10",
                            "--p", "8", "--out", "."},
                           dir.path());
  CHECK(res.exit_code == 0);
  const json doc = json::parse(read_file(dir.path() / "test_outcome.json"));
  CHECK(doc["result"]["statistic"] == 0.0);
  CHECK(doc["result"]["p_value"] == 1.0);
  CHECK(doc["result"]["reject"] == false);
}

TEST_CASE("the interaction suite tests every direction once") {
  TempDir dir;
  write_file(dir.path() / "data.csv", kSmallCsv);
  const auto res = run_cli({"test", "data.csv", "--lambda", "0.1", "--q", "2", "--suite",
                            "interactions", "--B", "8", "--p", "6", "--seed", "5", "--out", "."},
                           dir.path());
  CHECK(res.exit_code == 0);
  const std::string suite = read_file(dir.path() / "test_suite.json");
  check_schema("test_suite.schema.json", suite);
  const json doc = json::parse(suite);
  REQUIRE(doc["results"].size() == 3);  // (1,0), (0,1), (1,1) for r = 2
  CHECK(doc["results"][0]["beta"] == json::array({1, 0}));
  CHECK(doc["results"][1]["beta"] == json::array({0, 1}));
  CHECK(doc["results"][2]["beta"] == json::array({1, 1}));
  CHECK(!doc["test"].contains("beta"));
}

TEST_CASE("simulate emits a valid experiment report and values CSV") {
  TempDir dir;
  const auto res = run_cli({"simulate", "--dgp", "2", "--metric", "err", "--b", "0",
                            "--sigma", "1", "--n", "25", "--replicates", "2", "--B", "8",
                            "--p", "8", "--grid-size", "5", "--seed", "9", "--out", "."},
                           dir.path());
  CHECK(res.exit_code == 0);
  const std::string report = read_file(dir.path() / "experiment_report.json");
  check_schema("experiment_report.schema.json", report);
  const json doc = json::parse(report);
  CHECK(doc["metric"] == "err");
  CHECK(doc["dgp"]["id"] == 2);
  CHECK(doc["replicates"] == 2);
  CHECK(doc["test"]["beta"] == json::array({1, 0, 0, 0, 0}));

  const std::string values = read_file(dir.path() / "experiment_values.csv");
  CHECK(std::count(values.begin(), values.end(), '\n') == 3);

  const auto rmse_res = run_cli({"simulate", "--dgp", "1", "--metric", "rmse", "--b", "1",
                                 "--n", "20", "--replicates", "2", "--eval-points", "15",
                                 "--grid-size", "5", "--seed", "9", "--out", "rmse"},
                                dir.path());
  CHECK(rmse_res.exit_code == 0);
  const json rmse_doc = json::parse(read_file(dir.path() / "rmse" / "experiment_report.json"));
  CHECK(rmse_doc["metric"] == "rmse");
  CHECK(!rmse_doc.contains("test"));
}

TEST_CASE("the seed comes from the flag, the environment, or zero, in that order") {
  TempDir dir;
  write_file(dir.path() / "data.csv", kSmallCsv);
  const std::vector<std::string> base = {"test", "data.csv", "--lambda", "0.1",
                                         "--beta", "1,0",    "--B",      "6",
                                         "--p",    "5",      "--out",    "."};

  auto seed_of = [&](const clirunner::RunResult& res) {
    REQUIRE(res.exit_code == 0);
    return json::parse(read_file(dir.path() / "test_outcome.json"))["seed"];
  };

  CHECK(seed_of(run_cli(base, dir.path())) == 0);
  CHECK(seed_of(run_cli(base, dir.path(), "SSANOVA_SEED=123")) == 123);

  std::vector<std::string> with_flag = base;
  with_flag.push_back("--seed");
  with_flag.push_back("77");
  CHECK(seed_of(run_cli(with_flag, dir.path(), "SSANOVA_SEED=123")) == 77);

  const auto bad = run_cli(base, dir.path(), "SSANOVA_SEED=notanumber");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("failures exit with the documented codes and write error reports") {
  TempDir dir;
  write_file(dir.path() / "data.csv", kSmallCsv);

  auto check_error = [&](const std::vector<std::string>& args, int code,
                         const std::string& code_name) {
    const auto res = run_cli(args, dir.path());
    CHECK(res.exit_code == code);
    const std::string report = read_file(dir.path() / "error_report.json");
    check_schema("error_report.schema.json", report);
    const json doc = json::parse(report);
    CHECK(doc["error"]["code"] == code_name);
    CHECK(doc["error"]["exit_status"] == code);
    std::filesystem::remove(dir.path() / "error_report.json");
  };

  // unknown flag -> CLI parse failure
  check_error({"fit", "data.csv", "--nonsense"}, 2, "parameter");
  // malformed lambda -> parameter error
  check_error({"fit", "data.csv", "--lambda", "abc"}, 2, "parameter");
  check_error({"fit", "data.csv", "--lambda", "-1"}, 2, "parameter");
  // missing input file -> ingestion
  check_error({"fit", "nosuch.csv", "--lambda", "0.1"}, 3, "ingestion");
  // beta dimension mismatch -> shape
  check_error({"test", "data.csv", "--lambda", "0.1", "--beta", "1,0,0", "--B", "4", "--p", "4"},
              5, "shape");
  // derivative order beyond m-1 -> derivative_order
  check_error({"test", "data.csv", "--lambda", "0.1", "--beta", "2,0", "--B", "4", "--p", "4"},
              6, "derivative_order");

  // raw covariates outside [0,1] -> domain
  write_file(dir.path() / "wide.csv", "x1,y\n0.5,1.0\n1.5,2.0\n");
  check_error({"fit", "wide.csv", "--lambda", "0.1"}, 4, "domain");
  // but --standardize rescales them into range
  const auto ok = run_cli({"fit", "wide.csv", "--lambda", "0.1", "--standardize", "--out", "std"},
                          dir.path());
  CHECK(ok.exit_code == 0);
  const json doc = json::parse(read_file(dir.path() / "std" / "model_summary.json"));
  CHECK(doc["input"]["standardized"] == true);
  CHECK(doc["input"]["x_max"] == json::array({1.5}));

  // y identically zero with --lambda auto -> degenerate response
  write_file(dir.path() / "zero.csv", "x1,y\n0.1,0\n0.5,0\n0.9,0\n");
  check_error({"tune", "zero.csv"}, 8, "degenerate_response");
}

TEST_CASE("--help exits zero without artifacts") {
  TempDir dir;
  const auto res = run_cli({"--help"}, dir.path());
  CHECK(res.exit_code == 0);
  CHECK(res.out.find("fit") != std::string::npos);
  CHECK(!std::filesystem::exists(dir.path() / "error_report.json"));
}

}  // TEST_SUITE
