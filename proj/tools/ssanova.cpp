// Command-line front end: `fit`, `tune`, `test`, and `simulate` workflows
// over CSV datasets, emitting JSON/CSV artifacts into an output directory.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssanova/errors.hpp"
#include "ssanova/hypotest.hpp"
#include "ssanova/io.hpp"
#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"
#include "ssanova/simlab.hpp"
#include "ssanova/tuning.hpp"

namespace fs = std::filesystem;
using namespace ssanova;

namespace {

struct Options {
  // model
  int m = 2;
  int q = 1;
  std::string lambda = "auto";
  std::vector<int> beta;
  // test
  int bootstrap = 500;
  int points = 100;
  double alpha = 0.1;
  std::string weights = "exp";
  std::string suite;
  // tuning grid
  int grid_size = 50;
  double grid_min = 1e-8;
  double grid_max = 1.0;
  // data
  std::string input;
  std::string response = "y";
  bool standardize = false;
  // simulate
  int dgp = 1;
  double b = 0.0;
  double sigma = 1.0;
  int n = 100;
  int replicates = 200;
  std::string metric = "err";
  int eval_points = 500;
  // run control
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  std::string out = ".";
};

std::uint64_t resolve_seed(const Options& opt) {
  if (opt.seed_given) return opt.seed;
  const char* env = std::getenv("SSANOVA_SEED");
  if (env == nullptr || *env == '\0') return 0;
  std::uint64_t v = 0;
  const char* end = env + std::string(env).size();
  auto [ptr, ec] = std::from_chars(env, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Parameter,
                std::string("SSANOVA_SEED='") + env + "' is not a valid 64-bit seed");
  }
  return v;
}

/// Either a fixed positive value or "auto" (select on missing grid).
std::optional<double> parse_lambda(const std::string& text) {
  if (text == "auto") return std::nullopt;
  double v = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::Parameter,
                "--lambda expects a positive real or 'auto', got '" + text + "'");
  }
  return v;
}

TuningGrid make_grid(const Options& opt) {
  return TuningGrid::log_spaced(opt.grid_size, opt.grid_min, opt.grid_max);
}

void write_artifact(const Options& opt, const std::string& name, const std::string& content) {
  fs::create_directories(opt.out);
  write_text_file((fs::path(opt.out) / name).string(), content);
}

RunInfo make_info(const std::string& command, const KernelSpec& spec, int n,
                  std::uint64_t seed, const DatasetMeta& meta) {
  RunInfo info;
  info.command = command;
  info.spec = spec;
  info.n = n;
  info.seed = seed;
  info.input = meta;
  return info;
}

TestConfig make_test_config(const Options& opt, std::uint64_t seed) {
  TestConfig cfg;
  cfg.bootstrap_samples = opt.bootstrap;
  cfg.num_points = opt.points;
  cfg.alpha = opt.alpha;
  cfg.weights = parse_weight_family(opt.weights);
  cfg.seed = seed;
  cfg.threads = opt.threads;
  return cfg;
}

int run_fit(const Options& opt) {
  const std::uint64_t seed = resolve_seed(opt);
  LoadedDataset loaded = load_dataset(opt.input, opt.response, opt.standardize);
  const KernelSpec spec(opt.m, opt.q, loaded.data.r());

  std::string lambda_source = "fixed";
  double lambda = 0.0;
  if (auto fixed = parse_lambda(opt.lambda)) {
    lambda = *fixed;
  } else {
    lambda_source = "auto";
    lambda = select_lambda(spec, loaded.data, make_grid(opt)).best_lambda;
  }

  const FittedModel model = fit(spec, loaded.data, lambda);
  const RunInfo info = make_info("fit", spec, loaded.data.n(), seed, loaded.meta);
  write_artifact(opt, "model_summary.json", model_summary_json(info, model, lambda_source));
  write_artifact(opt, "predictions.csv",
                 predictions_csv(model.x_train(), loaded.data.names(),
                                 model.predict(model.x_train())));
  return 0;
}

int run_tune(const Options& opt) {
  const std::uint64_t seed = resolve_seed(opt);
  LoadedDataset loaded = load_dataset(opt.input, opt.response, opt.standardize);
  const KernelSpec spec(opt.m, opt.q, loaded.data.r());

  const TuningResult result = select_lambda(spec, loaded.data, make_grid(opt));
  const RunInfo info = make_info("tune", spec, loaded.data.n(), seed, loaded.meta);
  write_artifact(opt, "tuning_result.json", tuning_result_json(info, result));
  write_artifact(opt, "tuning_profile.csv", tuning_profile_csv(result));
  return 0;
}

/// The interaction scan: every first-order direction, every mixed pair,
/// then every three-way direction.
std::vector<DerivativeOrder> interaction_directions(int r) {
  std::vector<DerivativeOrder> out;
  for (int i = 0; i < r; ++i) out.push_back(DerivativeOrder::unit(r, i));
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      std::vector<int> orders(static_cast<std::size_t>(r), 0);
      orders[static_cast<std::size_t>(i)] = 1;
      orders[static_cast<std::size_t>(j)] = 1;
      out.push_back(DerivativeOrder(orders));
    }
  }
  for (int i = 0; i < r; ++i) {
    for (int j = i + 1; j < r; ++j) {
      for (int k = j + 1; k < r; ++k) {
        std::vector<int> orders(static_cast<std::size_t>(r), 0);
        orders[static_cast<std::size_t>(i)] = 1;
        orders[static_cast<std::size_t>(j)] = 1;
        orders[static_cast<std::size_t>(k)] = 1;
        out.push_back(DerivativeOrder(orders));
      }
    }
  }
  return out;
}

int run_test(const Options& opt) {
  const std::uint64_t seed = resolve_seed(opt);
  LoadedDataset loaded = load_dataset(opt.input, opt.response, opt.standardize);
  const KernelSpec spec(opt.m, opt.q, loaded.data.r());

  std::string lambda_source = "fixed";
  double lambda = 0.0;
  if (auto fixed = parse_lambda(opt.lambda)) {
    lambda = *fixed;
  } else {
    lambda_source = "auto";
    lambda = select_lambda(spec, loaded.data, make_grid(opt)).best_lambda;
  }
  const FittedModel model = fit(spec, loaded.data, lambda);
  const RunInfo info = make_info("test", spec, loaded.data.n(), seed, loaded.meta);

  if (!opt.suite.empty()) {
    if (opt.suite != "interactions") {
      throw Error(ErrorCode::Parameter,
                  "unknown suite '" + opt.suite + "' (expected 'interactions')");
    }
    TestConfig base = make_test_config(opt, seed);
    std::vector<std::pair<DerivativeOrder, TestOutcome>> results;
    const std::vector<DerivativeOrder> directions = interaction_directions(loaded.data.r());
    for (std::size_t idx = 0; idx < directions.size(); ++idx) {
      TestConfig cfg = base;
      cfg.beta = directions[idx];
      cfg.seed = substream_key(seed, StreamPurpose::ReplicateSeed,
                               static_cast<std::uint64_t>(idx));
      results.emplace_back(directions[idx], bootstrap_test(model, cfg));
    }
    write_artifact(opt, "test_suite.json",
                   test_suite_json(info, base, lambda, lambda_source, results));
    return 0;
  }

  if (opt.beta.empty()) {
    throw Error(ErrorCode::Parameter, "--beta is required for `test` (or use --suite)");
  }
  TestConfig cfg = make_test_config(opt, seed);
  cfg.beta = DerivativeOrder(opt.beta);
  const TestOutcome outcome = bootstrap_test(model, cfg);
  write_artifact(opt, "test_outcome.json",
                 test_outcome_json(info, cfg, lambda, lambda_source, outcome));
  write_artifact(opt, "bootstrap_stats.csv", bootstrap_stats_csv(outcome));
  return 0;
}

int run_simulate(const Options& opt) {
  const std::uint64_t seed = resolve_seed(opt);
  const DgpSpec dgp(opt.dgp, opt.b, opt.sigma, opt.n);
  const KernelSpec spec(opt.m, dgp_interaction_order(opt.dgp), dgp_dimension(opt.dgp));
  const RunInfo info = make_info("simulate", spec, opt.n, seed, DatasetMeta{});

  ExperimentReport report;
  std::string json;
  if (opt.metric == "rmse") {
    RmseOptions options;
    options.smoothness = opt.m;
    options.grid = make_grid(opt);
    options.threads = opt.threads;
    options.eval_points = opt.eval_points;
    report = rmse_experiment(dgp, opt.replicates, seed, options);
    json = experiment_report_json(info, report);
  } else if (opt.metric == "err") {
    ExperimentOptions options;
    options.smoothness = opt.m;
    options.grid = make_grid(opt);
    options.threads = opt.threads;
    TestConfig cfg = make_test_config(opt, seed);
    if (!opt.beta.empty()) cfg.beta = DerivativeOrder(opt.beta);
    report = err_experiment(dgp, cfg, opt.replicates, seed, options);
    if (cfg.beta.dimension() == 0) cfg.beta = dgp_test_direction(opt.dgp);
    json = experiment_report_json(info, report, &cfg);
  } else {
    throw Error(ErrorCode::Parameter,
                "--metric must be 'rmse' or 'err', got '" + opt.metric + "'");
  }
  write_artifact(opt, "experiment_report.json", json);
  write_artifact(opt, "experiment_values.csv", experiment_values_csv(report));
  return 0;
}

void add_output_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--seed", opt.seed, "RNG seed (fallback: SSANOVA_SEED, then 0)")
      ->each([&opt](const std::string&) { opt.seed_given = true; });
  cmd->add_option("--threads", opt.threads, "worker threads (<1 = all cores)");
  cmd->add_option("--out", opt.out, "output directory")->capture_default_str();
}

void add_data_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("data", opt.input, "input CSV (header row required)")->required();
  cmd->add_option("--response", opt.response, "response column name")->capture_default_str();
  cmd->add_flag("--standardize", opt.standardize, "map covariates x -> x/x_max per column");
}

void add_model_options(CLI::App* cmd, Options& opt, bool with_lambda) {
  cmd->add_option("--m", opt.m, "kernel smoothness order")->capture_default_str();
  cmd->add_option("--q", opt.q, "highest interaction order")->capture_default_str();
  if (with_lambda) {
    cmd->add_option("--lambda", opt.lambda, "ridge penalty: positive real or 'auto'")
        ->capture_default_str();
  }
}

void add_grid_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--grid-size", opt.grid_size, "lambda grid size")->capture_default_str();
  cmd->add_option("--grid-min", opt.grid_min, "smallest grid lambda")->capture_default_str();
  cmd->add_option("--grid-max", opt.grid_max, "largest grid lambda")->capture_default_str();
}

void add_test_options(CLI::App* cmd, Options& opt) {
  cmd->add_option("--beta", opt.beta, "derivative multi-index, e.g. 1,0,0")->delimiter(',');
  cmd->add_option("--B", opt.bootstrap, "bootstrap sample size")->capture_default_str();
  cmd->add_option("--p", opt.points, "evaluation points per statistic")->capture_default_str();
  cmd->add_option("--alpha", opt.alpha, "significance level")->capture_default_str();
  cmd->add_option("--weights", opt.weights, "weight family: exp | two-point")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"Smoothing-spline ANOVA kernel ridge regression: derivative "
               "estimation and multiplier-bootstrap hypothesis tests"};
  app.require_subcommand(1);

  CLI::App* fit_cmd = app.add_subcommand("fit", "fit the KRR model to a CSV dataset");
  add_data_options(fit_cmd, opt);
  add_model_options(fit_cmd, opt, true);
  add_grid_options(fit_cmd, opt);
  add_output_options(fit_cmd, opt);

  CLI::App* tune_cmd = app.add_subcommand("tune", "select lambda by pseudo marginal likelihood");
  add_data_options(tune_cmd, opt);
  add_model_options(tune_cmd, opt, false);
  add_grid_options(tune_cmd, opt);
  add_output_options(tune_cmd, opt);

  CLI::App* test_cmd =
      app.add_subcommand("test", "multiplier-bootstrap test of H0: derivative = 0");
  add_data_options(test_cmd, opt);
  add_model_options(test_cmd, opt, true);
  add_grid_options(test_cmd, opt);
  add_test_options(test_cmd, opt);
  test_cmd->add_option("--suite", opt.suite,
                       "named direction sweep: 'interactions' tests every first-, "
                       "second-, and third-order direction");
  add_output_options(test_cmd, opt);

  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimation/testing studies");
  sim_cmd->add_option("--dgp", opt.dgp, "data generating process id: 1, 2 or 3")->required();
  sim_cmd->add_option("--b", opt.b, "signal strength")->capture_default_str();
  sim_cmd->add_option("--sigma", opt.sigma, "noise standard deviation")->capture_default_str();
  sim_cmd->add_option("--n", opt.n, "sample size per replicate")->capture_default_str();
  sim_cmd->add_option("--replicates", opt.replicates, "Monte Carlo replicates")
      ->capture_default_str();
  sim_cmd->add_option("--metric", opt.metric, "rmse | err")->capture_default_str();
  sim_cmd->add_option("--eval-points", opt.eval_points, "evaluation points for rmse")
      ->capture_default_str();
  sim_cmd->add_option("--m", opt.m, "kernel smoothness order")->capture_default_str();
  add_grid_options(sim_cmd, opt);
  add_test_options(sim_cmd, opt);
  add_output_options(sim_cmd, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) {
      return app.exit(e);  // --help and friends
    }
    const std::string message = e.what();
    std::cerr << "error: " << message << "\n";
    try {
      write_artifact(opt, "error_report.json",
                     error_report_json("parameter", static_cast<int>(ErrorCode::Parameter),
                                       message));
    } catch (...) {
      // the report is best-effort; the exit status still signals the failure
    }
    return static_cast<int>(ErrorCode::Parameter);
  }

  try {
    if (app.got_subcommand(fit_cmd)) return run_fit(opt);
    if (app.got_subcommand(tune_cmd)) return run_tune(opt);
    if (app.got_subcommand(test_cmd)) return run_test(opt);
    return run_simulate(opt);
  } catch (const Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what() << "\n";
    try {
      write_artifact(opt, "error_report.json",
                     error_report_json(error_code_name(e.code()),
                                       static_cast<int>(e.code()), e.what()));
    } catch (...) {
    }
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    try {
      write_artifact(opt, "error_report.json", error_report_json("internal", 1, e.what()));
    } catch (...) {
    }
    return 1;
  }
}
