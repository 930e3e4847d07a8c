#include "ssanova/hypotest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "ssanova/errors.hpp"
#include "ssanova/parallel.hpp"

namespace ssanova {

Eigen::MatrixXd sample_eval_points(SamplingDensity density, int r, int p, Rng& rng) {
  if (r < 1) {
    throw Error(ErrorCode::Parameter, "dimension must be >= 1, got " + std::to_string(r));
  }
  if (p < 1) {
    throw Error(ErrorCode::Parameter,
                "number of evaluation points must be >= 1, got " + std::to_string(p));
  }
  Eigen::MatrixXd points(p, r);
  switch (density) {
    case SamplingDensity::Uniform:
      // Row-major fill order so the stream of draws is well defined.
      for (int i = 0; i < p; ++i) {
        for (int s = 0; s < r; ++s) points(i, s) = rng.uniform();
      }
      break;
  }
  return points;
}

double test_statistic(const FittedModel& model, const DerivativeOrder& beta,
                      const Eigen::MatrixXd& points) {
  if (points.rows() < 1) {
    throw Error(ErrorCode::Parameter, "test statistic needs at least one evaluation point");
  }
  return model.predict_derivative(beta, points).cwiseAbs().maxCoeff();
}

double upper_quantile(std::vector<double> samples, double alpha) {
  if (samples.empty()) {
    throw Error(ErrorCode::Parameter, "quantile of an empty sample");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::Parameter,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  for (double v : samples) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::Numerical, "bootstrap statistics contain a non-finite value");
    }
  }
  const int b = static_cast<int>(samples.size());
  // ceil(alpha * B)-th largest; the tiny slack keeps exact products like
  // 0.1 * 500 from rounding up to the next integer.
  int k = static_cast<int>(std::ceil(alpha * static_cast<double>(b) - 1e-9));
  k = std::max(1, std::min(k, b));
  std::sort(samples.begin(), samples.end(), std::greater<double>());
  return samples[static_cast<std::size_t>(k - 1)];
}

std::vector<double> bootstrap_statistics(const FittedModel& model, const DerivativeOrder& beta,
                                         const std::vector<BootstrapWeights>& weights,
                                         const std::vector<Eigen::MatrixXd>& point_sets,
                                         int threads) {
  if (weights.empty()) {
    throw Error(ErrorCode::Parameter, "bootstrap requires at least one replicate");
  }
  if (weights.size() != point_sets.size()) {
    throw Error(ErrorCode::Shape, "got " + std::to_string(weights.size()) +
                                      " weight vectors but " + std::to_string(point_sets.size()) +
                                      " evaluation point sets");
  }
  model.kernel().validate_order(beta);
  const int r = model.spec().r;
  for (const Eigen::MatrixXd& pts : point_sets) {
    if (pts.rows() < 1 || pts.cols() != r) {
      throw Error(ErrorCode::Shape, "each evaluation point set must be p x r with p >= 1");
    }
  }

  const int b = static_cast<int>(weights.size());
  const int n = model.n();
  std::vector<double> stats(static_cast<std::size_t>(b), 0.0);
  parallel_for(b, threads, [&](std::int64_t k) {
    try {
      const FittedModel refit = bootstrap_fit(model, weights[static_cast<std::size_t>(k)]);
      const Eigen::MatrixXd& pts = point_sets[static_cast<std::size_t>(k)];
      Eigen::VectorXd row(n);
      Eigen::VectorXd x(r);
      double worst = 0.0;
      for (int j = 0; j < pts.rows(); ++j) {
        x = pts.row(j);
        model.representer_row(beta, x, row.data());
        const double diff = row.dot(refit.coeffs()) - row.dot(model.coeffs());
        worst = std::max(worst, std::abs(diff));
      }
      stats[static_cast<std::size_t>(k)] = worst;
    } catch (const Error& e) {
      throw Error(e.code(),
                  "bootstrap replicate " + std::to_string(k) + ": " + e.what());
    }
  });
  return stats;
}

namespace {

void check_config(const FittedModel& model, const TestConfig& config) {
  model.kernel().validate_order(config.beta);
  if (config.bootstrap_samples < 1) {
    throw Error(ErrorCode::Parameter, "bootstrap sample count B must be >= 1, got " +
                                          std::to_string(config.bootstrap_samples));
  }
  if (config.num_points < 1) {
    throw Error(ErrorCode::Parameter, "evaluation point count p must be >= 1, got " +
                                          std::to_string(config.num_points));
  }
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    throw Error(ErrorCode::Parameter,
                "alpha must lie in (0, 1), got " + std::to_string(config.alpha));
  }
}

}  // namespace

TestOutcome bootstrap_test(const FittedModel& model, const TestConfig& config) {
  check_config(model, config);
  const int r = model.spec().r;
  const int b = config.bootstrap_samples;
  const int p = config.num_points;

  // All randomness is drawn up front from per-purpose substreams in a fixed
  // order; the threaded stage below consumes no randomness.
  Rng stat_rng = Rng::substream(config.seed, StreamPurpose::EvalPoints, 0);
  const Eigen::MatrixXd stat_points = sample_eval_points(config.density, r, p, stat_rng);

  std::vector<BootstrapWeights> weights;
  std::vector<Eigen::MatrixXd> point_sets;
  weights.reserve(static_cast<std::size_t>(b));
  point_sets.reserve(static_cast<std::size_t>(b));
  for (int k = 0; k < b; ++k) {
    Rng w_rng = Rng::substream(config.seed, StreamPurpose::Weights,
                               static_cast<std::uint64_t>(k));
    weights.push_back(draw_weights(config.weights, model.n(), w_rng));
    Rng p_rng = Rng::substream(config.seed, StreamPurpose::EvalPoints,
                               static_cast<std::uint64_t>(k) + 1);
    point_sets.push_back(sample_eval_points(config.density, r, p, p_rng));
  }

  TestOutcome outcome;
  outcome.alpha = config.alpha;
  outcome.seed = config.seed;
  outcome.statistic = test_statistic(model, config.beta, stat_points);
  outcome.bootstrap_stats =
      bootstrap_statistics(model, config.beta, weights, point_sets, config.threads);
  outcome.critical_value = upper_quantile(outcome.bootstrap_stats, config.alpha);
  outcome.reject = outcome.statistic > outcome.critical_value;

  int at_least = 0;
  for (double v : outcome.bootstrap_stats) {
    if (v >= outcome.statistic) ++at_least;
  }
  outcome.p_value = static_cast<double>(at_least) / static_cast<double>(b);
  return outcome;
}

TestOutcome bootstrap_test(const KernelSpec& spec, const Dataset& data, double lambda,
                           const TestConfig& config) {
  return bootstrap_test(fit(spec, data, lambda), config);
}

}  // namespace ssanova
