#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"
#include "ssanova/rng.hpp"

namespace ssanova {

/// Density used to draw the evaluation points x_1, ..., x_p.
enum class SamplingDensity {
  Uniform,  // i.i.d. uniform on [0,1]^r
};

/// Configuration of the multiplier-bootstrap derivative test of
/// H0: d^beta f0 = 0 on [0,1]^r.
struct TestConfig {
  DerivativeOrder beta;
  int bootstrap_samples = 500;  // B
  int num_points = 100;         // p evaluation points per statistic
  double alpha = 0.1;
  WeightFamily weights = WeightFamily::ExponentialMeanOne;
  SamplingDensity density = SamplingDensity::Uniform;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct TestOutcome {
  double statistic = 0.0;         // phi_n = max_i |d^beta fhat(x_i)|
  double critical_value = 0.0;    // t_alpha: ceil(alpha B)-th largest phi*
  double p_value = 0.0;           // (1/B) sum 1{phi*_k >= phi_n}
  bool reject = false;            // phi_n > t_alpha
  std::vector<double> bootstrap_stats;  // phi*_1..phi*_B in replicate order
  double alpha = 0.0;
  std::uint64_t seed = 0;
};

/// Draw p points from the sampling density on [0,1]^r (rows of the result).
Eigen::MatrixXd sample_eval_points(SamplingDensity density, int r, int p, Rng& rng);

/// phi = max over rows of |d^beta fhat(row)|.
double test_statistic(const FittedModel& model, const DerivativeOrder& beta,
                      const Eigen::MatrixXd& points);

/// The ceil(alpha * B)-th largest element of `samples` (1-indexed from the
/// top).  Consumes its argument by value, sorting internally.
double upper_quantile(std::vector<double> samples, double alpha);

/// The bootstrap core with all randomness supplied by the caller: replicate
/// k refits the model under weights[k] and returns
///   phi*_k = max_i | d^beta fhat*_k(x) - d^beta fhat(x) |  over  x in point_sets[k].
/// Replicates are independent, so they may run on several threads; the
/// output order matches the input order regardless of thread count.
std::vector<double> bootstrap_statistics(const FittedModel& model, const DerivativeOrder& beta,
                                         const std::vector<BootstrapWeights>& weights,
                                         const std::vector<Eigen::MatrixXd>& point_sets,
                                         int threads = 1);

/// Full test on an already-fitted model.  Randomness is derived from
/// config.seed through fixed per-purpose substreams, so results are
/// reproducible and independent of the thread count.
TestOutcome bootstrap_test(const FittedModel& model, const TestConfig& config);

/// Convenience: fit (spec, data, lambda) and run the test.
TestOutcome bootstrap_test(const KernelSpec& spec, const Dataset& data, double lambda,
                           const TestConfig& config);

}  // namespace ssanova
