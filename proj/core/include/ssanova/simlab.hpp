#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "ssanova/hypotest.hpp"
#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"
#include "ssanova/rng.hpp"
#include "ssanova/tuning.hpp"

namespace ssanova {

/// One of the three synthetic data generating processes.  `b` is the signal
/// strength of the component under test (b = 0 puts the null hypothesis in
/// force); `sigma` is the noise standard deviation (0 allowed for noiseless
/// checks).
struct DgpSpec {
  int id = 1;
  double b = 0.0;
  double sigma = 1.0;
  int n = 100;

  DgpSpec() = default;
  DgpSpec(int id_, double b_, double sigma_, int n_);
};

/// Covariate dimension r of the DGP (2, 5, 3 for ids 1, 2, 3).
int dgp_dimension(int id);

/// Interaction order q the DGP is analysed with (2, 1, 3 for ids 1, 2, 3).
int dgp_interaction_order(int id);

/// The derivative direction each DGP is designed to test:
/// (1,1), (1,0,0,0,0), (1,0,0) for ids 1, 2, 3.
DerivativeOrder dgp_test_direction(int id);

/// The regression function f0 of the DGP at a point in [0,1]^r.
double dgp_mean(const DgpSpec& spec, const Eigen::VectorXd& x);

/// Analytic value of d^beta f0 at x.  Only the designated direction of the
/// DGP is supported; other directions are rejected.
double true_derivative(const DgpSpec& spec, const DerivativeOrder& beta,
                       const Eigen::VectorXd& x);

/// Draw a sample: X i.i.d. uniform on [0,1]^r (row-major draw order),
/// then Y = f0(X) + sigma * eps with eps i.i.d. standard normal.
Dataset gen_dgp(const DgpSpec& spec, Rng& rng);

struct ExperimentSummary {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 when replicates == 1
};

struct ExperimentReport {
  DgpSpec dgp;
  std::string metric;  // "rmse" or "err"
  int replicates = 0;
  std::vector<double> values;                // one per replicate
  std::vector<std::uint64_t> replicate_seeds;  // derived substream keys
  ExperimentSummary summary;
  std::uint64_t seed = 0;  // master seed the substreams derive from
};

struct ExperimentOptions {
  int smoothness = 2;  // kernel order m
  TuningGrid grid;     // empty -> TuningGrid::log_spaced() defaults
  int threads = 1;     // parallelism across replicates
};

/// Estimation study: per replicate, generate data, select lambda on the
/// grid, fit, and evaluate sqrt(mean((d^beta fhat - d^beta f0)^2)) over
/// `eval_points` fresh uniform points in the DGP's designated direction.
struct RmseOptions : ExperimentOptions {
  int eval_points = 500;
};
ExperimentReport rmse_experiment(const DgpSpec& spec, int replicates, std::uint64_t seed,
                                 const RmseOptions& options = {});

/// Testing study: per replicate, generate data, select lambda, run the
/// bootstrap test, and record the rejection indicator.  The summary mean is
/// the empirical rejection rate.  cfg.beta may be left empty to use the
/// DGP's designated direction; cfg.seed is ignored in favour of the
/// per-replicate substream keys.
ExperimentReport err_experiment(const DgpSpec& spec, const TestConfig& cfg, int replicates,
                                std::uint64_t seed, const ExperimentOptions& options = {});

}  // namespace ssanova
