#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ssanova/kernel.hpp"
#include "ssanova/rng.hpp"

namespace ssanova {

/// Regression sample: design matrix X (n x r, all entries in [0,1]) and
/// response vector y.  Column names are optional  (empty, or one per
/// covariate).  Validated on construction.
class Dataset {
 public:
  Dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
          std::vector<std::string> names = {});

  int n() const { return static_cast<int>(X_.rows()); }
  int r() const { return static_cast<int>(X_.cols()); }
  const Eigen::MatrixXd& X() const { return X_; }
  const Eigen::VectorXd& y() const { return y_; }
  const std::vector<std::string>& names() const { return names_; }

 private:
  Eigen::MatrixXd X_;
  Eigen::VectorXd y_;
  std::vector<std::string> names_;
};

/// Bootstrap multiplier weights: nonnegative, independent, mean-one.
enum class WeightFamily {
  ExponentialMeanOne,  // W ~ Exp(1)
  TwoPointZeroTwo,     // W in {0, 2} with probability 1/2 each
};

struct BootstrapWeights {
  Eigen::VectorXd w;
  WeightFamily family = WeightFamily::ExponentialMeanOne;
};

/// Draw n multiplier weights from the given family.
BootstrapWeights draw_weights(WeightFamily family, int n, Rng& rng);

/// Result of a kernel ridge regression fit: immutable after construction.
/// The kernel, training design, cached polynomial features, Gram matrix
/// and response are shared between a fit and its bootstrap refits.
class FittedModel {
 public:
  const KernelSpec& spec() const;
  const AnovaKernel& kernel() const;
  double lambda() const { return lambda_; }
  int n() const;
  const Eigen::MatrixXd& x_train() const;
  const Eigen::VectorXd& y_train() const;
  const Eigen::MatrixXd& gram() const;
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  /// Relative linear-system residual of the solve that produced coeffs().
  double solve_residual() const { return solve_residual_; }

  /// fhat(x) = sum_i c_i R^(q)(x, X_i).
  double predict(const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& points) const;

  /// Plug-in derivative estimate d^beta fhat(x).
  double predict_derivative(const DerivativeOrder& beta, const Eigen::VectorXd& x) const;
  Eigen::VectorXd predict_derivative(const DerivativeOrder& beta,
                                     const Eigen::MatrixXd& points) const;

  /// out[i] = d^beta/dx R^(q)(x, X_i): the representer row underlying both
  /// prediction ops.  `out` must have length n.
  void representer_row(const DerivativeOrder& beta, const Eigen::VectorXd& x,
                       double* out) const;

  friend FittedModel fit(const KernelSpec&, const Dataset&, double lambda);
  friend FittedModel bootstrap_fit(const FittedModel&, const BootstrapWeights&);

 private:
  struct Core;  // shared immutable training-side state
  FittedModel(std::shared_ptr<const Core> core, double lambda, Eigen::VectorXd coeffs,
              double residual);

  std::shared_ptr<const Core> core_;
  double lambda_ = 0.0;
  Eigen::VectorXd coeffs_;
  double solve_residual_ = 0.0;
};

/// Gram matrix of the ANOVA kernel over the rows of X.
Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X);

/// Solve (R + n lambda I) c = y by Cholesky and package the result.
FittedModel fit(const KernelSpec& spec, const Dataset& data, double lambda);

/// Weighted bootstrap refit: solve (W R + n lambda I) c* = W y, reusing the
/// Gram matrix of the original fit.  The system is nonsymmetric, so the
/// solve goes through a pivoted LU factorization.
FittedModel bootstrap_fit(const FittedModel& model, const BootstrapWeights& weights);

}  // namespace ssanova
