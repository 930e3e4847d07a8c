#pragma once

#include <Eigen/Core>
#include <vector>

#include "ssanova/kernel.hpp"
#include "ssanova/krr.hpp"

namespace ssanova {

/// Candidate grid for the ridge penalty.  All entries must be finite and
/// strictly positive.
struct TuningGrid {
  std::vector<double> lambdas;

  /// `count` log-spaced values from `lo` to `hi` inclusive.
  static TuningGrid log_spaced(int count = 50, double lo = 1e-8, double hi = 1.0);
};

/// Variance estimate sigma^2(lambda) = lambda * y' (R + n lambda I)^{-1} y,
/// computed from the spectrum d, z = U'y of the Gram matrix R = U D U'.
double sigma_hat_sq(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double lambda);

/// Same quantity from the Gram matrix itself (one-off eigendecomposition).
double sigma_hat_sq(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double lambda);

/// Profile log pseudo-likelihood of lambda (additive constants dropped):
///   -1/2 [ n log sigma^2(lambda) - n log(n lambda) + sum_i log(d_i + n lambda) ].
double profile_loglik(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double lambda);

/// Eigendecomposition of a Gram matrix paired with the rotated response,
/// reusable across the whole lambda grid.  Eigenvalues are clamped at zero:
/// the matrix is positive semi-definite, so tiny negative values are noise.
class GramSpectrum {
 public:
  GramSpectrum(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y);

  int n() const { return static_cast<int>(d_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return d_; }
  const Eigen::VectorXd& rotated_response() const { return z_; }

  double sigma_hat_sq(double lambda) const;
  double profile_loglik(double lambda) const;

 private:
  Eigen::VectorXd d_;
  Eigen::VectorXd z_;
};

struct ProfilePoint {
  double lambda = 0.0;
  double loglik = 0.0;
  double sigma_sq = 0.0;
};

struct TuningResult {
  double best_lambda = 0.0;
  double sigma_hat_sq = 0.0;       // at best_lambda
  double best_loglik = 0.0;        // at best_lambda
  std::vector<ProfilePoint> profile;  // one entry per grid point, grid order
};

/// Evaluate the profile over the grid and pick the maximizer; ties resolve
/// to the larger lambda (the smoother fit).
TuningResult select_lambda(const GramSpectrum& spectrum, const TuningGrid& grid);

/// Convenience: build the Gram spectrum for (spec, data) and select lambda.
TuningResult select_lambda(const KernelSpec& spec, const Dataset& data,
                           const TuningGrid& grid);

}  // namespace ssanova
