#include "ssanova/tuning.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "ssanova/errors.hpp"

namespace ssanova {

namespace {

void check_lambda(double lambda) {
  if (!(std::isfinite(lambda) && lambda > 0.0)) {
    throw Error(ErrorCode::Parameter,
                "lambda must be finite and > 0, got " + std::to_string(lambda));
  }
}

void check_spectrum_args(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double lambda) {
  check_lambda(lambda);
  if (d.size() != z.size()) {
    throw Error(ErrorCode::Shape, "eigenvalue vector has length " + std::to_string(d.size()) +
                                      " but rotated response has length " +
                                      std::to_string(z.size()));
  }
  if (d.size() == 0) {
    throw Error(ErrorCode::Shape, "empty spectrum");
  }
  if (z.norm() == 0.0) {
    throw Error(ErrorCode::DegenerateResponse,
                "response is identically zero; the variance profile is undefined");
  }
}

}  // namespace

TuningGrid TuningGrid::log_spaced(int count, double lo, double hi) {
  if (count < 1) {
    throw Error(ErrorCode::Parameter,
                "grid size must be >= 1, got " + std::to_string(count));
  }
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo > 0.0 && lo <= hi)) {
    throw Error(ErrorCode::Parameter, "grid bounds must satisfy 0 < lo <= hi, got lo=" +
                                          std::to_string(lo) + ", hi=" + std::to_string(hi));
  }
  TuningGrid grid;
  grid.lambdas.resize(static_cast<std::size_t>(count));
  if (count == 1) {
    grid.lambdas[0] = hi;
    return grid;
  }
  const double log_lo = std::log(lo);
  const double step = (std::log(hi) - log_lo) / static_cast<double>(count - 1);
  for (int i = 0; i < count; ++i) {
    grid.lambdas[static_cast<std::size_t>(i)] = std::exp(log_lo + step * i);
  }
  grid.lambdas.front() = lo;
  grid.lambdas.back() = hi;
  return grid;
}

double sigma_hat_sq(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double lambda) {
  check_spectrum_args(d, z, lambda);
  const double n_lambda = static_cast<double>(d.size()) * lambda;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const double denom = d(i) + n_lambda;
    if (!(denom > 0.0)) {
      throw Error(ErrorCode::Numerical,
                  "eigenvalue " + std::to_string(d(i)) + " makes d + n*lambda non-positive");
    }
    acc += z(i) * z(i) / denom;
  }
  return lambda * acc;
}

double sigma_hat_sq(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double lambda) {
  return GramSpectrum(gram, y).sigma_hat_sq(lambda);
}

double profile_loglik(const Eigen::VectorXd& d, const Eigen::VectorXd& z, double lambda) {
  const double sigma_sq = sigma_hat_sq(d, z, lambda);
  const double n = static_cast<double>(d.size());
  const double n_lambda = n * lambda;
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    log_det += std::log(d(i) + n_lambda);
  }
  return -0.5 * (n * std::log(sigma_sq) - n * std::log(n_lambda) + log_det);
}

GramSpectrum::GramSpectrum(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y) {
  if (gram.rows() != gram.cols()) {
    throw Error(ErrorCode::Shape, "Gram matrix must be square, got " +
                                      std::to_string(gram.rows()) + "x" +
                                      std::to_string(gram.cols()));
  }
  if (gram.rows() != y.size()) {
    throw Error(ErrorCode::Shape, "Gram matrix is " + std::to_string(gram.rows()) +
                                      "x" + std::to_string(gram.cols()) +
                                      " but response has length " + std::to_string(y.size()));
  }
  if (y.size() == 0) {
    throw Error(ErrorCode::Shape, "empty response");
  }
  const double scale = gram.cwiseAbs().maxCoeff();
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1.0 + scale)) {
    throw Error(ErrorCode::Parameter, "Gram matrix is not symmetric");
  }
  if (y.norm() == 0.0) {
    throw Error(ErrorCode::DegenerateResponse,
                "response is identically zero; lambda selection is undefined");
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::Numerical, "eigendecomposition of the Gram matrix failed");
  }
  // The kernel matrix is PSD; small negative eigenvalues are rounding noise.
  d_ = eig.eigenvalues().cwiseMax(0.0);
  z_ = eig.eigenvectors().transpose() * y;
}

double GramSpectrum::sigma_hat_sq(double lambda) const {
  return ssanova::sigma_hat_sq(d_, z_, lambda);
}

double GramSpectrum::profile_loglik(double lambda) const {
  return ssanova::profile_loglik(d_, z_, lambda);
}

TuningResult select_lambda(const GramSpectrum& spectrum, const TuningGrid& grid) {
  if (grid.lambdas.empty()) {
    throw Error(ErrorCode::Parameter, "tuning grid is empty");
  }
  for (std::size_t i = 0; i + 1 < grid.lambdas.size(); ++i) {
    if (!(grid.lambdas[i] < grid.lambdas[i + 1])) {
      throw Error(ErrorCode::Parameter, "tuning grid must be strictly increasing");
    }
  }
  TuningResult result;
  result.profile.reserve(grid.lambdas.size());
  bool have_best = false;
  for (double lambda : grid.lambdas) {
    check_lambda(lambda);
    ProfilePoint point;
    point.lambda = lambda;
    point.sigma_sq = spectrum.sigma_hat_sq(lambda);
    point.loglik = spectrum.profile_loglik(lambda);
    if (!std::isfinite(point.loglik)) {
      throw Error(ErrorCode::Numerical, "profile log-likelihood is not finite at lambda=" +
                                            std::to_string(lambda));
    }
    result.profile.push_back(point);
    // Strictly better wins; exact ties resolve to the larger (smoother) lambda.
    if (!have_best || point.loglik > result.best_loglik ||
        (point.loglik == result.best_loglik && lambda > result.best_lambda)) {
      have_best = true;
      result.best_lambda = lambda;
      result.best_loglik = point.loglik;
      result.sigma_hat_sq = point.sigma_sq;
    }
  }
  return result;
}

TuningResult select_lambda(const KernelSpec& spec, const Dataset& data,
                           const TuningGrid& grid) {
  if (spec.r != data.r()) {
    throw Error(ErrorCode::Shape, "kernel spec has r=" + std::to_string(spec.r) +
                                      " but dataset has r=" + std::to_string(data.r()));
  }
  GramSpectrum spectrum(gram_matrix(spec, data.X()), data.y());
  return select_lambda(spectrum, grid);
}

}  // namespace ssanova
