#include "ssanova/krr.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <string>
#include <utility>

#include "ssanova/errors.hpp"

namespace ssanova {

namespace {

constexpr double kRefineTrigger = 1e-10;  // refine when relative residual exceeds this
constexpr int kMaxRefineSteps = 3;

std::string cell_label(int i, int j, double v) {
  return "X(" + std::to_string(i) + "," + std::to_string(j) + ")=" + std::to_string(v);
}

}  // namespace

Dataset::Dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> names)
    : X_(std::move(X)), y_(std::move(y)), names_(std::move(names)) {
  if (X_.rows() != y_.size()) {
    throw Error(ErrorCode::Shape,
                "design matrix has " + std::to_string(X_.rows()) +
                    " rows but response has " + std::to_string(y_.size()) + " entries");
  }
  if (X_.rows() < 1) {
    throw Error(ErrorCode::Shape, "dataset must contain at least one observation");
  }
  if (X_.cols() < 1) {
    throw Error(ErrorCode::Shape, "dataset must contain at least one covariate");
  }
  for (int i = 0; i < X_.rows(); ++i) {
    for (int j = 0; j < X_.cols(); ++j) {
      const double v = X_(i, j);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorCode::Domain, cell_label(i, j, v) + " lies outside [0, 1]");
      }
    }
    if (!std::isfinite(y_(i))) {
      throw Error(ErrorCode::Domain,
                  "response contains a non-finite value at row " + std::to_string(i));
    }
  }
  if (!names_.empty() && static_cast<int>(names_.size()) != X_.cols()) {
    throw Error(ErrorCode::Shape,
                "got " + std::to_string(names_.size()) + " covariate names for " +
                    std::to_string(X_.cols()) + " columns");
  }
}

BootstrapWeights draw_weights(WeightFamily family, int n, Rng& rng) {
  if (n < 1) {
    throw Error(ErrorCode::Parameter,
                "weight count must be >= 1, got " + std::to_string(n));
  }
  BootstrapWeights out;
  out.family = family;
  out.w.resize(n);
  for (int i = 0; i < n; ++i) {
    switch (family) {
      case WeightFamily::ExponentialMeanOne:
        out.w(i) = rng.exponential();
        break;
      case WeightFamily::TwoPointZeroTwo:
        out.w(i) = rng.uniform() < 0.5 ? 0.0 : 2.0;
        break;
    }
  }
  return out;
}

struct FittedModel::Core {
  AnovaKernel kernel;
  AnovaKernel::PointFeatures train;
  Eigen::MatrixXd gram;
  Eigen::VectorXd y;

  Core(const KernelSpec& spec, const Eigen::MatrixXd& X, Eigen::VectorXd y_in)
      : kernel(spec), train(kernel.features(X)), gram(kernel.gram(train)), y(std::move(y_in)) {}
};

FittedModel::FittedModel(std::shared_ptr<const Core> core, double lambda,
                         Eigen::VectorXd coeffs, double residual)
    : core_(std::move(core)),
      lambda_(lambda),
      coeffs_(std::move(coeffs)),
      solve_residual_(residual) {}

const KernelSpec& FittedModel::spec() const { return core_->kernel.spec(); }
const AnovaKernel& FittedModel::kernel() const { return core_->kernel; }
int FittedModel::n() const { return static_cast<int>(core_->y.size()); }
const Eigen::MatrixXd& FittedModel::x_train() const { return core_->train.points; }
const Eigen::VectorXd& FittedModel::y_train() const { return core_->y; }
const Eigen::MatrixXd& FittedModel::gram() const { return core_->gram; }

void FittedModel::representer_row(const DerivativeOrder& beta, const Eigen::VectorXd& x,
                                  double* out) const {
  core_->kernel.representer_row(
      beta, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
      core_->train, out);
}

double FittedModel::predict_derivative(const DerivativeOrder& beta,
                                       const Eigen::VectorXd& x) const {
  Eigen::VectorXd row(n());
  representer_row(beta, x, row.data());
  return row.dot(coeffs_);
}

Eigen::VectorXd FittedModel::predict_derivative(const DerivativeOrder& beta,
                                                const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.rows());
  Eigen::VectorXd row(n());
  Eigen::VectorXd x(points.cols());
  for (int j = 0; j < points.rows(); ++j) {
    x = points.row(j);
    representer_row(beta, x, row.data());
    out(j) = row.dot(coeffs_);
  }
  return out;
}

double FittedModel::predict(const Eigen::VectorXd& x) const {
  return predict_derivative(DerivativeOrder::zero(spec().r), x);
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& points) const {
  return predict_derivative(DerivativeOrder::zero(spec().r), points);
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec, const Eigen::MatrixXd& X) {
  if (X.rows() < 1) {
    throw Error(ErrorCode::Shape, "Gram matrix requires at least one point");
  }
  AnovaKernel kernel(spec);
  return kernel.gram(kernel.features(X));
}

namespace {

void check_lambda(double lambda) {
  if (!(std::isfinite(lambda) && lambda > 0.0)) {
    throw Error(ErrorCode::Parameter,
                "ridge penalty lambda must be finite and > 0, got " + std::to_string(lambda));
  }
}

/// Iteratively refine A c = b given a factorization solve `apply`, returning
/// the final relative residual ||b - A c|| / ||b|| (0 when b = 0).
template <typename Solver>
double refine(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Solver& solver,
              Eigen::VectorXd& c) {
  const double b_norm = b.norm();
  if (b_norm == 0.0) {
    c.setZero();
    return 0.0;
  }
  Eigen::VectorXd resid = b - A * c;
  double rel = resid.norm() / b_norm;
  for (int step = 0; step < kMaxRefineSteps && rel > kRefineTrigger; ++step) {
    c += solver.solve(resid);
    resid = b - A * c;
    const double next = resid.norm() / b_norm;
    if (next >= rel) break;  // no further progress
    rel = next;
  }
  return rel;
}

}  // namespace

FittedModel fit(const KernelSpec& spec, const Dataset& data, double lambda) {
  check_lambda(lambda);
  if (spec.r != data.r()) {
    throw Error(ErrorCode::Shape, "kernel spec has r=" + std::to_string(spec.r) +
                                      " but dataset has r=" + std::to_string(data.r()));
  }

  auto core = std::make_shared<const FittedModel::Core>(spec, data.X(), data.y());
  const int n = data.n();
  Eigen::MatrixXd A = core->gram;
  A.diagonal().array() += static_cast<double>(n) * lambda;

  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::Numerical,
                "Cholesky factorization of R + n*lambda*I failed (lambda=" +
                    std::to_string(lambda) + ", n=" + std::to_string(n) + ")");
  }
  Eigen::VectorXd c = llt.solve(core->y);
  if (!c.allFinite()) {
    throw Error(ErrorCode::Numerical, "ridge solve produced non-finite coefficients");
  }
  const double rel = refine(A, core->y, llt, c);
  if (rel > 1e-8) {
    throw Error(ErrorCode::Numerical,
                "ridge solve residual " + std::to_string(rel) +
                    " exceeds 1e-8 of ||y|| (system too ill-conditioned)");
  }
  return FittedModel(std::move(core), lambda, std::move(c), rel);
}

FittedModel bootstrap_fit(const FittedModel& model, const BootstrapWeights& weights) {
  const int n = model.n();
  if (static_cast<int>(weights.w.size()) != n) {
    throw Error(ErrorCode::Shape, "weight vector has length " +
                                      std::to_string(weights.w.size()) + ", expected n=" +
                                      std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    const double wi = weights.w(i);
    if (!(std::isfinite(wi) && wi >= 0.0)) {
      throw Error(ErrorCode::Parameter, "bootstrap weight " + std::to_string(wi) +
                                            " at index " + std::to_string(i) +
                                            " is negative or non-finite");
    }
  }

  Eigen::MatrixXd A = weights.w.asDiagonal() * model.gram();
  A.diagonal().array() += static_cast<double>(n) * model.lambda();
  Eigen::VectorXd rhs = weights.w.cwiseProduct(model.y_train());

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd c = lu.solve(rhs);
  if (!c.allFinite()) {
    throw Error(ErrorCode::Numerical,
                "weighted bootstrap system W R + n*lambda*I is numerically singular");
  }
  const double rel = refine(A, rhs, lu, c);
  if (rel > 1e-6) {
    throw Error(ErrorCode::Numerical,
                "weighted bootstrap solve residual " + std::to_string(rel) +
                    " exceeds 1e-6 of ||W y||");
  }
  return FittedModel(model.core_, model.lambda(), std::move(c), rel);
}

}  // namespace ssanova
