#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "ssanova/bernoulli.hpp"

namespace ssanova {

/// Model-space configuration: smoothness m, highest interaction order q,
/// covariate dimension r.  Validated on construction (m >= 1, 1 <= q <= r).
struct KernelSpec {
  int m = 2;
  int q = 1;
  int r = 1;

  KernelSpec() = default;
  KernelSpec(int m_, int q_, int r_);
};

/// Multi-index of partial-derivative orders, one entry per covariate.
class DerivativeOrder {
 public:
  DerivativeOrder() = default;
  explicit DerivativeOrder(std::vector<int> orders);

  static DerivativeOrder zero(int dimension);
  /// Unit direction: order `k` in `coordinate`, zero elsewhere.
  static DerivativeOrder unit(int dimension, int coordinate, int k = 1);

  int dimension() const { return static_cast<int>(orders_.size()); }
  int order(int s) const { return orders_[static_cast<std::size_t>(s)]; }
  const std::vector<int>& orders() const { return orders_; }

  int total() const;         // |beta|
  int max_order() const;     // max_s beta_s
  int support_size() const;  // #{s : beta_s > 0}
  bool is_zero() const { return support_size() == 0; }

 private:
  std::vector<int> orders_;
};

/// Univariate Sobolev reproducing kernel on [0,1],
///   R(x,y) = 1 + sum_{v=1}^m B_v(x) B_v(y) / (v!)^2
///              + (-1)^(m-1) B_{2m}(|x-y|) / (2m)!,
/// together with its derivatives in the first argument up to order m-1.
class SobolevKernel {
 public:
  explicit SobolevKernel(int m);

  int m() const { return m_; }
  const BernoulliTable& table() const { return table_; }

  /// d^a/dx^a R(x,y).  Requires x,y in [0,1] and 0 <= a <= m-1.
  double value(int a, double x, double y) const;

  /// d^a/dx^a (R(x,y) - 1): the kernel of the mean-zero subspace.
  double centered(int a, double x, double y) const;

  // --- unchecked primitives used by the bulk evaluation paths ---

  /// out[v-1] = B_v^(a)(x) / v! for v = 1..m (zero where a > v).
  void poly_features(int a, double x, double* out) const;

  /// The |x-y| term of d^a/dx^a R: sign(dx)^a scaled B_{2m-a}(|dx|)/(2m-a)!
  /// with sign(0) taken as 0.
  double tail(int a, double dx) const;

 private:
  void check_order(int a) const;

  int m_;
  BernoulliTable table_;  // degree 2m
  // tail_coeffs_[a] holds the coefficients of (-1)^(m-1) B_{2m-a}/(2m-a)!
  std::vector<std::vector<double>> tail_coeffs_;
  std::vector<double> inv_factorial_;  // 1/v!, v = 0..m
};

/// Tensor-product ANOVA kernel
///   R^(q)(x,y) = sum_{k=0}^{q} sum_{|S|=k} prod_{s in S} (R(x_s,y_s) - 1)
/// evaluated through the elementary-symmetric recursion in O(r q) per pair,
/// plus its beta-directional derivatives in the first argument.
class AnovaKernel {
 public:
  explicit AnovaKernel(KernelSpec spec);

  const KernelSpec& spec() const { return spec_; }
  const SobolevKernel& base() const { return base_; }

  double value(std::span<const double> x, std::span<const double> y) const;
  double value(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// Derivative of x -> R^(q)(x,y).  Exactly zero (no floating-point work)
  /// when the derivative support exceeds q.
  double derivative(const DerivativeOrder& beta, std::span<const double> x,
                    std::span<const double> y) const;
  double derivative(const DerivativeOrder& beta, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& y) const;

  /// Cached per-coordinate polynomial features for a fixed point set; lets
  /// Gram assembly and representer rows skip the Bernoulli evaluations of
  /// the second argument.
  struct PointFeatures {
    Eigen::MatrixXd points;    // p x r copy of the cached points
    std::vector<double> poly;  // layout [(i*r + s)*m + (v-1)]
    int count() const { return static_cast<int>(points.rows()); }
  };

  /// Validates that all rows of `points` lie in [0,1]^r.
  PointFeatures features(const Eigen::MatrixXd& points) const;

  /// out[i] = d^beta/dx R^(q)(x, P_i) for every cached point P_i.
  /// beta = 0 yields plain kernel values.
  void representer_row(const DerivativeOrder& beta, std::span<const double> x,
                       const PointFeatures& cached, double* out) const;

  /// Symmetric Gram matrix of the cached points: upper triangle computed,
  /// lower mirrored, so G - G^T is exactly zero.
  Eigen::MatrixXd gram(const PointFeatures& cached) const;

  void validate_point(std::span<const double> x) const;
  void validate_order(const DerivativeOrder& beta) const;

 private:
  KernelSpec spec_;
  SobolevKernel base_;
};

}  // namespace ssanova
