#include "ssanova/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "ssanova/errors.hpp"

namespace ssanova {

namespace {

void validate_spec(const KernelSpec& spec) {
  if (spec.m < 1) {
    throw Error(ErrorCode::Parameter,
                "kernel smoothness m must be >= 1, got " + std::to_string(spec.m));
  }
  if (spec.r < 1) {
    throw Error(ErrorCode::Parameter,
                "covariate dimension r must be >= 1, got " + std::to_string(spec.r));
  }
  if (spec.q < 1 || spec.q > spec.r) {
    throw Error(ErrorCode::Parameter,
                "interaction order q must satisfy 1 <= q <= r, got q=" +
                    std::to_string(spec.q) + " with r=" + std::to_string(spec.r));
  }
}

void check_unit_interval(double v, const char* label) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::Domain, std::string(label) + " coordinate " +
                                       std::to_string(v) + " lies outside [0, 1]");
  }
}

int checked_smoothness(int m) {
  if (m < 1) {
    throw Error(ErrorCode::Parameter,
                "kernel smoothness m must be >= 1, got " + std::to_string(m));
  }
  return m;
}

double dot_n(const double* a, const double* b, int n) {
  double acc = 0.0;
  for (int i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

KernelSpec::KernelSpec(int m_, int q_, int r_) : m(m_), q(q_), r(r_) {
  validate_spec(*this);
}

DerivativeOrder::DerivativeOrder(std::vector<int> orders) : orders_(std::move(orders)) {
  for (int b : orders_) {
    if (b < 0) {
      throw Error(ErrorCode::Parameter,
                  "derivative multi-index entries must be >= 0, got " + std::to_string(b));
    }
  }
}

DerivativeOrder DerivativeOrder::zero(int dimension) {
  if (dimension < 1) {
    throw Error(ErrorCode::Parameter, "derivative multi-index dimension must be >= 1");
  }
  return DerivativeOrder(std::vector<int>(static_cast<std::size_t>(dimension), 0));
}

DerivativeOrder DerivativeOrder::unit(int dimension, int coordinate, int k) {
  if (coordinate < 0 || coordinate >= dimension) {
    throw Error(ErrorCode::Parameter,
                "derivative coordinate " + std::to_string(coordinate) +
                    " outside [0, " + std::to_string(dimension) + ")");
  }
  std::vector<int> orders(static_cast<std::size_t>(dimension), 0);
  orders[static_cast<std::size_t>(coordinate)] = k;
  return DerivativeOrder(std::move(orders));
}

int DerivativeOrder::total() const {
  int t = 0;
  for (int b : orders_) t += b;
  return t;
}

int DerivativeOrder::max_order() const {
  int mx = 0;
  for (int b : orders_) mx = std::max(mx, b);
  return mx;
}

int DerivativeOrder::support_size() const {
  int c = 0;
  for (int b : orders_) c += (b > 0) ? 1 : 0;
  return c;
}

SobolevKernel::SobolevKernel(int m)
    : m_(checked_smoothness(m)), table_(BernoulliTable::build(2 * m)) {
  inv_factorial_.resize(static_cast<std::size_t>(m_) + 1);
  double fact = 1.0;
  inv_factorial_[0] = 1.0;
  for (int v = 1; v <= m_; ++v) {
    fact *= static_cast<double>(v);
    inv_factorial_[static_cast<std::size_t>(v)] = 1.0 / fact;
  }
  // (-1)^(m-1): the Fourier expansion of B_{2m} makes this the sign that
  // turns the |x-y| term into +2 sum_k cos(2 pi k (x-y)) / (2 pi k)^{2m},
  // so the kernel is positive semi-definite for every m.
  const double sign = (m_ % 2 == 1) ? 1.0 : -1.0;
  tail_coeffs_.resize(static_cast<std::size_t>(m_));
  for (int a = 0; a < m_; ++a) {
    const int degree = 2 * m_ - a;
    double deg_fact = 1.0;
    for (int v = 2; v <= degree; ++v) deg_fact *= static_cast<double>(v);
    const std::vector<double>& raw = table_.coefficients(degree);
    std::vector<double> scaled(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) scaled[i] = sign * raw[i] / deg_fact;
    tail_coeffs_[static_cast<std::size_t>(a)] = std::move(scaled);
  }
}

void SobolevKernel::check_order(int a) const {
  if (a < 0 || a > m_ - 1) {
    throw Error(ErrorCode::DerivativeOrder,
                "derivative order " + std::to_string(a) + " outside [0, " +
                    std::to_string(m_ - 1) + "] supported by smoothness m=" +
                    std::to_string(m_));
  }
}

void SobolevKernel::poly_features(int a, double x, double* out) const {
  for (int v = 1; v <= m_; ++v) {
    out[v - 1] = table_.eval_deriv(v, a, x) * inv_factorial_[static_cast<std::size_t>(v)];
  }
}

double SobolevKernel::tail(int a, double dx) const {
  const std::vector<double>& c = tail_coeffs_[static_cast<std::size_t>(a)];
  const double ax = std::abs(dx);
  double acc = c.back();
  for (int i = static_cast<int>(c.size()) - 2; i >= 0; --i) acc = acc * ax + c[i];
  if (a == 0) return acc;  // sign(dx)^0 == 1, including at dx == 0
  if (dx == 0.0) return 0.0;
  return (dx < 0.0 && (a % 2 == 1)) ? -acc : acc;
}

double SobolevKernel::centered(int a, double x, double y) const {
  check_order(a);
  check_unit_interval(x, "first");
  check_unit_interval(y, "second");
  std::vector<double> fx(static_cast<std::size_t>(m_));
  std::vector<double> fy(static_cast<std::size_t>(m_));
  poly_features(a, x, fx.data());
  poly_features(0, y, fy.data());
  return dot_n(fx.data(), fy.data(), m_) + tail(a, x - y);
}

double SobolevKernel::value(int a, double x, double y) const {
  const double core = centered(a, x, y);
  return (a == 0) ? core + 1.0 : core;
}

AnovaKernel::AnovaKernel(KernelSpec spec) : spec_(spec), base_(spec.m) {
  validate_spec(spec_);
}

void AnovaKernel::validate_point(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != spec_.r) {
    throw Error(ErrorCode::Shape, "point has " + std::to_string(x.size()) +
                                      " coordinates, expected r=" + std::to_string(spec_.r));
  }
  for (double v : x) check_unit_interval(v, "point");
}

void AnovaKernel::validate_order(const DerivativeOrder& beta) const {
  if (beta.dimension() != spec_.r) {
    throw Error(ErrorCode::Shape,
                "derivative multi-index has dimension " + std::to_string(beta.dimension()) +
                    ", expected r=" + std::to_string(spec_.r));
  }
  if (beta.max_order() > spec_.m - 1) {
    throw Error(ErrorCode::DerivativeOrder,
                "derivative order " + std::to_string(beta.max_order()) +
                    " exceeds m-1=" + std::to_string(spec_.m - 1));
  }
}

double AnovaKernel::derivative(const DerivativeOrder& beta, std::span<const double> x,
                               std::span<const double> y) const {
  validate_order(beta);
  validate_point(x);
  validate_point(y);

  const int support = beta.support_size();
  if (support > spec_.q) return 0.0;  // structurally zero: no interaction term covers beta

  const int cap = spec_.q - support;
  double prod = 1.0;
  std::vector<double> e(static_cast<std::size_t>(cap) + 1, 0.0);
  e[0] = 1.0;
  int seen = 0;
  for (int s = 0; s < spec_.r; ++s) {
    const int a = beta.order(s);
    if (a > 0) {
      prod *= base_.centered(a, x[static_cast<std::size_t>(s)], y[static_cast<std::size_t>(s)]);
    } else if (cap > 0) {
      const double t =
          base_.centered(0, x[static_cast<std::size_t>(s)], y[static_cast<std::size_t>(s)]);
      ++seen;
      for (int k = std::min(cap, seen); k >= 1; --k) {
        e[static_cast<std::size_t>(k)] += e[static_cast<std::size_t>(k - 1)] * t;
      }
    }
  }
  double acc = 0.0;
  for (double ek : e) acc += ek;
  return prod * acc;
}

double AnovaKernel::value(std::span<const double> x, std::span<const double> y) const {
  return derivative(DerivativeOrder::zero(spec_.r), x, y);
}

double AnovaKernel::value(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  return value(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
               std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

double AnovaKernel::derivative(const DerivativeOrder& beta, const Eigen::VectorXd& x,
                               const Eigen::VectorXd& y) const {
  return derivative(beta,
                    std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                    std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

AnovaKernel::PointFeatures AnovaKernel::features(const Eigen::MatrixXd& points) const {
  if (points.cols() != spec_.r) {
    throw Error(ErrorCode::Shape, "point matrix has " + std::to_string(points.cols()) +
                                      " columns, expected r=" + std::to_string(spec_.r));
  }
  const int p = static_cast<int>(points.rows());
  const int m = spec_.m;
  PointFeatures cached;
  cached.points = points;
  cached.poly.resize(static_cast<std::size_t>(p) * static_cast<std::size_t>(spec_.r) *
                     static_cast<std::size_t>(m));
  for (int i = 0; i < p; ++i) {
    for (int s = 0; s < spec_.r; ++s) {
      check_unit_interval(points(i, s), "point");
      base_.poly_features(0, points(i, s),
                          &cached.poly[(static_cast<std::size_t>(i) * spec_.r + s) * m]);
    }
  }
  return cached;
}

void AnovaKernel::representer_row(const DerivativeOrder& beta, std::span<const double> x,
                                  const PointFeatures& cached, double* out) const {
  validate_order(beta);
  validate_point(x);

  const int r = spec_.r;
  const int m = spec_.m;
  const int p = cached.count();
  const int support = beta.support_size();
  if (support > spec_.q) {
    std::fill(out, out + p, 0.0);
    return;
  }

  std::vector<double> xf(static_cast<std::size_t>(r) * static_cast<std::size_t>(m));
  std::vector<int> active;    // coordinates with beta_s > 0
  std::vector<int> inactive;  // the rest
  for (int s = 0; s < r; ++s) {
    base_.poly_features(beta.order(s), x[static_cast<std::size_t>(s)],
                        &xf[static_cast<std::size_t>(s) * m]);
    if (beta.order(s) > 0) {
      active.push_back(s);
    } else {
      inactive.push_back(s);
    }
  }

  const int cap = spec_.q - support;
  std::vector<double> e(static_cast<std::size_t>(cap) + 1, 0.0);
  for (int i = 0; i < p; ++i) {
    const double* F = &cached.poly[static_cast<std::size_t>(i) * r * m];
    double prod = 1.0;
    for (int s : active) {
      prod *= dot_n(&xf[static_cast<std::size_t>(s) * m], F + static_cast<std::size_t>(s) * m, m) +
              base_.tail(beta.order(s), x[static_cast<std::size_t>(s)] - cached.points(i, s));
    }
    if (cap == 0) {
      out[i] = prod;
      continue;
    }
    std::fill(e.begin(), e.end(), 0.0);
    e[0] = 1.0;
    int seen = 0;
    for (int s : inactive) {
      const double t =
          dot_n(&xf[static_cast<std::size_t>(s) * m], F + static_cast<std::size_t>(s) * m, m) +
          base_.tail(0, x[static_cast<std::size_t>(s)] - cached.points(i, s));
      ++seen;
      for (int k = std::min(cap, seen); k >= 1; --k) {
        e[static_cast<std::size_t>(k)] += e[static_cast<std::size_t>(k - 1)] * t;
      }
    }
    double acc = 0.0;
    for (double ek : e) acc += ek;
    out[i] = prod * acc;
  }
}

Eigen::MatrixXd AnovaKernel::gram(const PointFeatures& cached) const {
  const int p = cached.count();
  const int r = spec_.r;
  const int m = spec_.m;
  const int cap = spec_.q;
  Eigen::MatrixXd G(p, p);
  std::vector<double> e(static_cast<std::size_t>(cap) + 1, 0.0);
  for (int j = 0; j < p; ++j) {
    const double* Fj = &cached.poly[static_cast<std::size_t>(j) * r * m];
    for (int i = 0; i <= j; ++i) {
      const double* Fi = &cached.poly[static_cast<std::size_t>(i) * r * m];
      std::fill(e.begin(), e.end(), 0.0);
      e[0] = 1.0;
      for (int s = 0; s < r; ++s) {
        const double t =
            dot_n(Fi + static_cast<std::size_t>(s) * m, Fj + static_cast<std::size_t>(s) * m, m) +
            base_.tail(0, cached.points(i, s) - cached.points(j, s));
        for (int k = std::min(cap, s + 1); k >= 1; --k) {
          e[static_cast<std::size_t>(k)] += e[static_cast<std::size_t>(k - 1)] * t;
        }
      }
      double acc = 0.0;
      for (double ek : e) acc += ek;
      G(i, j) = acc;
      G(j, i) = acc;
    }
  }
  return G;
}

}  // namespace ssanova
