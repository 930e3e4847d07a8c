#pragma once

#include <vector>

namespace ssanova {

/// Monomial coefficients of the Bernoulli polynomials B_0..B_max_degree.
///
/// Rows are built once in exact rational arithmetic (the coefficients are
/// ratios of small integers at the degrees used here) and stored as
/// doubles, so repeated evaluation carries no accumulation error beyond a
/// single rounding per coefficient.  Immutable after construction and
/// safe to share across threads.
class BernoulliTable {
 public:
  /// Populate rows 0..max_degree via the recurrence
  /// B_v(x) = x^v - sum_{k<v} C(v,k) B_k(x) / (v-k+1).
  static BernoulliTable build(int max_degree);

  int max_degree() const { return max_degree_; }

  /// Coefficients of B_v in ascending order, c[0] + c[1] x + ... + c[v] x^v.
  const std::vector<double>& coefficients(int v) const;

  /// B_v(x) by Horner's scheme.  x may lie outside [0,1].
  double eval(int v, double x) const;

  /// k-th derivative of B_v at x, via B_v^(k) = v!/(v-k)! B_{v-k}.
  /// Returns 0 for k > v.
  double eval_deriv(int v, int k, double x) const;

 private:
  BernoulliTable(int max_degree, std::vector<std::vector<double>> rows)
      : max_degree_(max_degree), rows_(std::move(rows)) {}

  void check_degree(int v) const;

  int max_degree_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace ssanova
