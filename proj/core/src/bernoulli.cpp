#include "ssanova/bernoulli.hpp"

#include <cstdint>
#include <numeric>
#include <string>

#include "ssanova/errors.hpp"

namespace ssanova {

namespace {

// Exact rational on int64; plenty of headroom for the degrees used by the
// Sobolev kernel (2m with m <= 4, though higher degrees still fit).
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational of(std::int64_t n, std::int64_t d = 1) {
    Rational r{n, d};
    r.reduce();
    return r;
  }

  void reduce() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  Rational operator+(const Rational& o) const {
    return of(num * o.den + o.num * den, den * o.den);
  }
  Rational operator-(const Rational& o) const {
    return of(num * o.den - o.num * den, den * o.den);
  }
  Rational operator*(const Rational& o) const {
    return of(num * o.num, den * o.den);
  }

  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t result = 1;
  for (int j = 1; j <= k; ++j) {
    result = result * (n - k + j) / j;
  }
  return result;
}

}  // namespace

BernoulliTable BernoulliTable::build(int max_degree) {
  if (max_degree < 0) {
    throw Error(ErrorCode::Parameter, "Bernoulli table degree must be >= 0");
  }
  std::vector<std::vector<Rational>> exact(max_degree + 1);
  exact[0] = {Rational::of(1)};
  for (int v = 1; v <= max_degree; ++v) {
    std::vector<Rational> row(v + 1);
    row[v] = Rational::of(1);  // leading x^v term
    for (int k = 0; k < v; ++k) {
      const Rational scale =
          Rational::of(binomial(v, k), static_cast<std::int64_t>(v - k + 1));
      for (int j = 0; j <= k; ++j) {
        row[j] = row[j] - scale * exact[k][j];
      }
    }
    exact[v] = std::move(row);
  }

  std::vector<std::vector<double>> rows(max_degree + 1);
  for (int v = 0; v <= max_degree; ++v) {
    rows[v].reserve(v + 1);
    for (const Rational& c : exact[v]) rows[v].push_back(c.to_double());
  }
  return BernoulliTable(max_degree, std::move(rows));
}

void BernoulliTable::check_degree(int v) const {
  if (v < 0 || v > max_degree_) {
    throw Error(ErrorCode::Parameter,
                "Bernoulli degree " + std::to_string(v) +
                    " outside table range [0, " +
                    std::to_string(max_degree_) + "]");
  }
}

const std::vector<double>& BernoulliTable::coefficients(int v) const {
  check_degree(v);
  return rows_[v];
}

double BernoulliTable::eval(int v, double x) const {
  check_degree(v);
  const std::vector<double>& c = rows_[v];
  double acc = c[v];
  for (int j = v - 1; j >= 0; --j) acc = acc * x + c[j];
  return acc;
}

double BernoulliTable::eval_deriv(int v, int k, double x) const {
  check_degree(v);
  if (k < 0) {
    throw Error(ErrorCode::Parameter, "derivative order must be >= 0");
  }
  if (k > v) return 0.0;
  double factor = 1.0;  // v! / (v-k)!
  for (int j = v; j > v - k; --j) factor *= j;
  return factor * eval(v - k, x);
}

}  // namespace ssanova
