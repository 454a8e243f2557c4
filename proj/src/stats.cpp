#include "fbmclt/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fbmclt/errors.hpp"

namespace fbmclt {

double Estimate::z_score(double target) const {
  if (std_error == 0.0) return value == target ? 0.0 : INFINITY;
  return std::abs(value - target) / std_error;
}

Estimate mean_estimate(std::span<const double> x) {
  if (x.size() < 2) throw PreconditionError("a standard error needs at least two values");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

Estimate raw_moment(std::span<const double> x, int m) {
  std::vector<double> powered(x.size());
  std::transform(x.begin(), x.end(), powered.begin(), [m](double v) { return std::pow(v, m); });
  return mean_estimate(powered);
}

double sample_variance(std::span<const double> x) {
  const Estimate e = mean_estimate(x);
  return e.std_error * e.std_error * static_cast<double>(x.size());
}

double sample_kurtosis(std::span<const double> x) {
  if (x.size() < 2) throw PreconditionError("kurtosis needs at least two values");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double c = (v - mean) * (v - mean);
    m2 += c;
    m4 += c * c;
  }
  m2 /= n;
  m4 /= n;
  return m4 / (m2 * m2);
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series alternates badly; Q is 1 to double precision here
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw PreconditionError("KS test needs two nonempty samples");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  const double ne = std::sqrt(nx * ny / (nx + ny));
  // Stephens' small-sample correction of the asymptotic argument.
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  return {d, kolmogorov_survival(lambda)};
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double sign_test_p_value(std::span<const double> x) {
  std::size_t pos = 0, neg = 0;
  for (double v : x) {
    if (v > 0) ++pos;
    if (v < 0) ++neg;
  }
  const double n = static_cast<double>(pos + neg);
  if (n == 0.0) return 1.0;
  // Normal approximation with continuity correction.
  const double k = static_cast<double>(std::max(pos, neg));
  const double z = (k - 0.5 - 0.5 * n) / (0.5 * std::sqrt(n));
  return std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
}

double regression_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw PreconditionError("regression needs matching samples of size >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace fbmclt
