#pragma once

#include <span>
#include <vector>

namespace fbmclt {

/// A Monte-Carlo mean with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  /// |value - target| / std_error.
  double z_score(double target) const;
};

/// Sample mean of x with standard error; needs at least two values.
Estimate mean_estimate(std::span<const double> x);
/// Mean of x^m with standard error.
Estimate raw_moment(std::span<const double> x, int m);
/// Unbiased sample variance.
double sample_variance(std::span<const double> x);
/// Sample kurtosis m4 / m2^2 about the sample mean.
double sample_kurtosis(std::span<const double> x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// Two-sided sign test p-value for symmetry about zero.
double sign_test_p_value(std::span<const double> x);

/// Least-squares slope of y on x.
double regression_slope(std::span<const double> x, std::span<const double> y);

double normal_cdf(double x);

}  // namespace fbmclt
