#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "fbmclt/hurst_model.hpp"
#include "fbmclt/quadrature.hpp"

namespace fbmclt {

/// Disjoint intervals (a_i, b_i] with exponents m_i for moments of
/// increments of W(L_t(0)).
class TimeConfig {
 public:
  struct Interval {
    double a;
    double b;
  };

  TimeConfig(HurstModel model, std::vector<Interval> intervals, std::vector<int> multi_index);

  const HurstModel& model() const noexcept { return model_; }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  const std::vector<int>& multi_index() const noexcept { return multi_index_; }
  int total_order() const noexcept;
  bool all_even() const noexcept;

 private:
  HurstModel model_;
  std::vector<Interval> intervals_;
  std::vector<int> multi_index_;
};

/// One-component covariance matrix of (B(t_1), ..., B(t_k)).
Eigen::MatrixXd cov_matrix(const HurstModel& model, std::span<const double> times);

/// Determinant of the one-component covariance matrix via Cholesky; the
/// d-component determinant is this value to the power d.
double cov_determinant(const HurstModel& model, std::span<const double> times);

/// Var(sum u_i . (B(s_i) - B(s_{i-1}))) / sum |u_i|^2 (s_i - s_{i-1})^{2H}
/// with s_0 = 0. Rows of `vectors` are u_1..u_n, each of length d.
double lnd_ratio(const HurstModel& model, std::span<const double> times, const Eigen::MatrixXd& vectors);

/// [det(A_k)^{-1/2} prod (s_i - s_{i-1})^H]^d for strictly increasing times.
double det_bound_probe(const HurstModel& model, std::span<const double> times);

/// E prod [W(L_{b_i}(0)) - W(L_{a_i}(0))]^{m_i}; exactly zero when any m_i is odd.
QuadResult joint_moment(const TimeConfig& config, const QuadOptions& opts = {1e-12, 1e-9, 400000});

/// Ratios of the even moments E W(L_t(0))^{2k} to (2k)! t^{k(1-Hd)} Gamma^k(1-Hd)/Gamma(k(1-Hd)+1)
/// for k = 1..k_max.
std::vector<double> moment_growth_check(const HurstModel& model, double t, int k_max);

struct ScalingProbe {
  double lhs;         // direct quadrature at (n, y)
  double phi;         // (n, y)-free integral after rescaling
  double factorized;  // n^{Hd-1} |y|^{1/H-d} phi
  double relative_gap;
};

/// \int_0^\infty u^{-Hd} E|exp(i y.X/(n^H u^H)) - 1| du for X ~ N(0, sigma^2 I_d), compared
/// against its factorized form. Requires H > 1/(d+1) for convergence at infinity.
/// Throws VerificationError when the two differ by more than `tol` relative.
ScalingProbe scaling_probe(const HurstModel& model, double n, std::span<const double> y, double sigma,
                           double tol = 1e-6);

/// E|sin(a Z)| for standard normal Z.
double expected_abs_sine(double a);

}  // namespace fbmclt
