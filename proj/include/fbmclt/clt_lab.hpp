#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbmclt/fbm.hpp"
#include "fbmclt/functions.hpp"
#include "fbmclt/hurst_model.hpp"
#include "fbmclt/stats.hpp"

namespace fbmclt {

/// Grid points per unit of n: the path must resolve the n^{-H} spatial scale of f(n^H .).
inline constexpr std::size_t kResolutionFactor = 16;

enum class SampleTag { functional, first_order, local_time, limit_law };
const char* to_string(SampleTag tag);

struct SampleMeta {
  HurstModel model;
  std::string function_label;
  double n = 0.0;
  double t = 0.0;
  std::size_t grid_size = 0;
  std::uint64_t master_seed = 0;
  std::size_t paths = 0;
  double epsilon = 0.0;  // local-time kernel width, when one is used
  bool exploratory = false;
};

/// Tagged i.i.d. draws; draw i depends only on (meta, i).
struct SampleSet {
  SampleTag tag;
  SampleMeta meta;
  std::vector<double> values;
};

/// Throws PreconditionError naming the required grid when M < 16 n.
void require_resolution(double n, std::size_t grid_size);

/// n^{(1+Hd)/2} \int_0^T f(n^H B(s)) ds by trapezoid on the path grid.
double functional_on_path(const FbmPath& path, const TestFunction& f, double n);
/// n^{(1+Hd)/2} \int_0^{t_i} f(n^H B(s)) ds at every grid time t_i.
std::vector<double> functional_trajectory(const FbmPath& path, const TestFunction& f, double n);

/// F_n(t) in the scaled form n^{(1+Hd)/2} \int_0^t f(n^H B(s)) ds on a fresh path.
double functional_sample(const TestFunction& f, const HurstModel& model, double n, double t, std::size_t grid_size,
                         std::uint64_t seed, bool exploratory = false);
/// F_n(t) in the direct form n^{(Hd-1)/2} \int_0^{nt} f(B(s)) ds on a fresh path over [0, nt].
double functional_sample_direct(const TestFunction& f, const HurstModel& model, double n, double t,
                                std::size_t grid_size, std::uint64_t seed, bool exploratory = false);
/// n^{Hd-1} \int_0^{nt} f(B(s)) ds, computed in the equivalent scaled form.
double first_order_sample(const TestFunction& f, const HurstModel& model, double n, double t, std::size_t grid_size,
                          std::uint64_t seed);

/// Kernel estimate \int_0^T phi_eps(B(s) - level) ds with a Gaussian kernel of
/// standard deviation eps. Requires spacing^H <= eps. `level` defaults to 0.
double local_time_estimate(const FbmPath& path, double epsilon, std::span<const double> level = {});
/// Default kernel width 4 spacing^H.
double default_epsilon(const HurstModel& model, double spacing);

/// Sampler of the limit law sqrt(C) ||f|| sqrt(L_t(0)) Z with L_t(0) estimated
/// on a fresh path and Z independent of the path.
class LimitLaw {
 public:
  /// Computes the constant and the squared norm of f (norm_direct when d <= 2,
  /// norm_fourier otherwise). epsilon = 0 selects default_epsilon.
  LimitLaw(const TestFunction& f, const HurstModel& model, double t, std::size_t grid_size, double epsilon = 0.0,
           bool exploratory = false);
  /// Precomputed constant and norm.
  LimitLaw(std::string label, const HurstModel& model, double t, std::size_t grid_size, double constant,
           double norm_sq, double epsilon = 0.0);

  double sample(std::uint64_t seed) const;
  double constant() const noexcept { return constant_; }
  double norm_sq() const noexcept { return norm_sq_; }
  double epsilon() const noexcept { return epsilon_; }
  const std::string& label() const noexcept { return label_; }
  const FbmGenerator& generator() const noexcept { return generator_; }
  /// C ||f||^2 E L_t(0), the second moment of the limit.
  double limit_variance() const;

 private:
  std::string label_;
  FbmGenerator generator_;
  double constant_;
  double norm_sq_;
  double epsilon_;
};

double limit_law_sample(const TestFunction& f, const HurstModel& model, double t, std::uint64_t seed,
                        std::size_t grid_size = 1 << 12);

/// E L_t(0) = (2 pi)^{-d/2} t^{1-Hd} / (1-Hd) from the moment quadrature (N=1, m=2).
double expected_local_time(const HurstModel& model, double t);
/// E L_t(0)^2 = (N=1, m=4 moment) / 3.
double second_moment_local_time(const HurstModel& model, double t);

enum class FunctionalForm { scaled, direct };

SampleSet sample_functional(const TestFunction& f, const HurstModel& model, double n, double t,
                            std::size_t grid_size, std::size_t paths, std::uint64_t seed,
                            FunctionalForm form = FunctionalForm::scaled, bool exploratory = false);
SampleSet sample_first_order(const TestFunction& f, const HurstModel& model, double n, double t,
                             std::size_t grid_size, std::size_t paths, std::uint64_t seed);
/// Local-time estimates at every kernel width, computed on the same paths.
std::vector<SampleSet> sample_local_time(const HurstModel& model, double t, std::size_t grid_size,
                                         std::size_t paths, std::uint64_t seed, const std::vector<double>& epsilons);
SampleSet sample_limit_law(const LimitLaw& law, const HurstModel& model, double t, std::size_t paths,
                           std::uint64_t seed);

KsResult ks_two_sample(const SampleSet& a, const SampleSet& b);

struct MomentCheck {
  std::string label;
  Estimate estimate;
  double z = 0.0;
  bool passed = false;
};

struct OddMomentReport {
  std::vector<MomentCheck> checks;  // all odd joint moments over the two intervals
  double threshold_se = 4.0;
  bool passed = false;
};

/// Odd moments (m in {1, 3}, plus mixed products with an odd exponent) of the
/// increments of F_n over (t/4, t/2] and (t/2, t]. With `antithetic`, each
/// path is paired with its reflection -B.
OddMomentReport odd_moment_check(const TestFunction& f, const HurstModel& model, double n, double t,
                                 std::size_t grid_size, std::size_t paths, std::uint64_t seed,
                                 bool antithetic = false, bool exploratory = false);

struct ScalingReport {
  int m = 1;
  std::vector<double> lengths;
  std::vector<Estimate> moments;  // E F_n(h)^{2m}
  double slope = 0.0;
  double bound_exponent = 0.0;  // m (1 - Hd)
  bool passed = false;
};

/// Regression slope of log E F_n(h)^{2m} on log h for h in {1/8, 1/4, 1/2, 1};
/// passes when slope >= m(1-Hd) - 0.15.
ScalingReport increment_moment_scaling(const TestFunction& f, const HurstModel& model, double n,
                                       std::size_t grid_size, std::size_t paths, int m, std::uint64_t seed,
                                       bool exploratory = false);

struct CltThresholds {
  double ks_min_p = 0.01;
  double variance_low = 0.85;
  double variance_high = 1.15;
};

struct CltReport {
  KsResult ks;
  double empirical_variance = 0.0;
  double limit_variance = 0.0;
  double variance_ratio = 0.0;
  double empirical_fourth = 0.0;
  double limit_fourth = 0.0;  // C^2 ||f||^4 E W(L)^4 / 3 * 3
  double fourth_ratio = 0.0;
  double empirical_kurtosis = 0.0;
  double limit_kurtosis = 0.0;  // 3 E L^2 / (E L)^2
  double functional_mean = 0.0;
  bool ks_passed = false;
  bool variance_passed = false;
  bool passed = false;
  SampleSet functional;
  SampleSet limit;
};

CltReport clt_acceptance(const TestFunction& f, const HurstModel& model, double t, double n, std::size_t grid_size,
                         std::size_t paths, std::uint64_t seed, const CltThresholds& thresholds = {},
                         bool exploratory = false);

struct DoublingReport {
  std::vector<double> ks_low;
  std::vector<double> ks_high;
  int non_increasing = 0;
  int repetitions = 0;
};

/// Repeats the KS comparison at n_low and n_high against a shared limit-law
/// sample per repetition and counts KS(n_high) <= KS(n_low).
DoublingReport ks_doubling_diagnostic(const TestFunction& f, const HurstModel& model, double t, double n_low,
                                      double n_high, std::size_t grid_size, std::size_t paths, int repetitions,
                                      std::uint64_t seed, bool exploratory = false);

}  // namespace fbmclt
