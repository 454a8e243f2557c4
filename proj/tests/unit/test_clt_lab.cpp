#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fbmclt/clt_lab.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/functions.hpp"
#include "fbmclt/seeding.hpp"

using namespace fbmclt;

namespace {

constexpr double kPi = std::numbers::pi;

// E \int_0^t phi_w(B(s)) ds for a centered Gaussian kernel of width w:
// \int_0^t (2 pi (s^{2H} + w^2))^{-1/2} ds, by composite Simpson in u = s^{1-H}.
double smoothed_mean(double h, double t, double w) {
  const int n = 20000;
  const double p = 1.0 / (1.0 - h);
  const double umax = std::pow(t, 1.0 - h);
  auto g = [&](double u) {
    const double s = std::pow(u, p);
    const double jac = p * std::pow(u, p - 1.0);
    return jac / std::sqrt(2 * kPi * (std::pow(s, 2 * h) + w * w));
  };
  double sum = g(0.0) + g(umax);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * g(umax * i / n);
  return sum * umax / (3.0 * n);
}

}  // namespace

TEST_CASE("resolution floor") {
  CHECK_NOTHROW(require_resolution(64, 1024));
  CHECK_THROWS_WITH_AS(require_resolution(64, 512), doctest::Contains("M >= 16 n = 1024"), PreconditionError);
  const HurstModel m(0.6, 1);
  CHECK_THROWS_AS(functional_sample(gaussian_diff(1, 2, 1), m, 64, 1.0, 512, 1), PreconditionError);
}

TEST_CASE("regime is enforced unless exploratory") {
  const HurstModel m(0.45, 1);
  CHECK_THROWS_AS(functional_sample(gaussian_diff(1, 2, 1), m, 4, 1.0, 64, 1), DomainError);
  CHECK(std::isfinite(functional_sample(gaussian_diff(1, 2, 1), m, 4, 1.0, 64, 1, true)));
}

TEST_CASE("trivial functionals") {
  const HurstModel m(0.6, 1);
  CHECK(functional_sample(zero_function(1), m, 16, 1.0, 256, 3) == 0.0);
  const FbmPath path = generate_path(m, 1.0, 256, 9);
  const TestFunction g = odd_gaussian();
  CHECK(functional_on_path(path.reflected(), g, 16) == -functional_on_path(path, g, 16));
  const auto traj = functional_trajectory(path, g, 16);
  CHECK(traj.front() == 0.0);
  CHECK(traj.back() == doctest::Approx(functional_on_path(path, g, 16)).epsilon(1e-12));
}

TEST_CASE("first-order functional is linear in f") {
  const HurstModel m(0.6, 1);
  const TestFunction f = gaussian_density(1.0, 1);
  const double a = first_order_sample(f, m, 32, 1.0, 512, 4);
  CHECK(first_order_sample(scaled(f, 2.0), m, 32, 1.0, 512, 4) == doctest::Approx(2.0 * a).epsilon(1e-14));
}

TEST_CASE("first-order mean matches the exact smoothed occupation mean") {
  // n^{Hd} phi(n^H x) is a Gaussian kernel of width n^{-H}.
  const HurstModel m(0.6, 1);
  const double n = 64;
  const auto s = sample_first_order(gaussian_density(1.0, 1), m, n, 1.0, 1024, 2000, 17);
  const Estimate e = mean_estimate(s.values);
  CHECK(e.z_score(smoothed_mean(0.6, 1.0, std::pow(n, -0.6))) < 3.0);
  const auto s2 = sample_first_order(gaussian_density(1.0, 1), m, n, 2.0, 1024, 2000, 18);
  const Estimate e2 = mean_estimate(s2.values);
  CHECK(e2.z_score(smoothed_mean(0.6, 2.0, std::pow(n, -0.6))) < 3.0);
}

TEST_CASE("local-time kernel estimator") {
  const HurstModel m(0.6, 1);
  const FbmPath path = generate_path(m, 1.0, 1024, 5);
  const std::vector<double> far{1e3};
  CHECK(local_time_estimate(path, 0.05, far) < 1e-8);
  CHECK(local_time_estimate(path, 0.05) >= 0.0);
  CHECK_THROWS_AS(local_time_estimate(path, 1e-3), PreconditionError);
  CHECK(default_epsilon(m, 1.0 / 1024) == doctest::Approx(4.0 * std::pow(1024.0, -0.6)));

  const auto sets = sample_local_time(m, 1.0, 4096, 2000, 23, {0.05, 0.025});
  for (const auto& s : sets) {
    const Estimate e = mean_estimate(s.values);
    CHECK(e.z_score(smoothed_mean(0.6, 1.0, s.meta.epsilon)) < 3.0);
    CHECK(s.tag == SampleTag::local_time);
  }
}

TEST_CASE("local-time moments from quadrature") {
  const HurstModel m(0.6, 1);
  CHECK(expected_local_time(m, 1.0) == doctest::Approx(1.0 / (std::sqrt(2 * kPi) * 0.4)).epsilon(1e-10));
  CHECK(second_moment_local_time(HurstModel(0.5, 1), 1.0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("limit law draws") {
  const HurstModel m(0.6, 1);
  const LimitLaw law(gaussian_diff(1, 2, 1), m, 1.0, 1024);
  CHECK(law.constant() == doctest::Approx(2.1438442461626).epsilon(1e-10));
  CHECK(law.limit_variance() == doctest::Approx(law.constant() * law.norm_sq() * expected_local_time(m, 1.0)));
  const SampleSet s = sample_limit_law(law, m, 1.0, 2000, 31);
  CHECK(sign_test_p_value(s.values) > 0.01);
  // Second moment equals C ||f||^2 E Lhat_eps with the kernel width in use.
  const Estimate e2 = raw_moment(s.values, 2);
  const double target = law.constant() * law.norm_sq() * smoothed_mean(0.6, 1.0, law.epsilon());
  CHECK(e2.z_score(target) < 3.0);
  CHECK(sample_kurtosis(s.values) > 3.0);
  CHECK(law.sample(77) == law.sample(77));
}

TEST_CASE("sample sets are pure functions of their meta block") {
  const HurstModel m(0.6, 1);
  const TestFunction f = gaussian_diff(1, 2, 1);
  const auto a = sample_functional(f, m, 16, 1.0, 256, 64, 5);
  setenv("FBMCLT_THREADS", "3", 1);
  const auto b = sample_functional(f, m, 16, 1.0, 256, 64, 5);
  unsetenv("FBMCLT_THREADS");
  CHECK(a.values == b.values);
  CHECK(a.meta.paths == 64);
  CHECK(a.meta.function_label == "gaussian-diff:1,2");
  CHECK(ks_two_sample(a, b).statistic == 0.0);
}

TEST_CASE("scaled and direct representations agree in variance") {
  const HurstModel m(0.6, 1);
  const TestFunction f = gaussian_diff(1, 2, 1);
  const auto scaled_set = sample_functional(f, m, 16, 1.0, 256, 1500, 41, FunctionalForm::scaled);
  const auto direct_set = sample_functional(f, m, 16, 1.0, 256, 1500, 42, FunctionalForm::direct);
  const Estimate a = raw_moment(scaled_set.values, 2);
  const Estimate b = raw_moment(direct_set.values, 2);
  // Overlapping 95% intervals.
  CHECK(std::abs(a.value - b.value) < 1.96 * (a.std_error + b.std_error));
}

TEST_CASE("odd moments and antithetic pairing") {
  const HurstModel m(0.6, 1);
  const auto report = odd_moment_check(odd_gaussian(), m, 16, 1.0, 256, 200, 8, true);
  REQUIRE(report.checks.size() == 7);
  // Reflection cancels every product of odd total degree exactly; (1,1) is even.
  for (std::size_t k = 0; k < report.checks.size(); ++k) {
    if (k != 4) CHECK(report.checks[k].estimate.value == 0.0);
  }
  const auto plain = odd_moment_check(gaussian_diff(1, 2, 1), m, 16, 1.0, 256, 1000, 8);
  CHECK(plain.checks.size() == 7);
}

TEST_CASE("increment moment scaling") {
  const HurstModel m(0.6, 1);
  const TestFunction f = gaussian_diff(1, 2, 1);
  const auto r = increment_moment_scaling(f, m, 16, 256, 1500, 1, 12);
  CHECK(r.bound_exponent == doctest::Approx(0.4));
  CHECK(r.slope >= 0.25);
  CHECK(r.passed);
  const auto r2 = increment_moment_scaling(scaled(f, 2.0), m, 16, 256, 1500, 1, 12);
  for (std::size_t k = 0; k < r.moments.size(); ++k)
    CHECK(r2.moments[k].value == doctest::Approx(4.0 * r.moments[k].value).epsilon(1e-12));
}

TEST_CASE("increments over [a, a+h] follow the limit's time change") {
  // E F(a, a+h)^2 / E F(0, h)^2 -> ((a+h)^{1-Hd} - a^{1-Hd}) / h^{1-Hd}: the increments
  // of the limit are not stationary.
  const HurstModel m(0.6, 1);
  const TestFunction f = gaussian_diff(1, 2, 1);
  const FbmGenerator gen(m, 1.0, 1024);
  const std::size_t paths = 2000;
  std::vector<double> head(paths), tail(paths);
  for (std::size_t i = 0; i < paths; ++i) {
    const auto traj = functional_trajectory(gen.generate(derive_seed(61, i)), f, 64);
    head[i] = traj[512] * traj[512];
    tail[i] = (traj[1024] - traj[512]) * (traj[1024] - traj[512]);
  }
  const Estimate a = mean_estimate(head), b = mean_estimate(tail);
  double cov = 0.0;
  for (std::size_t i = 0; i < paths; ++i) cov += (head[i] - a.value) * (tail[i] - b.value);
  cov /= (paths - 1.0) * paths;
  const double ratio = b.value / a.value;
  const double se = ratio * std::sqrt(std::pow(a.std_error / a.value, 2) + std::pow(b.std_error / b.value, 2) -
                                      2.0 * cov / (a.value * b.value));
  const double limit = (1.0 - std::pow(0.5, 0.4)) / std::pow(0.5, 0.4);
  CHECK(std::abs(ratio - limit) < 4.0 * se);
  CHECK(std::abs(ratio - 1.0) > 4.0 * se);
}
