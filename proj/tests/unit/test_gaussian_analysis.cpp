#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "fbmclt/errors.hpp"
#include "fbmclt/gaussian_analysis.hpp"

using namespace fbmclt;

namespace {

constexpr double kPi = std::numbers::pi;

double closed_m2(const HurstModel& m, double t) {
  return std::pow(2 * kPi, -0.5 * m.dim()) * std::pow(t, 1 - m.hd()) / (1 - m.hd());
}

double moment(const HurstModel& m, std::vector<TimeConfig::Interval> iv, std::vector<int> k) {
  return joint_moment(TimeConfig(m, std::move(iv), std::move(k))).value;
}

}  // namespace

TEST_CASE("time configurations are validated") {
  const HurstModel m(0.6, 1);
  CHECK_THROWS_AS(TimeConfig(m, {{0.5, 1.0}, {0.2, 2.0}}, {2, 2}), PreconditionError);
  CHECK_THROWS_AS(TimeConfig(m, {{0.0, 1.0}}, {0}), PreconditionError);
  CHECK_THROWS_AS(TimeConfig(m, {{1.0, 1.0}}, {2}), PreconditionError);
  CHECK_THROWS_AS(TimeConfig(m, {{0.0, 1.0}}, {2, 2}), PreconditionError);
  const TimeConfig c(m, {{0.0, 1.0}, {1.0, 2.0}}, {2, 3});
  CHECK(c.total_order() == 5);
  CHECK_FALSE(c.all_even());
  CHECK_THROWS_AS(moment(m, {{0.0, 1.0}}, {8}), PreconditionError);
}

TEST_CASE("covariance matrices") {
  const auto a = cov_matrix(HurstModel(0.6, 1), std::vector<double>{2.0});
  CHECK(a(0, 0) == doctest::Approx(std::pow(2.0, 1.2)));
  const auto b = cov_matrix(HurstModel(0.5, 1), std::vector<double>{1.0, 2.0});
  CHECK(b(0, 1) == doctest::Approx(1.0));
  CHECK(b(1, 1) == doctest::Approx(2.0));
  CHECK(cov_determinant(HurstModel(0.5, 1), std::vector<double>{1.0, 2.0}) == doctest::Approx(1.0));
  CHECK(cov_determinant(HurstModel(0.6, 1), std::vector<double>{1.0, 2.0}) > 0.0);
  CHECK(cov_determinant(HurstModel(0.6, 1), std::vector<double>{1.0, 1.0}) == doctest::Approx(0.0));
}

TEST_CASE("local nondeterminism ratio") {
  Eigen::MatrixXd one(1, 1);
  one << 2.5;
  CHECK(lnd_ratio(HurstModel(0.7, 1), std::vector<double>{0.3}, one) == doctest::Approx(1.0));
  Eigen::MatrixXd u(3, 1);
  u << 1.0, -2.0, 0.5;
  CHECK(lnd_ratio(HurstModel(0.5, 1), std::vector<double>{0.2, 0.5, 1.4}, u) == doctest::Approx(1.0));
  const double r = lnd_ratio(HurstModel(0.6, 1), std::vector<double>{0.2, 0.5, 1.4}, u);
  CHECK(r > 0.0);
  // Direct evaluation of the same variance from the covariance matrix.
  const auto a = cov_matrix(HurstModel(0.6, 1), std::vector<double>{0.2, 0.5, 1.4});
  Eigen::MatrixXd d(3, 3);
  d << 1, 0, 0, -1, 1, 0, 0, -1, 1;
  const Eigen::VectorXd w = d.transpose() * u;
  const double var = w.dot(a * w);
  const double denom = 1.0 * std::pow(0.2, 1.2) + 4.0 * std::pow(0.3, 1.2) + 0.25 * std::pow(0.9, 1.2);
  CHECK(r == doctest::Approx(var / denom).epsilon(1e-12));
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(1, 1);
  CHECK_THROWS_AS(lnd_ratio(HurstModel(0.6, 1), std::vector<double>{1.0}, zero), DomainError);
}

TEST_CASE("determinant probe") {
  CHECK(det_bound_probe(HurstModel(0.6, 1), std::vector<double>{0.7}) == doctest::Approx(1.0));
  CHECK(det_bound_probe(HurstModel(0.5, 1), std::vector<double>{0.1, 0.4, 0.45, 2.0}) == doctest::Approx(1.0));
  const std::vector<double> t{0.3, 0.5, 1.1};
  const double det = cov_determinant(HurstModel(0.6, 1), t);
  const double expected = std::pow(det, -0.5) * std::pow(0.3 * 0.2 * 0.6, 0.6);
  CHECK(det_bound_probe(HurstModel(0.6, 1), t) == doctest::Approx(expected).epsilon(1e-10));
  CHECK(det_bound_probe(HurstModel(0.3, 2), t) ==
        doctest::Approx(std::pow(det_bound_probe(HurstModel(0.3, 1), t), 2)).epsilon(1e-12));
  CHECK_THROWS_AS(det_bound_probe(HurstModel(0.6, 1), std::vector<double>{0.5, 0.5}), PreconditionError);
}

TEST_CASE("second moment closed case") {
  for (double h : {0.3, 0.4, 0.45})
    for (int d : {1, 2})
      for (double t : {0.5, 2.0}) {
        const HurstModel m(h, d);
        CHECK(moment(m, {{0.0, t}}, {2}) == doctest::Approx(closed_m2(m, t)).epsilon(1e-10));
      }
}

TEST_CASE("Brownian moments are those of |N|") {
  // For H=1/2, d=1, L_1(0) has the law of |N(0,1)|; E W(L)^{2k} = (2k-1)!! E|N|^k.
  const HurstModel bm(0.5, 1);
  CHECK(moment(bm, {{0.0, 1.0}}, {2}) == doctest::Approx(std::sqrt(2.0 / kPi)).epsilon(1e-10));
  CHECK(moment(bm, {{0.0, 1.0}}, {4}) == doctest::Approx(3.0).epsilon(1e-8));
  CHECK(moment(bm, {{0.0, 1.0}}, {6}) == doctest::Approx(15.0 * 2.0 * std::sqrt(2.0 / kPi)).epsilon(1e-7));
}

TEST_CASE("Brownian increments over disjoint intervals") {
  const HurstModel bm(0.5, 1);
  // E[L_1 - L_{1/2}] = \int_{1/2}^1 (2 pi s)^{-1/2} ds.
  const double single = moment(bm, {{0.5, 1.0}}, {2});
  CHECK(single == doctest::Approx(std::sqrt(2.0 / kPi) * (1.0 - std::sqrt(0.5))).epsilon(1e-9));
  // E[L_{1/2} (L_1 - L_{1/2})] = \int_0^{1/2}\int_{1/2}^1 (2 pi)^{-1} (s (t-s))^{-1/2} dt ds.
  const double joint = moment(bm, {{0.0, 0.5}, {0.5, 1.0}}, {2, 2});
  double oracle = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    // s = (u^2)/2 removes the s^{-1/2} singularity; inner integral is exact.
    const double u = (i + 0.5) / n;
    const double s = 0.5 * u * u;
    const double inner = 2.0 * (std::sqrt(1.0 - s) - std::sqrt(0.5 - s));
    oracle += inner / std::sqrt(s) * u / n;
  }
  oracle /= 2.0 * kPi;
  CHECK(joint == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("odd exponents give exactly zero") {
  const HurstModel m(0.6, 1);
  CHECK(moment(m, {{0.0, 1.0}}, {3}) == 0.0);
  CHECK(moment(m, {{0.0, 0.5}, {0.5, 1.0}}, {2, 1}) == 0.0);
}

TEST_CASE("self-similarity and monotonicity") {
  const HurstModel m(0.6, 1);
  for (int k = 1; k <= 2; ++k) {
    const double r = moment(m, {{0.0, 2.0}}, {2 * k}) / moment(m, {{0.0, 1.0}}, {2 * k});
    CHECK(r == doctest::Approx(std::pow(2.0, k * 0.4)).epsilon(1e-7));
  }
  CHECK(moment(m, {{0.2, 1.0}}, {2}) < moment(m, {{0.1, 1.0}}, {2}));
  CHECK(moment(m, {{0.2, 1.0}}, {2}) < moment(m, {{0.2, 1.3}}, {2}));
}

TEST_CASE("moment growth ratios") {
  const HurstModel m(0.6, 1);
  const auto r = moment_growth_check(m, 1.0, 2);
  REQUIRE(r.size() == 2);
  const double e = 1.0 - m.hd();
  CHECK(r[0] == doctest::Approx(std::pow(2 * kPi, -0.5) / (2.0 * e * std::tgamma(e) / std::tgamma(1 + e))).epsilon(1e-9));
  CHECK(std::isfinite(r[1]));
  const auto r2 = moment_growth_check(m, 2.0, 2);
  CHECK(r2[1] == doctest::Approx(r[1]).epsilon(1e-6));
}

TEST_CASE("expected |sin| of a scaled normal") {
  for (double a : {0.05, 0.5, 0.999, 1.0, 1.7, 4.0}) {
    double sum = 0.0;
    const double h = 1e-4;
    for (double z = -12.0; z <= 12.0; z += h) sum += std::abs(std::sin(a * z)) * std::exp(-0.5 * z * z) * h;
    CHECK(expected_abs_sine(a) == doctest::Approx(sum / std::sqrt(2 * kPi)).epsilon(1e-7));
  }
  CHECK(expected_abs_sine(0.0) == 0.0);
}

TEST_CASE("small-ball factorization") {
  const HurstModel m(0.6, 1);
  const std::vector<double> y1{1.0}, y2{2.0};
  const auto base = scaling_probe(m, 1.0, y1, 1.0);
  CHECK(base.lhs == doctest::Approx(base.phi).epsilon(1e-12));
  const auto n4 = scaling_probe(m, 4.0, y1, 1.0);
  CHECK(n4.lhs / base.lhs == doctest::Approx(std::pow(4.0, m.hd() - 1)).epsilon(1e-8));
  const auto y = scaling_probe(m, 1.0, y2, 1.0);
  CHECK(y.lhs / base.lhs == doctest::Approx(std::pow(2.0, m.beta())).epsilon(1e-8));
  const std::vector<double> v2{0.6, 0.8};
  CHECK(scaling_probe(HurstModel(0.4, 2), 8.0, v2, 0.5).relative_gap < 1e-6);
  CHECK_THROWS_AS(scaling_probe(HurstModel(0.45, 1), 1.0, y1, 1.0), DomainError);
  CHECK_THROWS_AS(scaling_probe(m, 1.0, std::vector<double>{0.0}, 1.0), PreconditionError);
}
