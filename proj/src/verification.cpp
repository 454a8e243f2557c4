#include "fbmclt/verification.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "fbmclt/clt_lab.hpp"
#include "fbmclt/constants.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/fbm.hpp"
#include "fbmclt/functions.hpp"
#include "fbmclt/gaussian_analysis.hpp"
#include "fbmclt/parallel.hpp"
#include "fbmclt/seeding.hpp"
#include "fbmclt/stats.hpp"

namespace fbmclt {

namespace {

constexpr double kPi = std::numbers::pi;

struct CriterionInfo {
  const char* name;
  double budget;
};

constexpr std::array<CriterionInfo, 8> kCriteria{{
    {"constant identity", 10.0},
    {"norm identity", 60.0},
    {"moment closed case", 30.0},
    {"small-ball scaling factorization", 60.0},
    {"generator exactness", 60.0},
    {"local-time oracle agreement", 300.0},
    {"CLT desk-scale reproduction", 1800.0},
    {"gaussian-structure probes", 30.0},
}};

CriterionResult make_result(int id) {
  CriterionResult r;
  r.id = id;
  r.name = criterion_name(id);
  r.budget_seconds = criterion_budget_seconds(id);
  return r;
}

double relative_gap(double a, double b) { return std::abs(a - b) / std::abs(b); }

Json estimate_json(const Estimate& e) { return Json{{"value", e.value}, {"std_error", e.std_error}}; }

}  // namespace

std::vector<int> quick_criteria() { return {1, 2, 3, 4, 8}; }
std::vector<int> all_criteria() { return {1, 2, 3, 4, 5, 6, 7, 8}; }

const char* criterion_name(int id) {
  if (id < 1 || id > 8) throw PreconditionError("criterion id must be in 1..8");
  return kCriteria[static_cast<std::size_t>(id - 1)].name;
}

double criterion_budget_seconds(int id) {
  if (id < 1 || id > 8) throw PreconditionError("criterion id must be in 1..8");
  return kCriteria[static_cast<std::size_t>(id - 1)].budget;
}

CriterionResult run_criterion(int id, const VerifyOptions& options) {
  criterion_name(id);
  const std::uint64_t seed = derive_seed(options.seed, static_cast<std::uint64_t>(id));
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  switch (id) {
    case 1: r = check_constant_identity(); break;
    case 2: r = check_norm_identity(); break;
    case 3: r = check_moment_closed_form(); break;
    case 4: r = check_scaling_factorization(); break;
    case 5: r = check_generator_exactness(seed); break;
    case 6: r = check_local_time_oracle(seed); break;
    case 7: r = check_clt_reproduction(seed); break;
    default: r = check_gaussian_probes(seed); break;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

CriterionResult check_constant_identity() {
  CriterionResult r = make_result(1);
  Json rows = Json::array();
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int i = 0; i <= 12; ++i) {
      const double h = 0.30 + 0.05 * i;
      if (!(h > 1.0 / (d + 2) && h * d < 1.0 - 1e-12)) continue;
      const HurstModel model(h, d);
      const QuadResult q = c_integral(model);
      const double closed = c_closed(model);
      const double gap = relative_gap(q.value, closed);
      worst = std::max(worst, gap);
      rows.push_back(Json{{"H", h}, {"d", d}, {"integral", q.value}, {"closed", closed}, {"relative_gap", gap}});
    }
  }
  const HurstModel bm(0.5, 1);
  const double bm_integral = c_integral(bm).value;
  const double bm_closed = c_closed(bm);
  const double bm_error = std::max(std::abs(bm_integral - 2.0), std::abs(bm_closed - 2.0));
  r.passed = worst < 1e-8 && bm_error < 1e-10;
  r.details = Json{{"grid", rows},
                   {"worst_relative_gap", worst},
                   {"brownian_integral", bm_integral},
                   {"brownian_closed", bm_closed},
                   {"brownian_abs_error", bm_error}};
  return r;
}

CriterionResult check_norm_identity() {
  CriterionResult r = make_result(2);
  Json rows = Json::array();
  bool ok = true;
  auto compare = [&](const TestFunction& f, double beta) {
    const double direct = norm_direct(f, beta).value;
    const double fourier = norm_fourier(f, beta).value;
    const double gap = relative_gap(direct, fourier);
    const bool pass = gap < 1e-6 && direct >= 0.0 && fourier >= 0.0;
    ok = ok && pass;
    rows.push_back(Json{{"f", f.label()},
                        {"d", f.dim()},
                        {"beta", beta},
                        {"direct", direct},
                        {"fourier", fourier},
                        {"relative_gap", gap},
                        {"passed", pass}});
  };
  const TestFunction diff = gaussian_diff(1.0, 2.0, 1);
  const TestFunction odd = odd_gaussian();
  for (double beta : {0.25, 0.5, 2.0 / 3.0, 0.9}) {
    compare(diff, beta);
    compare(odd, beta);
  }
  compare(gaussian_diff(1.0, 2.0, 2), 0.5);
  r.passed = ok;
  r.details = Json{{"comparisons", rows}};
  return r;
}

CriterionResult check_moment_closed_form() {
  CriterionResult r = make_result(3);
  Json rows = Json::array();
  double worst = 0.0;
  for (double h : {0.3, 0.4, 0.45}) {
    for (int d : {1, 2}) {
      const HurstModel model(h, d);
      for (double t : {0.5, 2.0}) {
        const double value = joint_moment(TimeConfig(model, {{0.0, t}}, {2})).value;
        const double closed = std::pow(2.0 * kPi, -0.5 * d) * std::pow(t, 1.0 - model.hd()) / (1.0 - model.hd());
        const double gap = relative_gap(value, closed);
        worst = std::max(worst, gap);
        rows.push_back(Json{{"H", h}, {"d", d}, {"t", t}, {"quadrature", value}, {"closed", closed}, {"relative_gap", gap}});
      }
    }
  }
  const HurstModel model(0.6, 1);
  bool odd_zero = true;
  Json odd = Json::array();
  const std::vector<std::pair<std::vector<TimeConfig::Interval>, std::vector<int>>> odd_cases{
      {{{0.0, 1.0}}, {1}}, {{{0.0, 1.0}}, {3}}, {{{0.0, 0.5}, {0.5, 1.0}}, {2, 1}}, {{{0.0, 0.5}, {0.5, 1.0}}, {3, 3}}};
  for (const auto& [intervals, m] : odd_cases) {
    const double value = joint_moment(TimeConfig(model, intervals, m)).value;
    odd_zero = odd_zero && value == 0.0;
    odd.push_back(Json{{"m", m}, {"value", value}});
  }
  r.passed = worst < 1e-8 && odd_zero;
  r.details = Json{{"grid", rows}, {"worst_relative_gap", worst}, {"odd_cases", odd}};
  return r;
}

CriterionResult check_scaling_factorization() {
  CriterionResult r = make_result(4);
  Json rows = Json::array();
  double worst = 0.0;
  for (const auto& [h, d] : {std::pair{0.6, 1}, std::pair{0.4, 2}}) {
    const HurstModel model(h, d);
    for (double n : {1.0, 2.0, 4.0, 8.0}) {
      for (double y : {0.5, 1.0, 2.0}) {
        std::vector<double> point(static_cast<std::size_t>(d), 0.0);
        point[0] = y;
        const ScalingProbe p = scaling_probe(model, n, point, 1.0, 1.0);
        worst = std::max(worst, p.relative_gap);
        rows.push_back(Json{{"H", h}, {"d", d}, {"n", n}, {"y", y}, {"lhs", p.lhs}, {"factorized", p.factorized},
                            {"relative_gap", p.relative_gap}});
      }
    }
  }
  r.passed = worst < 1e-6;
  r.details = Json{{"grid", rows}, {"worst_relative_gap", worst}};
  return r;
}

CriterionResult check_generator_exactness(std::uint64_t seed) {
  CriterionResult r = make_result(5);
  constexpr std::size_t kGrid = 16;
  constexpr std::size_t kPaths = 10000;
  constexpr std::array<std::size_t, 3> kOffsets{0, 7, 15};
  Json rows = Json::array();
  bool ok = true;
  for (double h : {0.55, 0.6, 0.75, 0.9}) {
    const HurstModel model(h, 1);
    const FbmGenerator gen(model, 1.0, kGrid);
    const std::uint64_t h_seed = derive_seed(seed, static_cast<std::uint64_t>(std::lround(h * 1000)));
    std::vector<std::array<double, kGrid + 1>> values(kPaths);
    parallel_for(kPaths, [&](std::size_t i) {
      const FbmPath path = gen.generate(derive_seed(h_seed, i));
      std::copy_n(path.component(0).begin(), kGrid + 1, values[i].begin());
    });

    bool origin_zero = true;
    for (const auto& v : values) origin_zero = origin_zero && v[0] == 0.0;
    double worst_z = 0.0;
    int entries = 0, failures = 0;
    std::vector<double> products(kPaths);
    for (std::size_t a = 1; a <= kGrid; ++a) {
      for (std::size_t b = a; b <= kGrid; ++b) {
        for (std::size_t i = 0; i < kPaths; ++i) products[i] = values[i][a] * values[i][b];
        const double target = covariance(model, gen.spacing() * a, gen.spacing() * b);
        const double z = mean_estimate(products).z_score(target);
        worst_z = std::max(worst_z, z);
        ++entries;
        if (!(z < 4.0)) ++failures;
      }
    }

    // Increments at three offsets, each from its own third of the paths.
    const std::size_t block = kPaths / kOffsets.size();
    std::array<std::vector<double>, kOffsets.size()> incr;
    for (std::size_t k = 0; k < kOffsets.size(); ++k) {
      for (std::size_t i = k * block; i < (k + 1) * block; ++i)
        incr[k].push_back(values[i][kOffsets[k] + 1] - values[i][kOffsets[k]]);
    }
    Json ks = Json::array();
    bool stationary = true;
    for (std::size_t a = 0; a < kOffsets.size(); ++a) {
      for (std::size_t b = a + 1; b < kOffsets.size(); ++b) {
        const KsResult res = ks_two_sample(incr[a], incr[b]);
        stationary = stationary && res.p_value > 0.01;
        ks.push_back(Json{{"offsets", {kOffsets[a], kOffsets[b]}}, {"statistic", res.statistic}, {"p_value", res.p_value}});
      }
    }
    const bool pass = origin_zero && failures == 0 && stationary;
    ok = ok && pass;
    rows.push_back(Json{{"H", h},
                        {"covariance_entries", entries},
                        {"entries_beyond_4se", failures},
                        {"worst_z", worst_z},
                        {"origin_exactly_zero", origin_zero},
                        {"stationarity_ks", ks},
                        {"min_eigenvalue", gen.synthesizer().min_eigenvalue()},
                        {"passed", pass}});
  }
  r.passed = ok;
  r.details = Json{{"grid_size", kGrid}, {"paths", kPaths}, {"models", rows}};
  return r;
}

CriterionResult check_local_time_oracle(std::uint64_t seed) {
  CriterionResult r = make_result(6);
  const HurstModel model(0.6, 1);
  constexpr std::size_t kGrid = std::size_t{1} << 16;
  constexpr std::size_t kPaths = 10000;
  const std::vector<double> epsilons{0.02, 0.01, 0.005};
  const double mean_target = expected_local_time(model, 1.0);
  const double second_target = second_moment_local_time(model, 1.0);
  const auto sets = sample_local_time(model, 1.0, kGrid, kPaths, seed, epsilons);

  Json rows = Json::array();
  std::vector<double> mean_bias, second_bias, means;
  for (const SampleSet& s : sets) {
    const Estimate m1 = mean_estimate(s.values);
    const Estimate m2 = raw_moment(s.values, 2);
    mean_bias.push_back(m1.value - mean_target);
    second_bias.push_back(m2.value - second_target);
    means.push_back(m1.value);
    rows.push_back(Json{{"epsilon", s.meta.epsilon},
                        {"mean", estimate_json(m1)},
                        {"mean_z", m1.z_score(mean_target)},
                        {"second_moment", estimate_json(m2)},
                        {"second_moment_z", m2.z_score(second_target)}});
  }
  const bool mean_ok = rows[0]["mean_z"].get<double>() < 3.0;
  const bool second_ok = rows[0]["second_moment_z"].get<double>() < 3.0;
  bool shrinking = true;
  for (std::size_t k = 1; k < sets.size(); ++k) {
    shrinking = shrinking && std::abs(mean_bias[k]) < std::abs(mean_bias[k - 1]) &&
                std::abs(second_bias[k]) < std::abs(second_bias[k - 1]);
  }
  // Diagnostic only: the kernel bias decays like eps^{(1-Hd)/H}.
  const double rate = std::pow(2.0, (1.0 - model.hd()) / model.hurst());
  const double extrapolated = (rate * means[2] - means[1]) / (rate - 1.0);

  r.passed = mean_ok && second_ok && shrinking;
  r.details = Json{{"grid_size", kGrid},
                   {"paths", kPaths},
                   {"expected_local_time", mean_target},
                   {"second_moment_local_time", second_target},
                   {"kernel_widths", rows},
                   {"mean_within_3se", mean_ok},
                   {"second_moment_within_3se", second_ok},
                   {"bias_shrinks_under_halving", shrinking},
                   {"richardson_mean", extrapolated},
                   {"richardson_relative_gap", relative_gap(extrapolated, mean_target)}};
  return r;
}

CriterionResult check_clt_reproduction(std::uint64_t seed) {
  CriterionResult r = make_result(7);
  const HurstModel model(0.6, 1);
  const TestFunction f = gaussian_diff(1.0, 2.0, 1);
  constexpr std::size_t kGrid = std::size_t{1} << 14;
  constexpr std::size_t kPaths = 2000;
  constexpr double kN = 256.0;

  const CltReport clt = clt_acceptance(f, model, 1.0, kN, kGrid, kPaths, derive_seed(seed, 1));
  const OddMomentReport odd = odd_moment_check(f, model, kN, 1.0, kGrid, kPaths, derive_seed(seed, 2));
  const DoublingReport doubling = ks_doubling_diagnostic(f, model, 1.0, 128.0, 512.0, kGrid, kPaths, 10, derive_seed(seed, 3));

  Json odd_rows = Json::array();
  for (const MomentCheck& c : odd.checks)
    odd_rows.push_back(Json{{"moment", c.label}, {"estimate", estimate_json(c.estimate)}, {"z", c.z}, {"passed", c.passed}});
  const bool doubling_ok = doubling.non_increasing >= 6;
  const Estimate mean = mean_estimate(clt.functional.values);

  r.passed = clt.variance_passed && clt.ks_passed && odd.passed && doubling_ok;
  r.details = Json{
      {"a_variance", Json{{"empirical", clt.empirical_variance},
                          {"limit", clt.limit_variance},
                          {"ratio", clt.variance_ratio},
                          {"passed", clt.variance_passed}}},
      {"b_ks", Json{{"statistic", clt.ks.statistic}, {"p_value", clt.ks.p_value}, {"passed", clt.ks_passed}}},
      {"c_odd_moments", Json{{"checks", odd_rows}, {"passed", odd.passed}}},
      {"d_n_doubling", Json{{"ks_n128", doubling.ks_low},
                            {"ks_n512", doubling.ks_high},
                            {"non_increasing", doubling.non_increasing},
                            {"repetitions", doubling.repetitions},
                            {"passed", doubling_ok}}},
      {"functional_mean", estimate_json(mean)},
      {"limit_sample_mean", mean_estimate(clt.limit.values).value},
      {"fourth_moment_ratio", clt.fourth_ratio},
      {"empirical_kurtosis", clt.empirical_kurtosis},
      {"limit_kurtosis", clt.limit_kurtosis}};
  return r;
}

CriterionResult check_gaussian_probes(std::uint64_t seed) {
  CriterionResult r = make_result(8);
  constexpr int kConfigs = 10000;
  constexpr std::array<double, 3> kHurst{0.55, 0.6, 0.75};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  std::array<std::array<double, 4>, 3> max_det{}, min_lnd{};
  for (auto& row : min_lnd) row.fill(INFINITY);
  bool ok = true;
  for (int c = 0; c < kConfigs; ++c) {
    const std::size_t hi = static_cast<std::size_t>(c) % kHurst.size();
    const HurstModel model(kHurst[hi], 1);
    const int k = 1 + static_cast<int>(rng() % 4);
    std::vector<double> times(static_cast<std::size_t>(k));
    do {
      for (double& t : times) t = unit(rng);
      std::sort(times.begin(), times.end());
    } while (times.front() <= 0.0 || std::adjacent_find(times.begin(), times.end()) != times.end());
    Eigen::MatrixXd vectors(k, 1);
    for (int i = 0; i < k; ++i) vectors(i, 0) = normal(rng);
    const double lnd = lnd_ratio(model, times, vectors);
    const double det = det_bound_probe(model, times);
    const auto ki = static_cast<std::size_t>(k - 1);
    max_det[hi][ki] = std::max(max_det[hi][ki], det);
    min_lnd[hi][ki] = std::min(min_lnd[hi][ki], lnd);
    ok = ok && lnd > 0.0 && det < 1e3;
  }
  Json rows = Json::array();
  for (std::size_t hi = 0; hi < kHurst.size(); ++hi)
    rows.push_back(Json{{"H", kHurst[hi]}, {"min_lnd_ratio_by_k", min_lnd[hi]}, {"max_det_probe_by_k", max_det[hi]}});
  r.passed = ok;
  r.details = Json{{"configurations", kConfigs}, {"models", rows}};
  return r;
}

}  // namespace fbmclt
