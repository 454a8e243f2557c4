#include "fbmclt/clt_lab.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fbmclt/constants.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/gaussian_analysis.hpp"
#include "fbmclt/parallel.hpp"
#include "fbmclt/seeding.hpp"

namespace fbmclt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::uint64_t kLimitStream = 0x4C494D4954ULL;

void require_dims(const TestFunction& f, const HurstModel& model) {
  if (f.dim() != model.dim()) throw PreconditionError("test function and model dimensions differ");
}

// Evaluates f(scale * B(t_i)) at every grid point.
std::vector<double> function_along_path(const FbmPath& path, const TestFunction& f, double scale) {
  const std::size_t m = path.grid_size();
  const int d = path.dim();
  std::vector<double> out(m + 1);
  if (d == 1) {
    const auto b = path.component(0);
    for (std::size_t i = 0; i <= m; ++i) out[i] = f(scale * b[i]);
    return out;
  }
  std::vector<double> x(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i <= m; ++i) {
    for (int j = 0; j < d; ++j) x[static_cast<std::size_t>(j)] = scale * path.at(j, i);
    out[i] = f(std::span<const double>(x));
  }
  return out;
}

SampleMeta make_meta(const HurstModel& model, std::string label, double n, double t, std::size_t grid,
                     std::uint64_t seed, std::size_t paths, double epsilon, bool exploratory) {
  return SampleMeta{model, std::move(label), n, t, grid, seed, paths, epsilon, exploratory};
}

}  // namespace

const char* to_string(SampleTag tag) {
  switch (tag) {
    case SampleTag::functional: return "functional";
    case SampleTag::first_order: return "first_order";
    case SampleTag::local_time: return "local_time";
    case SampleTag::limit_law: return "limit_law";
  }
  return "unknown";
}

void require_resolution(double n, std::size_t grid_size) {
  if (!(n >= 1.0)) throw PreconditionError("n must be >= 1");
  const double required = static_cast<double>(kResolutionFactor) * n;
  if (static_cast<double>(grid_size) < required) {
    std::ostringstream msg;
    msg << "grid size " << grid_size << " does not resolve f(n^H .): requires M >= 16 n = " << required;
    throw PreconditionError(msg.str());
  }
}

double functional_on_path(const FbmPath& path, const TestFunction& f, double n) {
  require_dims(f, path.model());
  const HurstModel& model = path.model();
  const auto values = function_along_path(path, f, std::pow(n, model.hurst()));
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return std::pow(n, 0.5 * (1.0 + model.hd())) * sum * path.spacing();
}

std::vector<double> functional_trajectory(const FbmPath& path, const TestFunction& f, double n) {
  require_dims(f, path.model());
  const HurstModel& model = path.model();
  const auto values = function_along_path(path, f, std::pow(n, model.hurst()));
  const double scale = std::pow(n, 0.5 * (1.0 + model.hd())) * path.spacing();
  std::vector<double> out(values.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    acc += 0.5 * (values[i - 1] + values[i]);
    out[i] = acc * scale;
  }
  return out;
}

double functional_sample(const TestFunction& f, const HurstModel& model, double n, double t, std::size_t grid_size,
                         std::uint64_t seed, bool exploratory) {
  require_regime(model, exploratory);
  require_resolution(n, grid_size);
  return functional_on_path(generate_path(model, t, grid_size, seed), f, n);
}

double functional_sample_direct(const TestFunction& f, const HurstModel& model, double n, double t,
                                std::size_t grid_size, std::uint64_t seed, bool exploratory) {
  require_regime(model, exploratory);
  require_resolution(n, grid_size);
  require_dims(f, model);
  const FbmPath path = generate_path(model, n * t, grid_size, seed);
  const auto values = function_along_path(path, f, 1.0);
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return std::pow(n, 0.5 * (model.hd() - 1.0)) * sum * path.spacing();
}

double first_order_sample(const TestFunction& f, const HurstModel& model, double n, double t, std::size_t grid_size,
                          std::uint64_t seed) {
  require_resolution(n, grid_size);
  require_dims(f, model);
  if (f.exact_integral() && *f.exact_integral() == 0.0)
    throw PreconditionError("first-order functional needs a function with nonzero integral");
  const FbmPath path = generate_path(model, t, grid_size, seed);
  const auto values = function_along_path(path, f, std::pow(n, model.hurst()));
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  // n^{Hd-1} \int_0^{nt} f(B) ds has the law of n^{Hd} \int_0^t f(n^H B(u)) du.
  return std::pow(n, model.hd()) * sum * path.spacing();
}

double default_epsilon(const HurstModel& model, double spacing) { return 4.0 * std::pow(spacing, model.hurst()); }

double local_time_estimate(const FbmPath& path, double epsilon, std::span<const double> level) {
  if (!(epsilon > 0.0)) throw PreconditionError("kernel width must be positive");
  const HurstModel& model = path.model();
  const double step_scale = std::pow(path.spacing(), model.hurst());
  if (step_scale > epsilon) {
    std::ostringstream msg;
    msg << "kernel width " << epsilon << " below one-step motion spacing^H = " << step_scale;
    throw PreconditionError(msg.str());
  }
  const int d = model.dim();
  if (!level.empty() && static_cast<int>(level.size()) != d) throw PreconditionError("level must have dimension d");
  const double norm = std::pow(2.0 * kPi * epsilon * epsilon, -0.5 * d);
  const double inv = 0.5 / (epsilon * epsilon);
  const std::size_t m = path.grid_size();
  auto kernel = [&](std::size_t i) {
    double r2 = 0.0;
    for (int j = 0; j < d; ++j) {
      const double x = path.at(j, i) - (level.empty() ? 0.0 : level[static_cast<std::size_t>(j)]);
      r2 += x * x;
    }
    return norm * std::exp(-inv * r2);
  };
  double sum = 0.5 * (kernel(0) + kernel(m));
  for (std::size_t i = 1; i < m; ++i) sum += kernel(i);
  return sum * path.spacing();
}

double expected_local_time(const HurstModel& model, double t) {
  return joint_moment(TimeConfig(model, {{0.0, t}}, {2})).value;
}

double second_moment_local_time(const HurstModel& model, double t) {
  return joint_moment(TimeConfig(model, {{0.0, t}}, {4})).value / 3.0;
}

namespace {

double squared_norm_of(const TestFunction& f, const HurstModel& model) {
  const double beta = model.beta();
  return f.dim() <= 2 ? norm_direct(f, beta).value : norm_fourier(f, beta).value;
}

}  // namespace

LimitLaw::LimitLaw(const TestFunction& f, const HurstModel& model, double t, std::size_t grid_size, double epsilon,
                   bool exploratory)
    : LimitLaw(f.label(), model, t, grid_size, (require_regime(model, exploratory), c_closed(model)),
               squared_norm_of(f, model), epsilon) {
  require_dims(f, model);
}

LimitLaw::LimitLaw(std::string label, const HurstModel& model, double t, std::size_t grid_size, double constant,
                   double norm_sq, double epsilon)
    : label_(std::move(label)), generator_(model, t, grid_size), constant_(constant), norm_sq_(norm_sq),
      epsilon_(epsilon > 0.0 ? epsilon : default_epsilon(model, generator_.spacing())) {
  if (!(constant > 0.0) || !(norm_sq >= 0.0)) throw DomainError("limit law needs C > 0 and ||f||^2 >= 0");
}

double LimitLaw::sample(std::uint64_t seed) const {
  const FbmPath path = generator_.generate(derive_seed(seed, 0));
  const double local_time = local_time_estimate(path, epsilon_);
  std::mt19937_64 rng(derive_seed(seed, 1));
  std::normal_distribution<double> normal;
  return std::sqrt(constant_ * norm_sq_ * local_time) * normal(rng);
}

double LimitLaw::limit_variance() const {
  return constant_ * norm_sq_ * expected_local_time(generator_.model(), generator_.horizon());
}

double limit_law_sample(const TestFunction& f, const HurstModel& model, double t, std::uint64_t seed,
                        std::size_t grid_size) {
  return LimitLaw(f, model, t, grid_size).sample(seed);
}

SampleSet sample_functional(const TestFunction& f, const HurstModel& model, double n, double t,
                            std::size_t grid_size, std::size_t paths, std::uint64_t seed, FunctionalForm form,
                            bool exploratory) {
  require_regime(model, exploratory);
  require_resolution(n, grid_size);
  require_dims(f, model);
  SampleSet out{SampleTag::functional, make_meta(model, f.label(), n, t, grid_size, seed, paths, 0.0, exploratory),
                std::vector<double>(paths)};
  const double horizon = form == FunctionalForm::scaled ? t : n * t;
  const FbmGenerator gen(model, horizon, grid_size);
  parallel_for(paths, [&](std::size_t i) {
    const FbmPath path = gen.generate(derive_seed(seed, i));
    if (form == FunctionalForm::scaled) {
      out.values[i] = functional_on_path(path, f, n);
    } else {
      const auto values = function_along_path(path, f, 1.0);
      double sum = 0.5 * (values.front() + values.back());
      for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += values[k];
      out.values[i] = std::pow(n, 0.5 * (model.hd() - 1.0)) * sum * path.spacing();
    }
  });
  return out;
}

SampleSet sample_first_order(const TestFunction& f, const HurstModel& model, double n, double t,
                             std::size_t grid_size, std::size_t paths, std::uint64_t seed) {
  require_resolution(n, grid_size);
  require_dims(f, model);
  if (f.exact_integral() && *f.exact_integral() == 0.0)
    throw PreconditionError("first-order functional needs a function with nonzero integral");
  SampleSet out{SampleTag::first_order, make_meta(model, f.label(), n, t, grid_size, seed, paths, 0.0, false),
                std::vector<double>(paths)};
  const FbmGenerator gen(model, t, grid_size);
  const double h = model.hurst();
  parallel_for(paths, [&](std::size_t i) {
    const FbmPath path = gen.generate(derive_seed(seed, i));
    const auto values = function_along_path(path, f, std::pow(n, h));
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += values[k];
    out.values[i] = std::pow(n, model.hd()) * sum * path.spacing();
  });
  return out;
}

std::vector<SampleSet> sample_local_time(const HurstModel& model, double t, std::size_t grid_size,
                                         std::size_t paths, std::uint64_t seed, const std::vector<double>& epsilons) {
  const FbmGenerator gen(model, t, grid_size);
  std::vector<SampleSet> out;
  for (double eps : epsilons)
    out.push_back({SampleTag::local_time, make_meta(model, "delta", 0.0, t, grid_size, seed, paths, eps, false),
                   std::vector<double>(paths)});
  parallel_for(paths, [&](std::size_t i) {
    const FbmPath path = gen.generate(derive_seed(seed, i));
    for (std::size_t k = 0; k < epsilons.size(); ++k) out[k].values[i] = local_time_estimate(path, epsilons[k]);
  });
  return out;
}

SampleSet sample_limit_law(const LimitLaw& law, const HurstModel& model, double t, std::size_t paths,
                           std::uint64_t seed) {
  SampleSet out{SampleTag::limit_law,
                make_meta(model, law.label(), 0.0, t, law.generator().grid_size(), seed, paths, law.epsilon(), false),
                std::vector<double>(paths)};
  parallel_for(paths, [&](std::size_t i) { out.values[i] = law.sample(derive_seed(seed, i)); });
  return out;
}

KsResult ks_two_sample(const SampleSet& a, const SampleSet& b) { return ks_two_sample(a.values, b.values); }

OddMomentReport odd_moment_check(const TestFunction& f, const HurstModel& model, double n, double t,
                                 std::size_t grid_size, std::size_t paths, std::uint64_t seed, bool antithetic,
                                 bool exploratory) {
  require_regime(model, exploratory);
  require_resolution(n, grid_size);
  require_dims(f, model);
  const FbmGenerator gen(model, t, grid_size);
  const std::size_t copies = antithetic ? 2 : 1;
  std::vector<double> first(paths * copies), second(paths * copies);
  const std::size_t quarter = grid_size / 4, half = grid_size / 2;
  parallel_for(paths, [&](std::size_t i) {
    const FbmPath path = gen.generate(derive_seed(seed, i));
    auto record = [&](const FbmPath& p, std::size_t slot) {
      const auto traj = functional_trajectory(p, f, n);
      first[slot] = traj[half] - traj[quarter];
      second[slot] = traj[grid_size] - traj[half];
    };
    record(path, copies * i);
    if (antithetic) record(path.reflected(), copies * i + 1);
  });

  static constexpr std::array<std::array<int, 2>, 7> kExponents{
      {{1, 0}, {3, 0}, {0, 1}, {0, 3}, {1, 1}, {2, 1}, {1, 2}}};
  OddMomentReport report;
  report.passed = true;
  std::vector<double> products(first.size());
  for (const auto& [p1, p2] : kExponents) {
    for (std::size_t i = 0; i < first.size(); ++i) products[i] = std::pow(first[i], p1) * std::pow(second[i], p2);
    MomentCheck check;
    std::ostringstream label;
    label << "E[dF(t/4,t/2]^" << p1 << " dF(t/2,t]^" << p2 << "]";
    check.label = label.str();
    check.estimate = mean_estimate(products);
    check.z = check.estimate.z_score(0.0);
    check.passed = check.estimate.value == 0.0 || check.z < report.threshold_se;
    report.passed = report.passed && check.passed;
    report.checks.push_back(check);
  }
  return report;
}

ScalingReport increment_moment_scaling(const TestFunction& f, const HurstModel& model, double n,
                                       std::size_t grid_size, std::size_t paths, int m, std::uint64_t seed,
                                       bool exploratory) {
  if (m != 1 && m != 2) throw PreconditionError("moment scaling supports m in {1, 2}");
  require_regime(model, exploratory);
  require_resolution(n, grid_size);
  require_dims(f, model);
  const FbmGenerator gen(model, 1.0, grid_size);
  const std::array<std::size_t, 4> ends{grid_size / 8, grid_size / 4, grid_size / 2, grid_size};
  std::vector<std::array<double, 4>> values(paths);
  parallel_for(paths, [&](std::size_t i) {
    const auto traj = functional_trajectory(gen.generate(derive_seed(seed, i)), f, n);
    for (std::size_t k = 0; k < ends.size(); ++k) values[i][k] = traj[ends[k]];
  });
  ScalingReport report;
  report.m = m;
  report.bound_exponent = m * (1.0 - model.hd());
  std::vector<double> log_h, log_moment, column(paths);
  for (std::size_t k = 0; k < ends.size(); ++k) {
    for (std::size_t i = 0; i < paths; ++i) column[i] = values[i][k];
    const double h = static_cast<double>(ends[k]) / static_cast<double>(grid_size);
    const Estimate e = raw_moment(column, 2 * m);
    report.lengths.push_back(h);
    report.moments.push_back(e);
    log_h.push_back(std::log(h));
    log_moment.push_back(std::log(e.value));
  }
  report.slope = regression_slope(log_h, log_moment);
  report.passed = report.slope >= report.bound_exponent - 0.15;
  return report;
}

CltReport clt_acceptance(const TestFunction& f, const HurstModel& model, double t, double n, std::size_t grid_size,
                         std::size_t paths, std::uint64_t seed, const CltThresholds& thresholds, bool exploratory) {
  require_regime(model, exploratory);
  const LimitLaw law(f, model, t, grid_size, 0.0, exploratory);
  CltReport report{
      .functional = sample_functional(f, model, n, t, grid_size, paths, seed, FunctionalForm::scaled, exploratory),
      .limit = sample_limit_law(law, model, t, paths, derive_seed(seed, kLimitStream))};
  report.ks = ks_two_sample(report.functional, report.limit);

  const auto& x = report.functional.values;
  report.functional_mean = mean_estimate(x).value;
  report.empirical_variance = sample_variance(x);
  report.limit_variance = law.limit_variance();
  report.variance_ratio = report.empirical_variance / report.limit_variance;

  const double el = expected_local_time(model, t);
  const double el2 = second_moment_local_time(model, t);
  const double scale = law.constant() * law.norm_sq();
  report.empirical_fourth = raw_moment(x, 4).value;
  report.limit_fourth = 3.0 * scale * scale * el2;
  report.fourth_ratio = report.empirical_fourth / report.limit_fourth;
  report.empirical_kurtosis = sample_kurtosis(x);
  report.limit_kurtosis = 3.0 * el2 / (el * el);

  report.ks_passed = report.ks.p_value > thresholds.ks_min_p;
  report.variance_passed =
      report.variance_ratio >= thresholds.variance_low && report.variance_ratio <= thresholds.variance_high;
  report.passed = report.ks_passed && report.variance_passed;
  return report;
}

DoublingReport ks_doubling_diagnostic(const TestFunction& f, const HurstModel& model, double t, double n_low,
                                      double n_high, std::size_t grid_size, std::size_t paths, int repetitions,
                                      std::uint64_t seed, bool exploratory) {
  require_regime(model, exploratory);
  require_resolution(std::max(n_low, n_high), grid_size);
  const LimitLaw law(f, model, t, grid_size, 0.0, exploratory);
  DoublingReport report;
  report.repetitions = repetitions;
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const SampleSet limit = sample_limit_law(law, model, t, paths, derive_seed(rep_seed, 1));
    const SampleSet low =
        sample_functional(f, model, n_low, t, grid_size, paths, derive_seed(rep_seed, 2), FunctionalForm::scaled, exploratory);
    const SampleSet high =
        sample_functional(f, model, n_high, t, grid_size, paths, derive_seed(rep_seed, 3), FunctionalForm::scaled, exploratory);
    report.ks_low.push_back(ks_two_sample(low, limit).statistic);
    report.ks_high.push_back(ks_two_sample(high, limit).statistic);
    if (report.ks_high.back() <= report.ks_low.back()) ++report.non_increasing;
  }
  return report;
}

}  // namespace fbmclt
