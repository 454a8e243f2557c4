#include "fbmclt/gaussian_analysis.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include "fbmclt/errors.hpp"

namespace fbmclt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxMomentVariables = 3;
constexpr long kInnerBudget = 20000;

void require_times(std::span<const double> times, bool strictly_increasing) {
  if (times.empty()) throw PreconditionError("time list must be nonempty");
  double prev = 0.0;
  for (double t : times) {
    if (!std::isfinite(t)) throw DomainError("times must be finite");
    if (t <= 0.0) throw PreconditionError("times must be strictly positive");
    if (strictly_increasing ? t <= prev : t < prev) throw PreconditionError("times must be increasing");
    prev = t;
  }
}

// Cov(B(s_i) - B(s_{i-1}), B(s_j) - B(s_{j-1})) for i < j in terms of the two
// increment lengths and the gap between them. Differences of powers go
// through expm1/log1p so widely separated scales keep full precision.
double power_step(double h2, double x, double y) {
  if (x == 0.0) return std::pow(y, h2);
  return std::pow(x, h2) * std::expm1(h2 * std::log1p(y / x));
}

double increment_cross_cov(double h2, double di, double gap, double dj) {
  if (gap == 0.0) {
    const double big = std::max(di, dj), small = std::min(di, dj);
    return 0.5 * (power_step(h2, big, small) - std::pow(small, h2));
  }
  // Second difference in the smaller increment, which avoids cancellation.
  const double big = std::max(di, dj), small = std::min(di, dj);
  return 0.5 * (power_step(h2, gap + big, small) - power_step(h2, gap, small));
}

// Correlation matrix of the normalized increments (Delta B_i / Delta_i^H).
template <class Matrix>
void increment_correlation(double hurst, std::span<const double> incr, Matrix& r) {
  const double h2 = 2.0 * hurst;
  const std::size_t n = incr.size();
  for (std::size_t i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    double gap = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = increment_cross_cov(h2, incr[i], gap, incr[j]) / std::pow(incr[i] * incr[j], hurst);
      r(i, j) = c;
      r(j, i) = c;
      gap += incr[j];
    }
  }
}

// Determinant of a small symmetric positive definite matrix by Cholesky;
// returns 0 when not positive definite.
struct SmallMatrix {
  std::array<double, kMaxMomentVariables * kMaxMomentVariables> a{};
  std::size_t n = 0;
  double& operator()(std::size_t i, std::size_t j) { return a[i * kMaxMomentVariables + j]; }
};

double cholesky_det(SmallMatrix m) {
  double det = 1.0;
  for (std::size_t j = 0; j < m.n; ++j) {
    double diag = m(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= m(j, k) * m(j, k);
    if (!(diag > 0.0)) return 0.0;
    const double l = std::sqrt(diag);
    m(j, j) = l;
    det *= diag;
    for (std::size_t i = j + 1; i < m.n; ++i) {
      double s = m(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= m(i, k) * m(j, k);
      m(i, j) = s / l;
    }
  }
  return det;
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

TimeConfig::TimeConfig(HurstModel model, std::vector<Interval> intervals, std::vector<int> multi_index)
    : model_(model), intervals_(std::move(intervals)), multi_index_(std::move(multi_index)) {
  if (intervals_.empty()) throw PreconditionError("at least one interval is required");
  if (intervals_.size() != multi_index_.size())
    throw PreconditionError("one exponent per interval is required");
  double prev_end = 0.0;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto [a, b] = intervals_[i];
    if (!(a >= 0.0 && b > a && std::isfinite(b)))
      throw PreconditionError("intervals must satisfy 0 <= a < b < infinity");
    if (a < prev_end) throw PreconditionError("intervals must be ordered and disjoint (b_i <= a_{i+1})");
    if (multi_index_[i] < 1) throw PreconditionError("exponents must be >= 1");
    prev_end = b;
  }
}

int TimeConfig::total_order() const noexcept {
  int s = 0;
  for (int m : multi_index_) s += m;
  return s;
}

bool TimeConfig::all_even() const noexcept {
  for (int m : multi_index_)
    if (m % 2 != 0) return false;
  return true;
}

Eigen::MatrixXd cov_matrix(const HurstModel& model, std::span<const double> times) {
  require_times(times, false);
  const auto k = static_cast<Eigen::Index>(times.size());
  const double h2 = 2.0 * model.hurst();
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double s = times[i], t = times[j];
      a(i, j) = a(j, i) = 0.5 * (std::pow(s, h2) + std::pow(t, h2) - std::pow(std::abs(s - t), h2));
    }
  if (!a.allFinite()) throw DomainError("covariance matrix has non-finite entries");
  return a;
}

double cov_determinant(const HurstModel& model, std::span<const double> times) {
  const Eigen::MatrixXd a = cov_matrix(model, times);
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return 0.0;
  const double diag_prod = llt.matrixL().toDenseMatrix().diagonal().prod();
  return diag_prod * diag_prod;
}

double lnd_ratio(const HurstModel& model, std::span<const double> times, const Eigen::MatrixXd& vectors) {
  require_times(times, false);
  const auto n = static_cast<Eigen::Index>(times.size());
  if (vectors.rows() != n || vectors.cols() != model.dim())
    throw PreconditionError("lnd_ratio needs one d-vector per time");
  std::vector<double> incr(times.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    incr[i] = times[i] - prev;
    prev = times[i];
  }
  const double h2 = 2.0 * model.hurst();
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    cov(i, i) = std::pow(incr[i], h2);
    double gap = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      cov(i, j) = cov(j, i) = increment_cross_cov(h2, incr[i], gap, incr[j]);
      gap += incr[j];
    }
  }
  const double variance = (vectors.transpose() * cov * vectors).trace();
  double denom = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) denom += vectors.row(i).squaredNorm() * std::pow(incr[i], h2);
  if (!(denom > 0.0)) throw DomainError("lnd_ratio denominator is zero");
  return variance / denom;
}

double det_bound_probe(const HurstModel& model, std::span<const double> times) {
  require_times(times, true);
  std::vector<double> incr(times.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    incr[i] = times[i] - prev;
    prev = times[i];
  }
  const auto k = static_cast<Eigen::Index>(times.size());
  Eigen::MatrixXd r(k, k);
  increment_correlation(model.hurst(), incr, r);
  Eigen::LLT<Eigen::MatrixXd> llt(r);
  if (llt.info() != Eigen::Success) throw DomainError("covariance matrix is singular");
  const double diag_prod = llt.matrixL().toDenseMatrix().diagonal().prod();
  // det A = prod Delta^{2H} det R, so det(A)^{-1/2} prod Delta^H = det(R)^{-1/2}.
  return std::pow(1.0 / diag_prod, model.dim());
}

QuadResult joint_moment(const TimeConfig& config, const QuadOptions& opts) {
  if (!config.all_even()) return {0.0, 0.0, 0, true};
  const HurstModel& model = config.model();
  const auto& intervals = config.intervals();
  const auto& orders = config.multi_index();
  const int dim = model.dim();

  // Variable layout: block i contributes m_i/2 ordered times in (a_i, b_i].
  std::vector<int> block_of;
  double log_prefactor = 0.0;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    const int k = orders[i] / 2;
    for (int j = 0; j < k; ++j) block_of.push_back(static_cast<int>(i));
    log_prefactor += log_factorial(orders[i]) - 0.5 * orders[i] * std::log(2.0) -
                     0.25 * orders[i] * dim * std::log(2.0 * kPi) - log_factorial(k);
    // The cube [a_i,b_i]^k is k! copies of its ordered simplex.
    log_prefactor += log_factorial(k);
  }
  const int nvars = static_cast<int>(block_of.size());
  if (nvars > kMaxMomentVariables) {
    std::ostringstream msg;
    msg << "joint_moment supports at most " << kMaxMomentVariables << " integration variables (sum m_i/2 = "
        << nvars << ")";
    throw PreconditionError(msg.str());
  }

  // Each increment u is written u = v^p with p = 1/(1-Hd), which cancels the
  // u^{-Hd} singularity of det(A)^{-1/2} (the remaining factor is det(R)^{-d/2}).
  const double hd = model.hd();
  const double p = 1.0 / (1.0 - hd);
  std::array<double, kMaxMomentVariables> incr{};
  bool inner_ok = true;
  // Deeper levels run tighter so their noise stays below the outer target.
  std::array<QuadOptions, kMaxMomentVariables> level_opts{};
  for (int l = 0; l < kMaxMomentVariables; ++l) {
    level_opts[l] = opts;
    level_opts[l].rel_tol = opts.rel_tol * std::pow(0.3, l);
    level_opts[l].abs_tol = opts.abs_tol * std::pow(0.3, l);
    if (l > 0) level_opts[l].max_evaluations = kInnerBudget;
  }

  QuadResult total;
  std::function<double(int, double, double)> level = [&](int l, double t_prev, double weight) -> double {
    if (l == nvars) {
      SmallMatrix r;
      r.n = static_cast<std::size_t>(nvars);
      increment_correlation(model.hurst(), std::span<const double>(incr.data(), r.n), r);
      const double det = cholesky_det(r);
      if (!(det > 0.0)) return 0.0;
      return weight * std::pow(det, -0.5 * dim);
    }
    const auto& iv = intervals[static_cast<std::size_t>(block_of[l])];
    const bool first_in_block = l == 0 || block_of[l - 1] != block_of[l];
    const double lower = first_in_block ? iv.a : t_prev;
    const double gap = lower - t_prev;  // zero unless this variable opens a new block
    const double v_max = std::pow(iv.b - lower, 1.0 / p);
    auto integrand = [&](double v) {
      const double u = std::pow(v, p);
      const double delta = gap + u;
      if (!(delta > 0.0)) return 0.0;
      incr[static_cast<std::size_t>(l)] = delta;
      // p v^{p-1} du/dv times delta^{-Hd}; equals p exactly when gap = 0.
      const double factor = gap == 0.0 ? p : p * std::pow(v, p - 1.0) * std::pow(delta, -hd);
      return level(l + 1, lower + u, weight * factor);
    };
    const QuadResult r = integrate(integrand, 0.0, v_max, level_opts[static_cast<std::size_t>(l)]);
    inner_ok = inner_ok && r.converged;
    if (l == 0) total = r;
    return r.value;
  };

  level(0, 0.0, 1.0);
  total.converged = total.converged && inner_ok;
  require_converged(total, "joint_moment");
  return scaled(total, std::exp(log_prefactor));
}

std::vector<double> moment_growth_check(const HurstModel& model, double t, int k_max) {
  if (k_max < 1 || k_max > kMaxMomentVariables) throw PreconditionError("k_max must be in 1..3");
  if (!(t > 0.0)) throw PreconditionError("t must be positive");
  const double e = 1.0 - model.hd();
  std::vector<double> ratios;
  for (int k = 1; k <= k_max; ++k) {
    const TimeConfig cfg(model, {{0.0, t}}, {2 * k});
    const double moment = joint_moment(cfg).value;
    const double log_bound = log_factorial(2 * k) + k * e * std::log(t) + k * std::lgamma(e) - std::lgamma(k * e + 1.0);
    ratios.push_back(moment / std::exp(log_bound));
  }
  return ratios;
}

double expected_abs_sine(double a) {
  a = std::abs(a);
  if (a == 0.0) return 0.0;
  if (a >= 1.0) {
    // |sin x| = 2/pi - (4/pi) sum cos(2kx)/(4k^2-1), and E cos(2kaZ) = exp(-2k^2a^2).
    double sum = 0.0;
    for (int k = 1; k < 64; ++k) {
      const double term = std::exp(-2.0 * k * k * a * a) / (4.0 * k * k - 1.0);
      sum += term;
      if (term < 1e-18) break;
    }
    return 2.0 / kPi - 4.0 / kPi * sum;
  }
  // 2 \int_0^\infty |sin(a z)| phi(z) dz with breakpoints at the kinks z = k pi / a.
  constexpr double kTail = 12.0;
  std::vector<double> cuts{0.0};
  for (int k = 1; k * kPi / a < kTail; ++k) cuts.push_back(k * kPi / a);
  cuts.push_back(kTail);
  const double norm = 1.0 / std::sqrt(2.0 * kPi);
  const QuadResult r = integrate_pieces(
      [&](double z) { return std::abs(std::sin(a * z)) * norm * std::exp(-0.5 * z * z); }, cuts,
      QuadOptions{1e-17, 1e-14, 100000});
  return 2.0 * r.value;
}

namespace {

// \int_0^\infty u^{-Hd} 2 E|sin(c u^{-H} Z)| du.
QuadResult scaling_integral(const HurstModel& model, double c) {
  const double h = model.hurst();
  const double hd = model.hd();
  const QuadOptions opts{1e-14, 1e-11, 400000};
  auto g = [&](double u) { return 2.0 * expected_abs_sine(c * std::pow(u, -h)); };

  const double p = 1.0 / (1.0 - hd);
  QuadResult r = integrate([&](double w) { return w > 0.0 ? p * g(std::pow(w, p)) : p * 2.0 * 2.0 / kPi; }, 0.0,
                           1.0, opts);
  // u = 1/v, then v = s^{1/(q+1)} with q = Hd + H - 2 > -1.
  const double q = hd + h - 2.0;
  r += integrate(
      [&](double s) {
        if (s <= 0.0) return 2.0 * c * std::sqrt(2.0 / kPi) / (q + 1.0);
        const double v = std::pow(s, 1.0 / (q + 1.0));
        return std::pow(v, -h) * g(1.0 / v) / (q + 1.0);
      },
      0.0, 1.0, opts);
  require_converged(r, "small-ball scaling integral");
  return r;
}

}  // namespace

ScalingProbe scaling_probe(const HurstModel& model, double n, std::span<const double> y, double sigma, double tol) {
  if (static_cast<int>(y.size()) != model.dim()) throw PreconditionError("y must have dimension d");
  double y_norm = 0.0;
  for (double v : y) y_norm += v * v;
  y_norm = std::sqrt(y_norm);
  if (!(y_norm > 0.0)) throw PreconditionError("scaling_probe requires y != 0");
  if (!(n > 0.0) || !(sigma > 0.0)) throw PreconditionError("scaling_probe requires n > 0 and sigma > 0");
  if (!(model.hurst() * (model.dim() + 1) > 1.0))
    throw DomainError("the integral converges at infinity only for H > 1/(d+1) (" + model.describe() + ")");

  const double h = model.hurst();
  ScalingProbe out{};
  out.lhs = scaling_integral(model, sigma * y_norm / (2.0 * std::pow(n, h))).value;
  out.phi = scaling_integral(model, sigma / 2.0).value;
  out.factorized = std::pow(n, model.hd() - 1.0) * std::pow(y_norm, model.beta()) * out.phi;
  out.relative_gap = std::abs(out.lhs - out.factorized) / std::abs(out.factorized);
  if (!(out.relative_gap <= tol)) {
    std::ostringstream msg;
    msg << "scaling factorization gap " << out.relative_gap << " exceeds " << tol;
    throw VerificationError(msg.str());
  }
  return out;
}

}  // namespace fbmclt
