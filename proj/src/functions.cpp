#include "fbmclt/functions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "fbmclt/errors.hpp"

namespace fbmclt {

namespace {

constexpr double kPi = std::numbers::pi;
// |f| below this is treated as outside the support.
constexpr double kNegligible = 1e-15;

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

// Radius beyond which the isotropic Gaussian density of width sigma drops below kNegligible.
double gaussian_radius(double sigma, int dim) {
  const double log_peak = -0.5 * dim * std::log(2.0 * kPi * sigma * sigma);
  const double excess = std::max(0.0, log_peak - std::log(kNegligible));
  return sigma * std::sqrt(2.0 * std::max(excess, 1.0));
}

double gaussian_value(double r2, double sigma, int dim) {
  return std::exp(-0.5 * r2 / (sigma * sigma)) / std::pow(2.0 * kPi * sigma * sigma, 0.5 * dim);
}

void require_beta(double beta) {
  if (!(beta > 0.0 && beta < 2.0)) {
    std::ostringstream msg;
    msg << "requires 0 < beta < 2 (got " << beta << ")";
    throw DomainError(msg.str());
  }
}

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

TestFunction::TestFunction(int dim, std::string label, Evaluator evaluate, Fourier fourier, Traits traits)
    : dim_(dim), label_(std::move(label)), evaluate_(std::move(evaluate)), fourier_(std::move(fourier)),
      traits_(traits) {
  if (dim < 1) throw DomainError("test function dimension must be >= 1");
  if (!evaluate_) throw PreconditionError("test function needs an evaluator");
  if (!(traits_.support_radius > 0.0) || !(traits_.length_scale > 0.0))
    throw PreconditionError("test function support radius and length scale must be positive");
}

std::complex<double> TestFunction::fourier(std::span<const double> xi) const {
  if (!fourier_) throw UnsupportedInput("test function '" + label_ + "' has no Fourier transform");
  return fourier_(xi);
}

TestFunction gaussian_diff(double sigma1, double sigma2, int dim) {
  if (!(sigma1 > 0.0 && sigma2 > 0.0)) throw DomainError("Gaussian widths must be positive");
  if (sigma1 == sigma2) throw DomainError("gaussian_diff with equal widths is identically zero");
  auto eval = [=](std::span<const double> x) {
    const double r2 = squared_norm(x);
    return gaussian_value(r2, sigma1, dim) - gaussian_value(r2, sigma2, dim);
  };
  auto ft = [=](std::span<const double> xi) {
    const double r2 = squared_norm(xi);
    return std::complex<double>(std::exp(-0.5 * sigma1 * sigma1 * r2) - std::exp(-0.5 * sigma2 * sigma2 * r2), 0.0);
  };
  const double radius = std::max(gaussian_radius(sigma1, dim), gaussian_radius(sigma2, dim));
  return TestFunction(dim, "gaussian-diff:" + format_number(sigma1) + "," + format_number(sigma2), eval, ft,
                      {radius, std::min(sigma1, sigma2), true, 0.0});
}

TestFunction odd_gaussian() {
  auto eval = [](std::span<const double> x) { return x[0] * std::exp(-0.5 * x[0] * x[0]); };
  auto ft = [](std::span<const double> xi) {
    return std::complex<double>(0.0, xi[0] * std::sqrt(2.0 * kPi) * std::exp(-0.5 * xi[0] * xi[0]));
  };
  return TestFunction(1, "odd-gaussian", eval, ft, {9.0, 1.0, false, 0.0});
}

TestFunction gaussian_density(double sigma, int dim) {
  if (!(sigma > 0.0)) throw DomainError("Gaussian width must be positive");
  auto eval = [=](std::span<const double> x) { return gaussian_value(squared_norm(x), sigma, dim); };
  auto ft = [=](std::span<const double> xi) {
    return std::complex<double>(std::exp(-0.5 * sigma * sigma * squared_norm(xi)), 0.0);
  };
  return TestFunction(dim, "gaussian:" + format_number(sigma), eval, ft,
                      {gaussian_radius(sigma, dim), sigma, true, 1.0});
}

TestFunction gaussian_mixture(std::vector<double> weights, std::vector<std::vector<double>> centers,
                              std::vector<double> sigmas) {
  if (weights.empty() || weights.size() != centers.size() || weights.size() != sigmas.size())
    throw PreconditionError("mixture weights, centers and widths must have equal nonzero length");
  const int dim = static_cast<int>(centers.front().size());
  if (dim < 1) throw PreconditionError("mixture centers must be nonempty vectors");
  double total = 0.0, scale = 0.0, radius = 0.0, width = sigmas.front();
  bool centered = true;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (static_cast<int>(centers[k].size()) != dim) throw PreconditionError("mixture centers differ in dimension");
    if (!(sigmas[k] > 0.0)) throw DomainError("Gaussian widths must be positive");
    total += weights[k];
    scale += std::abs(weights[k]);
    const double c = std::sqrt(squared_norm(centers[k]));
    centered = centered && c == 0.0;
    radius = std::max(radius, c + gaussian_radius(sigmas[k], dim) + std::log1p(std::abs(weights[k])));
    width = std::min(width, sigmas[k]);
  }
  if (std::abs(total) > 1e-14 * scale) throw DomainError("mixture weights must sum to zero");
  // Absorb the rounding residue into the last weight so the integral is exactly zero.
  weights.back() -= std::accumulate(weights.begin(), weights.end(), 0.0);

  auto eval = [=](std::span<const double> x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      double r2 = 0.0;
      for (int i = 0; i < dim; ++i) r2 += (x[i] - centers[k][i]) * (x[i] - centers[k][i]);
      acc += weights[k] * gaussian_value(r2, sigmas[k], dim);
    }
    return acc;
  };
  auto ft = [=](std::span<const double> xi) {
    std::complex<double> acc = 0.0;
    const double r2 = squared_norm(xi);
    for (std::size_t k = 0; k < weights.size(); ++k) {
      double phase = 0.0;
      for (int i = 0; i < dim; ++i) phase += centers[k][i] * xi[i];
      acc += weights[k] * std::exp(-0.5 * sigmas[k] * sigmas[k] * r2) * std::polar(1.0, phase);
    }
    return acc;
  };
  return TestFunction(dim, "gaussian-mixture", eval, ft, {radius, width, centered, 0.0});
}

TestFunction zero_function(int dim) {
  return TestFunction(
      dim, "zero", [](std::span<const double>) { return 0.0; },
      [](std::span<const double>) { return std::complex<double>(0.0, 0.0); }, {1.0, 1.0, true, 0.0});
}

TestFunction scaled(const TestFunction& f, double factor) {
  TestFunction::Fourier ft;
  if (f.has_fourier()) ft = [=](std::span<const double> xi) { return factor * f.fourier(xi); };
  std::optional<double> integral;
  if (f.exact_integral()) integral = factor * *f.exact_integral();
  return TestFunction(f.dim(), format_number(factor) + "*" + f.label(),
                      [=](std::span<const double> x) { return factor * f(x); }, ft,
                      {f.support_radius(), f.length_scale(), f.isotropic(), integral});
}

TestFunction reflected(const TestFunction& f) {
  auto negate = [](std::span<const double> x) {
    std::vector<double> y(x.begin(), x.end());
    for (double& v : y) v = -v;
    return y;
  };
  TestFunction::Fourier ft;
  if (f.has_fourier()) ft = [=](std::span<const double> xi) { return f.fourier(negate(xi)); };
  return TestFunction(f.dim(), "reflected(" + f.label() + ")",
                      [=](std::span<const double> x) { return f(negate(x)); }, ft,
                      {f.support_radius(), f.length_scale(), f.isotropic(), f.exact_integral()});
}

TestFunction parse_test_function(const std::string& spec, int dim) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  std::vector<double> args;
  if (colon != std::string::npos) {
    std::stringstream ss(spec.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        args.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw PreconditionError("malformed number '" + item + "' in function spec '" + spec + "'");
      }
    }
  }
  if (kind == "gaussian-diff" && args.size() == 2) return gaussian_diff(args[0], args[1], dim);
  if (kind == "gaussian" && args.size() == 1) return gaussian_density(args[0], dim);
  if (kind == "odd-gaussian" && args.empty()) {
    if (dim != 1) throw PreconditionError("odd-gaussian is defined for d=1 only");
    return odd_gaussian();
  }
  if (kind == "zero" && args.empty()) return zero_function(dim);
  throw PreconditionError("unknown function spec '" + spec +
                          "' (expected gaussian-diff:s1,s2 | gaussian:s | odd-gaussian | zero)");
}

namespace {

// Uniform grid over the support box; trapezoid is spectrally accurate for
// smooth, rapidly decaying integrands.
struct SupportGrid {
  double step;
  std::vector<double> nodes;
};

SupportGrid support_grid(const TestFunction& f) {
  const double radius = f.support_radius();
  const double target = f.length_scale() / 2.5;
  const auto n = static_cast<std::size_t>(std::ceil(2.0 * radius / target));
  SupportGrid grid{2.0 * radius / static_cast<double>(n), {}};
  grid.nodes.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid.nodes[i] = -radius + grid.step * static_cast<double>(i);
  return grid;
}

struct WeightedPoint {
  std::array<double, 2> x;
  double value;
};

std::vector<WeightedPoint> significant_points(const TestFunction& f, const SupportGrid& grid) {
  std::vector<WeightedPoint> pts;
  double peak = 0.0;
  if (f.dim() == 1) {
    for (double x : grid.nodes) {
      const double v = f(x);
      peak = std::max(peak, std::abs(v));
      pts.push_back({{x, 0.0}, v});
    }
  } else {
    for (double x : grid.nodes)
      for (double y : grid.nodes) {
        const std::array<double, 2> p{x, y};
        const double v = f(std::span<const double>(p));
        peak = std::max(peak, std::abs(v));
        pts.push_back({p, v});
      }
  }
  std::erase_if(pts, [&](const WeightedPoint& p) { return std::abs(p.value) <= 1e-18 * peak; });
  return pts;
}

}  // namespace

double integral_estimate(const TestFunction& f) {
  if (f.dim() > 2) throw UnsupportedInput("integral_estimate supports d <= 2");
  const SupportGrid grid = support_grid(f);
  double sum = 0.0;
  for (const auto& p : significant_points(f, grid)) sum += p.value;
  return sum * std::pow(grid.step, f.dim());
}

QuadResult norm_direct(const TestFunction& f, double beta, const QuadOptions& opts) {
  require_beta(beta);
  if (f.dim() > 2) throw UnsupportedInput("norm_direct supports d in {1, 2}; use norm_fourier");
  const SupportGrid grid = support_grid(f);
  const auto pts = significant_points(f, grid);
  if (pts.empty()) return {};
  const double cell = std::pow(grid.step, f.dim());

  // Autocorrelation g(z) = \int f(x) f(x+z) dx, even in z.
  auto autocorrelation = [&](double z0, double z1) {
    double acc = 0.0;
    if (f.dim() == 1) {
      for (const auto& p : pts) acc += p.value * f(p.x[0] + z0);
    } else {
      std::array<double, 2> shifted{};
      for (const auto& p : pts) {
        shifted = {p.x[0] + z0, p.x[1] + z1};
        acc += p.value * f(std::span<const double>(shifted));
      }
    }
    return acc * cell;
  };

  const double z_max = 2.0 * f.support_radius();
  QuadResult r;
  if (f.dim() == 1) {
    r = integrate([&](double z) { return z > 0.0 ? std::pow(z, beta) * autocorrelation(z, 0.0) : 0.0; }, 0.0,
                  z_max, opts);
    r = scaled(r, -2.0);
  } else {
    // g(z) = g(-z) so the angle ranges over a half turn, where trapezoid is spectral.
    constexpr int kAngles = 16;
    auto shell = [&](double rho) {
      if (rho <= 0.0) return 0.0;
      double acc = 0.0;
      for (int k = 0; k < kAngles; ++k) {
        const double theta = kPi * k / kAngles;
        acc += autocorrelation(rho * std::cos(theta), rho * std::sin(theta));
      }
      return std::pow(rho, 1.0 + beta) * acc * (2.0 * kPi / kAngles);
    };
    r = scaled(integrate(shell, 0.0, z_max, opts), -1.0);
  }
  require_converged(r, "norm_direct(" + f.label() + ")");
  if (r.value < -std::max(10.0 * r.error, 1e-9 * (1.0 + std::abs(r.value))))
    throw DomainError("negative squared norm " + format_number(r.value) + " for '" + f.label() +
                      "': not a member of H_0^beta");
  return r;
}

QuadResult cosine_radial_integral(double beta, double frequency) {
  require_beta(beta);
  if (!(frequency > 0.0)) throw DomainError("cosine integral frequency must be positive");
  const QuadOptions opts{1e-14, 1e-13, 200000};
  const double half_period = kPi / frequency;
  // 1 - cos(a u) = 2 sin^2(a u / 2) avoids cancellation near the origin;
  // u = v^q with q = 1/(2 - beta) makes the u^{1-beta} head bounded.
  const double q = 1.0 / (2.0 - beta);
  auto head = [&](double v) {
    if (v <= 0.0) return 0.5 * q * frequency * frequency;
    const double u = std::pow(v, q);
    const double s = std::sin(0.5 * frequency * u);
    return 2.0 * s * s * std::pow(u, -1.0 - beta) * q * std::pow(v, q - 1.0);
  };
  QuadResult r = integrate(head, 0.0, std::pow(half_period, 1.0 / q), opts);
  // Beyond the first half period: \int u^{-1-beta} is exact; the cosine part
  // is an alternating series of half-period integrals, accelerated.
  r.value += std::pow(half_period, -beta) / beta;
  auto oscillating = [&](double u) { return std::cos(frequency * u) * std::pow(u, -1.0 - beta); };
  constexpr int kTerms = 40;
  std::vector<double> partial;
  partial.reserve(kTerms);
  double sum = 0.0;
  for (int k = 1; k <= kTerms; ++k) {
    const QuadResult piece = integrate(oscillating, k * half_period, (k + 1) * half_period, opts);
    sum += piece.value;
    r.evaluations += piece.evaluations;
    r.converged = r.converged && piece.converged;
    partial.push_back(sum);
  }
  const Extrapolated tail = wynn_epsilon(partial);
  r.value -= tail.value;
  r.error += tail.error;
  r.converged = r.converged && tail.error < 1e-11 * std::abs(r.value);
  return r;
}

QuadResult sphere_abs_moment(double beta, std::span<const double> direction) {
  const int dim = static_cast<int>(direction.size());
  const double norm = std::sqrt(squared_norm(direction));
  if (std::abs(norm - 1.0) > 1e-12) throw PreconditionError("direction must be a unit vector");
  const QuadOptions opts{1e-13, 1e-12, 400000};
  if (dim == 1) return {2.0, 0.0, 0, true};
  if (dim == 2) {
    auto g = [&](double t) { return std::pow(std::abs(direction[0] * std::cos(t) + direction[1] * std::sin(t)), beta); };
    const std::array<double, 5> cuts{0.0, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi};
    return integrate_pieces(g, cuts, opts);
  }
  if (dim == 3) {
    bool ok = true;
    QuadResult r = integrate(
        [&](double polar) {
          const double sp = std::sin(polar), cp = std::cos(polar);
          auto g = [&](double az) {
            const double dot = direction[0] * sp * std::cos(az) + direction[1] * sp * std::sin(az) + direction[2] * cp;
            return std::pow(std::abs(dot), beta);
          };
          const std::array<double, 5> cuts{0.0, 0.5 * kPi, kPi, 1.5 * kPi, 2.0 * kPi};
          const QuadResult inner = integrate_pieces(g, cuts, opts);
          ok = ok && inner.converged;
          return sp * inner.value;
        },
        0.0, kPi, opts);
    r.converged = r.converged && ok;
    return r;
  }
  throw UnsupportedInput("angular integrals are implemented for d <= 3");
}

QuadResult c_beta_d(double beta, int dim, std::span<const double> direction) {
  require_beta(beta);
  if (dim < 1 || dim > 3) throw UnsupportedInput("c_beta_d is implemented for d in {1, 2, 3}");
  std::vector<double> unit(static_cast<std::size_t>(dim), 0.0);
  if (direction.empty()) {
    unit[0] = 1.0;
  } else {
    if (static_cast<int>(direction.size()) != dim) throw PreconditionError("direction has the wrong dimension");
    unit.assign(direction.begin(), direction.end());
  }
  // Polar coordinates: radial part scales out of each direction as |x.theta|^beta.
  const QuadResult radial = cosine_radial_integral(beta);
  const QuadResult angular = sphere_abs_moment(beta, unit);
  QuadResult r{radial.value * angular.value,
               radial.error * angular.value + angular.error * radial.value,
               radial.evaluations + angular.evaluations, radial.converged && angular.converged};
  require_converged(r, "c_beta_d");
  return r;
}

QuadResult norm_fourier(const TestFunction& f, double beta, const QuadOptions& opts) {
  require_beta(beta);
  if (!f.has_fourier()) throw UnsupportedInput("norm_fourier needs Fourier data for '" + f.label() + "'");
  const int dim = f.dim();
  if (dim > 3) throw UnsupportedInput("norm_fourier is implemented for d <= 3");
  const QuadOptions inner_opts{1e-15, 1e-12, 200000};
  bool inner_ok = true;

  // Angular integral of |F f(r theta)|^2 over S^{d-1}.
  auto shell = [&](double r) -> double {
    if (dim == 1) {
      const double p = r, m = -r;
      return std::norm(f.fourier(std::span<const double>(&p, 1))) +
             std::norm(f.fourier(std::span<const double>(&m, 1)));
    }
    if (f.isotropic()) {
      std::vector<double> xi(static_cast<std::size_t>(dim), 0.0);
      xi[0] = r;
      const double area = dim == 2 ? 2.0 * kPi : 4.0 * kPi;
      return area * std::norm(f.fourier(xi));
    }
    if (dim == 2) {
      std::array<double, 2> xi{};
      const QuadResult a = integrate(
          [&](double t) {
            xi = {r * std::cos(t), r * std::sin(t)};
            return std::norm(f.fourier(std::span<const double>(xi)));
          },
          0.0, 2.0 * kPi, inner_opts);
      inner_ok = inner_ok && a.converged;
      return a.value;
    }
    std::array<double, 3> xi{};
    const QuadResult a = integrate(
        [&](double polar) {
          const QuadResult b = integrate(
              [&](double az) {
                xi = {r * std::sin(polar) * std::cos(az), r * std::sin(polar) * std::sin(az), r * std::cos(polar)};
                return std::norm(f.fourier(std::span<const double>(xi)));
              },
              0.0, 2.0 * kPi, inner_opts);
          inner_ok = inner_ok && b.converged;
          return std::sin(polar) * b.value;
        },
        0.0, kPi, inner_opts);
    inner_ok = inner_ok && a.converged;
    return a.value;
  };

  // r^{d-1} |xi|^{-beta-d} = r^{-1-beta}; split at r = 1 and map the tail by r = 1/v.
  QuadResult r = integrate([&](double rho) { return rho > 0.0 ? shell(rho) * std::pow(rho, -1.0 - beta) : 0.0; },
                           0.0, 1.0, opts);
  r += integrate([&](double v) { return v > 0.0 ? shell(1.0 / v) * std::pow(v, beta - 1.0) : 0.0; }, 0.0, 1.0,
                 opts);
  r.converged = r.converged && inner_ok;
  require_converged(r, "norm_fourier(" + f.label() + ")");
  const QuadResult c = c_beta_d(beta, dim);
  return {r.value / c.value, r.error / c.value + r.value * c.error / (c.value * c.value),
          r.evaluations + c.evaluations, true};
}

}  // namespace fbmclt
