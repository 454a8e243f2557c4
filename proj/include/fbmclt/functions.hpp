#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fbmclt/quadrature.hpp"

namespace fbmclt {

/// A real test function on R^d with optional analytic Fourier transform
/// F f(xi) = \int f(x) e^{i x.xi} dx.
class TestFunction {
 public:
  using Evaluator = std::function<double(std::span<const double>)>;
  using Fourier = std::function<std::complex<double>(std::span<const double>)>;

  struct Traits {
    double support_radius;  // |f(x)| < 1e-15 for |x| beyond this
    double length_scale;    // narrowest feature width
    bool isotropic = false;
    std::optional<double> integral;  // exact \int f when known
  };

  TestFunction(int dim, std::string label, Evaluator evaluate, Fourier fourier, Traits traits);

  int dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  double operator()(std::span<const double> x) const { return evaluate_(x); }
  double operator()(double x) const { return evaluate_(std::span<const double>(&x, 1)); }
  bool has_fourier() const noexcept { return static_cast<bool>(fourier_); }
  std::complex<double> fourier(std::span<const double> xi) const;
  double support_radius() const noexcept { return traits_.support_radius; }
  double length_scale() const noexcept { return traits_.length_scale; }
  bool isotropic() const noexcept { return traits_.isotropic; }
  const std::optional<double>& exact_integral() const noexcept { return traits_.integral; }
  /// True when the zero integral holds by construction.
  bool certified_zero_integral() const noexcept { return traits_.integral && *traits_.integral == 0.0; }

 private:
  int dim_;
  std::string label_;
  Evaluator evaluate_;
  Fourier fourier_;
  Traits traits_;
};

/// Difference of centered isotropic Gaussian densities with standard
/// deviations sigma1 and sigma2.
TestFunction gaussian_diff(double sigma1, double sigma2, int dim);
/// x e^{-x^2/2} on R.
TestFunction odd_gaussian();
/// Centered isotropic Gaussian density (integral one; not in H_0).
TestFunction gaussian_density(double sigma, int dim);
/// sum_k w_k N(mu_k, s_k^2 I); the weights must sum to zero.
TestFunction gaussian_mixture(std::vector<double> weights, std::vector<std::vector<double>> centers,
                              std::vector<double> sigmas);
TestFunction zero_function(int dim);
TestFunction scaled(const TestFunction& f, double factor);
/// x -> f(-x).
TestFunction reflected(const TestFunction& f);

/// Parses "gaussian-diff:s1,s2", "odd-gaussian", "gaussian:s", "zero".
TestFunction parse_test_function(const std::string& spec, int dim);

/// \int f dx by trapezoid over the support box (d <= 2).
double integral_estimate(const TestFunction& f);

/// -\int\int f(x) f(y) |x-y|^beta dx dy for d in {1, 2}.
QuadResult norm_direct(const TestFunction& f, double beta, const QuadOptions& opts = {});

/// c_{beta,d}^{-1} \int |F f(xi)|^2 |xi|^{-beta-d} dxi for d in {1, 2, 3}.
QuadResult norm_fourier(const TestFunction& f, double beta, const QuadOptions& opts = {});

/// \int_0^\infty (1 - cos(frequency u)) u^{-1-beta} du.
QuadResult cosine_radial_integral(double beta, double frequency = 1.0);

/// \int_{S^{d-1}} |direction . theta|^beta dtheta for a unit direction, d <= 3.
QuadResult sphere_abs_moment(double beta, std::span<const double> direction);

/// c_{beta,d} = \int (1 - cos(x.xi)) |xi|^{-beta-d} dxi at unit x = direction
/// (default e_1), as radial integral times angular integral.
QuadResult c_beta_d(double beta, int dim, std::span<const double> direction = {});

}  // namespace fbmclt
