#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "fbmclt/hurst_model.hpp"

namespace fbmclt {

/// One-component covariance E[B(s)B(t)] = (t^{2H} + s^{2H} - |t-s|^{2H}) / 2.
double covariance(const HurstModel& model, double s, double t);

/// Autocovariance of fractional Gaussian noise with spacing `delta` at lag k.
double fgn_autocovariance(double hurst, long lag, double delta = 1.0);

bool is_power_of_two(std::size_t n) noexcept;

/// Exact sampler of stationary fractional Gaussian noise of length M by
/// circulant embedding. One FFT yields two independent length-M sequences
/// (real and imaginary parts). Thread-safe after construction.
class FgnSynthesizer {
 public:
  /// Unit spacing. Throws GenerationError if no embedding up to
  /// 2^max_doublings times the minimal size is nonnegative.
  FgnSynthesizer(double hurst, std::size_t length, int max_doublings = 8);
  ~FgnSynthesizer();
  FgnSynthesizer(const FgnSynthesizer&) = delete;
  FgnSynthesizer& operator=(const FgnSynthesizer&) = delete;

  std::size_t length() const noexcept { return length_; }
  std::size_t embedding_size() const noexcept { return embedding_; }
  /// Smallest eigenvalue of the accepted embedding before clipping.
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

  /// Fills two independent unit-spacing fGn sequences from a 64-bit seed.
  void sample(std::uint64_t seed, std::span<double> first, std::span<double> second) const;

 private:
  struct Plan;
  double hurst_;
  std::size_t length_;
  std::size_t embedding_;
  double min_eigenvalue_ = 0.0;
  std::vector<double> sqrt_eigen_;  // sqrt(lambda_k / N)
  std::unique_ptr<Plan> plan_;
};

/// d independent fGn sequences (d x M) with spacing delta.
std::vector<std::vector<double>> fgn_increments(const HurstModel& model, std::size_t count,
                                                double delta, std::uint64_t seed);

/// A uniformly sampled d-dimensional fBm trajectory on [0, T].
class FbmPath {
 public:
  FbmPath(HurstModel model, double horizon, std::size_t grid_size, std::uint64_t seed,
          std::vector<double> values);

  const HurstModel& model() const noexcept { return model_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t grid_size() const noexcept { return grid_size_; }
  std::uint64_t seed() const noexcept { return seed_; }
  double spacing() const noexcept { return horizon_ / static_cast<double>(grid_size_); }
  double time(std::size_t i) const noexcept { return spacing() * static_cast<double>(i); }
  int dim() const noexcept { return model_.dim(); }

  /// Values of component j at the M+1 grid points.
  std::span<const double> component(int j) const;
  double at(int j, std::size_t i) const { return component(j)[i]; }
  /// The path -B, same seed and grid.
  FbmPath reflected() const;

  /// CSV with a `#` header line carrying model parameters and seed, then
  /// columns t,B1..Bd.
  void write_csv(std::ostream& out) const;

 private:
  HurstModel model_;
  double horizon_;
  std::size_t grid_size_;
  std::uint64_t seed_;
  std::vector<double> values_;  // component-major, d*(M+1)
};

/// Generator of fBm paths for a fixed (model, horizon, grid). Caches the
/// circulant eigenvalues; generate() is const and safe to call concurrently.
class FbmGenerator {
 public:
  FbmGenerator(HurstModel model, double horizon, std::size_t grid_size);

  const HurstModel& model() const noexcept { return model_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t grid_size() const noexcept { return grid_size_; }
  double spacing() const noexcept { return horizon_ / static_cast<double>(grid_size_); }
  const FgnSynthesizer& synthesizer() const noexcept { return *synth_; }

  FbmPath generate(std::uint64_t seed) const;

 private:
  HurstModel model_;
  double horizon_;
  std::size_t grid_size_;
  std::shared_ptr<const FgnSynthesizer> synth_;
};

FbmPath generate_path(const HurstModel& model, double horizon, std::size_t grid_size,
                      std::uint64_t seed);

}  // namespace fbmclt
