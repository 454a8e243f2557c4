#include "fbmclt/fbm.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

#include "fbmclt/errors.hpp"
#include "fbmclt/seeding.hpp"

namespace fbmclt {

namespace {

// FFTW planning is not thread-safe; execution with the new-array API is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  fftw_complex* data;
};

constexpr double kClipFraction = 1e-12;

}  // namespace

double covariance(const HurstModel& model, double s, double t) {
  if (s < 0.0 || t < 0.0) throw DomainError("covariance requires nonnegative times");
  const double h2 = 2.0 * model.hurst();
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) - std::pow(std::abs(t - s), h2));
}

double fgn_autocovariance(double hurst, long lag, double delta) {
  const double k = std::abs(static_cast<double>(lag));
  const double h2 = 2.0 * hurst;
  const double unit = 0.5 * (std::pow(k + 1.0, h2) + std::pow(std::abs(k - 1.0), h2) - 2.0 * std::pow(k, h2));
  return unit * std::pow(delta, h2);
}

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

struct FgnSynthesizer::Plan {
  fftw_plan forward = nullptr;
  ~Plan() {
    if (forward) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(forward);
    }
  }
};

FgnSynthesizer::FgnSynthesizer(double hurst, std::size_t length, int max_doublings)
    : hurst_(hurst), length_(length), plan_(std::make_unique<Plan>()) {
  if (length == 0) throw PreconditionError("fGn length must be at least 1");
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("Hurst index must satisfy 0 < H < 1");

  std::size_t n = 2 * length;
  double worst = 0.0;
  for (int attempt = 0; attempt <= max_doublings; ++attempt, n *= 2) {
    FftwBuffer buffer(n);
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t lag = k <= half ? k : n - k;
      buffer.data[k][0] = fgn_autocovariance(hurst, static_cast<long>(lag));
      buffer.data[k][1] = 0.0;
    }
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), buffer.data, buffer.data, FFTW_FORWARD,
                                     FFTW_ESTIMATE);
      fftw_execute(p);
      fftw_destroy_plan(p);
    }
    double max_eig = 0.0;
    double min_eig = buffer.data[0][0];
    for (std::size_t k = 0; k < n; ++k) {
      max_eig = std::max(max_eig, buffer.data[k][0]);
      min_eig = std::min(min_eig, buffer.data[k][0]);
    }
    worst = min_eig;
    if (min_eig < -kClipFraction * max_eig) continue;

    min_eigenvalue_ = min_eig;
    embedding_ = n;
    sqrt_eigen_.resize(n);
    for (std::size_t k = 0; k < n; ++k)
      sqrt_eigen_[k] = std::sqrt(std::max(buffer.data[k][0], 0.0) / static_cast<double>(n));

    FftwBuffer scratch(n);
    std::lock_guard lock(fftw_planner_mutex());
    plan_->forward = fftw_plan_dft_1d(static_cast<int>(n), scratch.data, scratch.data, FFTW_FORWARD,
                                      FFTW_ESTIMATE);
    return;
  }
  std::ostringstream msg;
  msg << "circulant embedding has negative eigenvalue " << worst << " after " << max_doublings
      << " doublings";
  throw GenerationError(msg.str(), worst);
}

FgnSynthesizer::~FgnSynthesizer() = default;

void FgnSynthesizer::sample(std::uint64_t seed, std::span<double> first, std::span<double> second) const {
  if (first.size() < length_ || second.size() < length_)
    throw PreconditionError("fGn output spans shorter than the synthesizer length");
  const std::size_t n = embedding_;
  FftwBuffer buffer(n);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (std::size_t k = 0; k < n; ++k) {
    buffer.data[k][0] = sqrt_eigen_[k] * normal(rng);
    buffer.data[k][1] = sqrt_eigen_[k] * normal(rng);
  }
  fftw_execute_dft(plan_->forward, buffer.data, buffer.data);
  for (std::size_t i = 0; i < length_; ++i) {
    first[i] = buffer.data[i][0];
    second[i] = buffer.data[i][1];
  }
}

std::vector<std::vector<double>> fgn_increments(const HurstModel& model, std::size_t count,
                                                double delta, std::uint64_t seed) {
  if (!(delta > 0.0)) throw PreconditionError("fGn spacing must be positive");
  const FgnSynthesizer synth(model.hurst(), count);
  const double scale = std::pow(delta, model.hurst());
  const auto d = static_cast<std::size_t>(model.dim());
  std::vector<std::vector<double>> out(d, std::vector<double>(count));
  std::vector<double> spare(count);
  for (std::size_t j = 0; j < d; j += 2) {
    std::span<double> second = j + 1 < d ? std::span<double>(out[j + 1]) : std::span<double>(spare);
    synth.sample(derive_seed(seed, j / 2), out[j], second);
  }
  for (auto& row : out)
    for (double& v : row) v *= scale;
  return out;
}

FbmPath::FbmPath(HurstModel model, double horizon, std::size_t grid_size, std::uint64_t seed,
                 std::vector<double> values)
    : model_(model), horizon_(horizon), grid_size_(grid_size), seed_(seed), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(model_.dim()) * (grid_size_ + 1))
    throw PreconditionError("path value buffer has the wrong size");
}

std::span<const double> FbmPath::component(int j) const {
  if (j < 0 || j >= model_.dim()) throw std::out_of_range("path component index");
  const std::size_t stride = grid_size_ + 1;
  return std::span<const double>(values_).subspan(static_cast<std::size_t>(j) * stride, stride);
}

FbmPath FbmPath::reflected() const {
  std::vector<double> negated(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) negated[i] = -values_[i];
  return FbmPath(model_, horizon_, grid_size_, seed_, std::move(negated));
}

void FbmPath::write_csv(std::ostream& out) const {
  const auto old_precision = out.precision();
  out << "# fbm H=" << std::setprecision(17) << model_.hurst() << " d=" << model_.dim()
      << " T=" << horizon_ << " M=" << grid_size_ << " seed=" << seed_ << "\n";
  out << "t";
  for (int j = 0; j < model_.dim(); ++j) out << ",B" << (j + 1);
  out << "\n";
  for (std::size_t i = 0; i <= grid_size_; ++i) {
    out << time(i);
    for (int j = 0; j < model_.dim(); ++j) out << "," << at(j, i);
    out << "\n";
  }
  out.precision(old_precision);
}

FbmGenerator::FbmGenerator(HurstModel model, double horizon, std::size_t grid_size)
    : model_(model), horizon_(horizon), grid_size_(grid_size) {
  if (!(horizon > 0.0)) throw PreconditionError("path horizon must be positive");
  if (!is_power_of_two(grid_size))
    throw PreconditionError("grid size must be a power of two (got " + std::to_string(grid_size) + ")");
  synth_ = std::make_shared<const FgnSynthesizer>(model.hurst(), grid_size);
}

FbmPath FbmGenerator::generate(std::uint64_t seed) const {
  const std::size_t m = grid_size_;
  const auto d = static_cast<std::size_t>(model_.dim());
  const double scale = std::pow(spacing(), model_.hurst());
  std::vector<double> values(d * (m + 1), 0.0);
  std::vector<double> first(m), second(m);
  for (std::size_t j = 0; j < d; j += 2) {
    synth_->sample(derive_seed(seed, j / 2), first, second);
    for (std::size_t c = j; c < std::min(j + 2, d); ++c) {
      const std::vector<double>& incr = c == j ? first : second;
      double* row = values.data() + c * (m + 1);
      double acc = 0.0;
      row[0] = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        acc += incr[i];
        row[i + 1] = acc * scale;
      }
    }
  }
  return FbmPath(model_, horizon_, grid_size_, seed, std::move(values));
}

FbmPath generate_path(const HurstModel& model, double horizon, std::size_t grid_size, std::uint64_t seed) {
  return FbmGenerator(model, horizon, grid_size).generate(seed);
}

}  // namespace fbmclt
