#pragma once

#include <string>

namespace fbmclt {

/// Hurst index and spatial dimension of a d-dimensional fBm with Hd < 1.
class HurstModel {
 public:
  HurstModel(double hurst, int dim);

  double hurst() const noexcept { return hurst_; }
  int dim() const noexcept { return dim_; }
  /// 1/H - d, the weight exponent of the test-function space.
  double beta() const noexcept { return 1.0 / hurst_ - dim_; }
  double hd() const noexcept { return hurst_ * dim_; }

  /// 1/(d+1) < H < 1/d.
  bool theorem_regime() const noexcept;
  /// H > 1/(d+2): the limiting constant is finite.
  bool constant_regime() const noexcept;

  std::string describe() const;

  friend bool operator==(const HurstModel&, const HurstModel&) = default;

 private:
  double hurst_;
  int dim_;
};

/// Throws DomainError unless 1/(d+1) < H < 1/d, or
/// (when `exploratory` is set) at least in the constant regime.
void require_regime(const HurstModel& model, bool exploratory);

}  // namespace fbmclt
