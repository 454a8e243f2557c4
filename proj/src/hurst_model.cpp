#include "fbmclt/hurst_model.hpp"

#include <cmath>
#include <sstream>

#include "fbmclt/errors.hpp"

namespace fbmclt {

HurstModel::HurstModel(double hurst, int dim) : hurst_(hurst), dim_(dim) {
  if (!(hurst > 0.0 && hurst < 1.0)) {
    std::ostringstream msg;
    msg << "Hurst index must satisfy 0 < H < 1 (got H=" << hurst << ")";
    throw DomainError(msg.str());
  }
  if (dim < 1) throw DomainError("dimension must satisfy d >= 1");
  if (hurst * dim >= 1.0) {
    std::ostringstream msg;
    msg << "local time requires Hd < 1 (got H=" << hurst << ", d=" << dim << ")";
    throw DomainError(msg.str());
  }
}

bool HurstModel::theorem_regime() const noexcept {
  return hurst_ > 1.0 / (dim_ + 1) && hurst_ < 1.0 / dim_;
}

bool HurstModel::constant_regime() const noexcept { return hurst_ > 1.0 / (dim_ + 2); }

std::string HurstModel::describe() const {
  std::ostringstream out;
  out << "H=" << hurst_ << ", d=" << dim_;
  return out.str();
}

void require_regime(const HurstModel& model, bool exploratory) {
  if (model.theorem_regime()) return;
  if (exploratory) {
    if (model.constant_regime()) return;
    throw DomainError("exploratory mode requires 1/(d+2) < H < 1/d (" + model.describe() + ")");
  }
  throw DomainError("requires 1/(d+1) < H < 1/d (" + model.describe() + ")");
}

}  // namespace fbmclt
