#include <string>

#include "doctest.h"
#include "fbmclt/errors.hpp"
#include "fbmclt/hurst_model.hpp"

using namespace fbmclt;

namespace {
std::string message_of(double h, int d) {
  try {
    HurstModel m(h, d);
  } catch (const DomainError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("valid models expose beta and regimes") {
  const HurstModel m(0.6, 1);
  CHECK(m.beta() == doctest::Approx(1.0 / 0.6 - 1.0));
  CHECK(m.hd() == doctest::Approx(0.6));
  CHECK(m.theorem_regime());
  CHECK(m.constant_regime());
  CHECK_FALSE(HurstModel(0.3, 1).theorem_regime());
  CHECK(HurstModel(0.4, 2).theorem_regime());
  CHECK(HurstModel(0.3, 1).constant_regime() == false);
  CHECK(HurstModel(0.35, 1).constant_regime());
}

TEST_CASE("invalid parameters name the violated inequality") {
  CHECK(message_of(1.5, 1).find("0 < H < 1") != std::string::npos);
  CHECK(message_of(0.0, 1).find("0 < H < 1") != std::string::npos);
  CHECK(message_of(0.5, 2).find("Hd < 1") != std::string::npos);
  CHECK(message_of(0.5, 0).find("d >= 1") != std::string::npos);
}

TEST_CASE("regime guard and exploratory relaxation") {
  CHECK_NOTHROW(require_regime(HurstModel(0.6, 1), false));
  CHECK_THROWS_WITH_AS(require_regime(HurstModel(0.45, 1), false), doctest::Contains("1/(d+1) < H < 1/d"),
                       DomainError);
  CHECK_NOTHROW(require_regime(HurstModel(0.45, 1), true));
  CHECK_THROWS_AS(require_regime(HurstModel(0.3, 1), true), DomainError);
}
