#include "fbmclt/constants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fbmclt/errors.hpp"

namespace fbmclt {

namespace {

void require_finite_constant(const HurstModel& model) {
  if (!model.constant_regime()) {
    std::ostringstream msg;
    msg << "constant diverges: requires H > 1/(d+2) (" << model.describe() << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

QuadResult c_integral(const HurstModel& model, const QuadOptions& opts) {
  require_finite_constant(model);
  const double h = model.hurst();
  const double hd = model.hd();

  // [0,1]: w = u^{1/(1-Hd)} absorbs w^{-Hd}; the remaining factor is bounded.
  const double head_power = 1.0 / (1.0 - hd);
  auto head = [&](double u) {
    if (u <= 0.0) return 1.0 / (1.0 - hd);
    const double w = std::pow(u, head_power);
    return -std::expm1(-0.5 * std::pow(w, -2.0 * h)) / (1.0 - hd);
  };

  // [1,inf): w = 1/v gives v^{Hd-2}(1 - exp(-v^{2H}/2)) ~ v^{q}/2 with
  // q = Hd+2H-2 > -1; v = s^{1/(q+1)} removes the algebraic endpoint.
  const double q = hd + 2.0 * h - 2.0;
  const double tail_power = 1.0 / (q + 1.0);
  auto tail = [&](double s) {
    if (s <= 0.0) return 0.5 / (q + 1.0);
    const double v = std::pow(s, tail_power);
    const double x = std::pow(v, 2.0 * h);
    return -std::expm1(-0.5 * x) / x / (q + 1.0);
  };

  QuadResult r = integrate(head, 0.0, 1.0, opts);
  r += integrate(tail, 0.0, 1.0, opts);
  require_converged(r, "c_integral(" + model.describe() + ")");
  return scaled(r, 2.0 / std::pow(2.0 * std::numbers::pi, 0.5 * model.dim()));
}

double c_closed(const HurstModel& model) {
  require_finite_constant(model);
  const double h = model.hurst();
  const double hd = model.hd();
  const double gamma_arg = (hd + 2.0 * h - 1.0) / (2.0 * h);
  if (gamma_arg <= 0.0) throw DomainError("Gamma argument must be positive");
  return std::pow(2.0, 1.0 - 1.0 / (2.0 * h)) * std::tgamma(gamma_arg) /
         ((1.0 - hd) * std::pow(std::numbers::pi, 0.5 * model.dim()));
}

double verify_constant(const HurstModel& model, double tol) {
  const double residual = std::abs(c_integral(model).value - c_closed(model));
  if (!(residual < tol)) {
    std::ostringstream msg;
    msg << "constant forms disagree for " << model.describe() << ": residual " << residual
        << " >= " << tol;
    throw VerificationError(msg.str());
  }
  return residual;
}

}  // namespace fbmclt
