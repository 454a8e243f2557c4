#pragma once

#include "fbmclt/hurst_model.hpp"
#include "fbmclt/quadrature.hpp"

namespace fbmclt {

/// Limiting variance constant from its integral form
///   2 (2 pi)^{-d/2} \int_0^\infty w^{-Hd} (1 - exp(-1/(2 w^{2H}))) dw.
/// Throws DomainError when H <= 1/(d+2) and QuadratureError on non-convergence.
QuadResult c_integral(const HurstModel& model, const QuadOptions& opts = {});

/// Closed form 2^{1-1/(2H)} Gamma((Hd+2H-1)/(2H)) / ((1-Hd) pi^{d/2}).
double c_closed(const HurstModel& model);

/// |c_integral - c_closed|; throws VerificationError when not below tol.
double verify_constant(const HurstModel& model, double tol);

}  // namespace fbmclt
