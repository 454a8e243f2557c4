#include "fbmclt/quadrature.hpp"

namespace fbmclt {

Extrapolated wynn_epsilon(std::span<const double> partial_sums) {
  const std::size_t n = partial_sums.size();
  if (n == 0) return {0.0, 0.0};
  if (n < 3) return {partial_sums.back(), n == 2 ? std::abs(partial_sums[1] - partial_sums[0]) : 0.0};

  // prev holds column k-1, cur column k of the epsilon table.
  std::vector<double> before(n + 1, 0.0);
  std::vector<double> prev(partial_sums.begin(), partial_sums.end());
  std::vector<double> best;  // even-column diagonal estimates
  best.push_back(partial_sums.back());
  for (std::size_t k = 1; k < n; ++k) {
    std::vector<double> cur(prev.size() - 1);
    for (std::size_t i = 0; i + 1 < prev.size(); ++i) {
      const double diff = prev[i + 1] - prev[i];
      if (diff == 0.0) {
        // Sequence already converged at this level.
        return {prev[i + 1], best.size() > 1 ? std::abs(best.back() - best[best.size() - 2]) : 0.0};
      }
      cur[i] = before[i + 1] + 1.0 / diff;
    }
    before = prev;
    prev = std::move(cur);
    if (k % 2 == 0 && !prev.empty()) best.push_back(prev.back());
    if (prev.size() < 2) break;
  }
  const double value = best.back();
  const double error = best.size() > 1 ? std::abs(best.back() - best[best.size() - 2]) : 0.0;
  return {value, error};
}

}  // namespace fbmclt
