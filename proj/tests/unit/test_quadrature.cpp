#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fbmclt/errors.hpp"
#include "fbmclt/quadrature.hpp"

using namespace fbmclt;

TEST_CASE("smooth integrals converge to their closed forms") {
  const QuadResult s = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(s.converged);
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-13));

  const QuadResult g = integrate([](double x) { return std::exp(-x * x); }, -8.0, 8.0);
  CHECK(g.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("endpoint singularity is resolved by bisection") {
  const QuadResult r = integrate([](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }, 0.0, 1.0,
                                 QuadOptions{1e-9, 1e-9, 200000});
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("empty interval and reversed accounting") {
  CHECK(integrate([](double) { return 1.0; }, 1.0, 1.0).value == 0.0);
}

TEST_CASE("budget exhaustion is reported, not hidden") {
  const QuadResult r = integrate([](double x) { return std::sin(1.0 / (x + 1e-6)); }, 0.0, 1.0,
                                 QuadOptions{1e-15, 1e-15, 200});
  CHECK_FALSE(r.converged);
  CHECK_THROWS_AS(require_converged(r, "wiggly"), QuadratureError);
}

TEST_CASE("integrate_pieces sums across breakpoints") {
  const std::vector<double> cuts{0.0, 1.0, 3.0};
  const QuadResult r = integrate_pieces([](double x) { return std::abs(x - 1.0); }, cuts);
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("Wynn epsilon accelerates an alternating series") {
  std::vector<double> partial;
  double s = 0.0;
  for (int k = 1; k <= 12; ++k) {
    s += (k % 2 == 1 ? 1.0 : -1.0) / k;
    partial.push_back(s);
  }
  const auto e = wynn_epsilon(partial);
  CHECK(std::abs(e.value - std::log(2.0)) < 1e-8);
  CHECK(std::abs(partial.back() - std::log(2.0)) > 1e-2);
}
