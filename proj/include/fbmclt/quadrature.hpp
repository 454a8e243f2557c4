#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "fbmclt/errors.hpp"

namespace fbmclt {

/// Numerical value with an error estimate and convergence status.
struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
  bool converged = true;
};

struct QuadOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  long max_evaluations = 100000;
};

namespace detail {

// 21-point Gauss-Kronrod rule (QUADPACK qk21).
inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478280, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod21(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  std::array<double, 10> f1{}, f2{};
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(fc - mean);
  for (int j = 0; j < 10; ++j)
    asc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));

  const double width = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  asc *= width;
  abs_sum *= width;
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
    err = std::max(50.0 * eps * abs_sum, err);
  return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod quadrature of f over [a, b]. Stops when the
/// summed error estimate falls below max(abs_tol, rel_tol*|value|). Never
/// throws for non-convergence; inspect QuadResult::converged.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opts = {}) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<detail::Segment> heap;
  heap.push(detail::gauss_kronrod21(f, a, b));
  out.evaluations = 21;
  double total = heap.top().value;
  double total_err = heap.top().error;
  while (true) {
    if (!std::isfinite(total)) {
      out.converged = false;
      break;
    }
    if (total_err <= std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) break;
    if (out.evaluations + 42 > opts.max_evaluations) {
      out.converged = false;
      break;
    }
    const detail::Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      out.converged = false;
      break;
    }
    heap.pop();
    const auto left = detail::gauss_kronrod21(f, worst.a, mid);
    const auto right = detail::gauss_kronrod21(f, mid, worst.b);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running update.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  out.value = total;
  out.error = total_err;
  if (!std::isfinite(total)) out.converged = false;
  return out;
}

/// Integrates over consecutive breakpoints, adding values and errors.
template <class F>
QuadResult integrate_pieces(F&& f, std::span<const double> breakpoints, const QuadOptions& opts = {}) {
  QuadResult out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const QuadResult piece = integrate(f, breakpoints[i], breakpoints[i + 1], opts);
    out.value += piece.value;
    out.error += piece.error;
    out.evaluations += piece.evaluations;
    out.converged = out.converged && piece.converged;
  }
  return out;
}

inline QuadResult& operator+=(QuadResult& lhs, const QuadResult& rhs) {
  lhs.value += rhs.value;
  lhs.error += rhs.error;
  lhs.evaluations += rhs.evaluations;
  lhs.converged = lhs.converged && rhs.converged;
  return lhs;
}

inline QuadResult scaled(QuadResult r, double factor) {
  r.value *= factor;
  r.error *= std::abs(factor);
  return r;
}

/// Throws QuadratureError when r did not converge.
inline const QuadResult& require_converged(const QuadResult& r, const std::string& what) {
  if (!r.converged) throw QuadratureError(what + ": quadrature did not converge", r.error);
  return r;
}

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// accelerated limit with the difference of the last two estimates as error.
struct Extrapolated {
  double value;
  double error;
};
Extrapolated wynn_epsilon(std::span<const double> partial_sums);

}  // namespace fbmclt
