#pragma once

#include "geode/types.hpp"

#include <cmath>
#include <utility>
#include <vector>

namespace geode {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

/// Integral over [lo, hi]; `value` is computed at `nodes` points and
/// `est_error` by comparison against half the node count.
struct QuadratureResult {
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int nodes = 0;
  double est_error = 0.0;
};

template <class F>
double integrate_gl(F&& f, double lo, double hi, int n) {
  const GaussLegendreRule rule = gauss_legendre(n);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

template <class F>
QuadratureResult integrate_gl_with_estimate(F&& f, double lo, double hi, int n) {
  QuadratureResult r;
  r.lo = lo;
  r.hi = hi;
  r.nodes = n;
  const double coarse = integrate_gl(f, lo, hi, std::max(2, n / 2));
  r.value = integrate_gl(f, lo, hi, n);
  r.est_error = std::abs(r.value - coarse);
  return r;
}

}  // namespace geode
