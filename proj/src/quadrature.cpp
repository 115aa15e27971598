#include "wolff/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "wolff/errors.hpp"

namespace wolff::quad {

namespace {

GaussRule compute_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  // Roots of the Legendre polynomial by Newton iteration from the Chebyshev
  // estimate; symmetric pairs share one solve.
  for (int i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_rule(int order) {
  if (order < 2 || order > 64) throw std::invalid_argument("gauss_rule: order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, compute_rule(order)).first;
  return it->second;
}

double integrate(const Fn& f, double a, double b, int order) {
  if (!(b > a)) return 0.0;
  const GaussRule& rule = gauss_rule(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return sum * half;
}

double integrate_graded(const Fn& f, double a, double b, int panels, int order) {
  if (!(b > a)) return 0.0;
  double sum = 0.0;
  double prev = a;
  for (int j = 1; j <= panels; ++j) {
    const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * j / panels));
    const double next = a + (b - a) * s;
    sum += integrate(f, prev, next, order);
    prev = next;
  }
  return sum;
}

double integrate_to_zero(const Fn& f, double b, double abs_tol, double rel_tol,
                         int order, int max_panels) {
  if (!(b > 0.0)) return 0.0;
  double sum = 0.0;
  double prev = -1.0;
  double ratio = 0.0;
  int grow_count = 0;
  int small_count = 0;
  double hi = b;
  for (int k = 0; k < max_panels; ++k) {
    const double lo = 0.5 * hi;
    const double c = integrate(f, lo, hi, order);
    sum += c;
    const double tol = abs_tol + rel_tol * std::abs(sum);
    if (prev > 0.0 && c > 0.0) {
      ratio = c / prev;
      grow_count = (ratio >= 1.0 - 1e-9) ? grow_count + 1 : 0;
      if (grow_count >= 10 && c > tol)
        throw NonIntegrableError("integrate_to_zero: divergent integrand near 0");
    }
    if (std::abs(c) <= tol) {
      if (++small_count >= 2) {
        const double r = std::clamp(ratio, 0.0, 0.9);
        return sum + c * r / (1.0 - r);  // geometric tail estimate
      }
    } else {
      small_count = 0;
    }
    prev = c;
    hi = lo;
    if (hi < 1e-300) break;
  }
  return sum;
}

}  // namespace wolff::quad
