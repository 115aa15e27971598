#pragma once

#include <functional>
#include <vector>

namespace wolff::quad {

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

// Gauss-Legendre rule of the given order (2..64), cached per order.
const GaussRule& gauss_rule(int order);

using Fn = std::function<double(double)>;

double integrate(const Fn& f, double a, double b, int order = 16);

// Integral over [a, b] on panels clustered toward both endpoints
// (Chebyshev-spaced breakpoints). Handles mild endpoint singularities of
// sqrt type, e.g. spherical-cap fractions.
double integrate_graded(const Fn& f, double a, double b, int panels = 24, int order = 16);

// \int_0^b f by dyadic panels [b 2^{-k-1}, b 2^{-k}] descending toward the
// (possibly singular) endpoint 0. Stops once panel contributions are
// negligible; throws NonIntegrableError if they fail to decay.
double integrate_to_zero(const Fn& f, double b, double abs_tol = 1e-14,
                         double rel_tol = 1e-13, int order = 16, int max_panels = 1400);

}  // namespace wolff::quad
