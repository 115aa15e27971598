#pragma once

#include <functional>

namespace wolff {

// \int_{B_rho(c)} phi(|y|) dy for a radial integrand phi and |c| = d.
// Splits into fully covered spheres plus a cap-weighted band; handles an
// integrable singularity of phi at the origin.
double integral_over_offcenter_ball(const std::function<double(double)>& phi, int dim,
                                    double d, double rho);

// \int_{B_rho(c)} phi(|y|) w(|y - c|) dy with a radial weight about the ball
// center (e.g. a test-function bump). The spherical average of phi is taken
// by Gauss quadrature in the polar angle, with panels graded toward the
// radius where the sphere meets the origin.
double integral_over_offcenter_ball_weighted(const std::function<double(double)>& phi,
                                             const std::function<double(double)>& weight,
                                             int dim, double d, double rho);

}  // namespace wolff
