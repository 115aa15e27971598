#include "wolff/geometry.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wolff::geom {

double unit_ball_volume(int dim) {
  if (dim < 1) throw std::invalid_argument("unit_ball_volume: dim must be >= 1");
  return std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
}

double unit_sphere_area(int dim) { return dim * unit_ball_volume(dim); }

// The cap with polar angle theta <= pi/2 covers (1/2) I_{sin^2 theta}((N-1)/2, 1/2)
// of the sphere; the obtuse case follows by symmetry.
double cap_fraction(int dim, double cos_theta) {
  if (dim < 2) throw std::invalid_argument("cap_fraction: dim must be >= 2");
  if (cos_theta >= 1.0) return 0.0;
  if (cos_theta <= -1.0) return 1.0;
  const double s2 = std::max(0.0, 1.0 - cos_theta * cos_theta);
  const double half = 0.5 * boost::math::ibeta(0.5 * (dim - 1), 0.5, s2);
  return cos_theta >= 0.0 ? half : 1.0 - half;
}

double cap_volume(int dim, double radius, double h) {
  if (radius <= 0.0) return 0.0;
  if (h <= 0.0) return 0.0;
  const double full = unit_ball_volume(dim) * std::pow(radius, dim);
  if (h >= 2.0 * radius) return full;
  if (h > radius) return full - cap_volume(dim, radius, 2.0 * radius - h);
  if (dim == 1) return h;  // segment [radius - h, radius]
  const double x = (2.0 * radius * h - h * h) / (radius * radius);
  return 0.5 * full * boost::math::ibeta(0.5 * (dim + 1), 0.5, x);
}

double ball_intersection_volume(int dim, double d, double r1, double r2) {
  if (r1 <= 0.0 || r2 <= 0.0) return 0.0;
  d = std::abs(d);
  if (d >= r1 + r2) return 0.0;
  if (d <= std::abs(r1 - r2)) {
    const double r = std::min(r1, r2);
    return unit_ball_volume(dim) * std::pow(r, dim);
  }
  // Split the lens at the radical plane; c1 is its signed distance from the
  // first center, so h1 may exceed r1 when the plane lies past that center.
  const double c1 = (d * d - r2 * r2 + r1 * r1) / (2.0 * d);
  const double h1 = r1 - c1;
  const double h2 = r2 - (d - c1);
  return cap_volume(dim, r1, h1) + cap_volume(dim, r2, h2);
}

}  // namespace wolff::geom
