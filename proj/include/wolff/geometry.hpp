#pragma once

namespace wolff::geom {

// Volume of the unit ball in R^N: pi^{N/2} / Gamma(N/2 + 1).
double unit_ball_volume(int dim);

// Surface measure of the unit sphere S^{N-1}, i.e. N * omega_N.
double unit_sphere_area(int dim);

// Fraction of S^{N-1} lying within polar angle theta of the pole, as a
// function of cos(theta). Runs from 0 at cos = 1 to 1 at cos = -1.
double cap_fraction(int dim, double cos_theta);

// Volume of a spherical cap of height h (measured from the cutting plane to
// the pole) in an N-ball of the given radius. h in [0, 2*radius].
double cap_volume(int dim, double radius, double h);

// Volume of the intersection of two N-balls with radii r1, r2 and center
// distance d.
double ball_intersection_volume(int dim, double d, double r1, double r2);

}  // namespace wolff::geom
