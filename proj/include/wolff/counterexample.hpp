#pragma once

#include <string>
#include <vector>

#include "wolff/density.hpp"
#include "wolff/wolff.hpp"

namespace wolff {

// The packed-bump density f = sum_n rho_n^{-p} 1_{B_{rho_n}(x_n)} whose global
// Wolff potential stays finite while its small-radius supremum does not
// vanish. Radii default to the geometric sequence rho_n = rho0 * q0^n.
struct CounterexampleSpec {
  int dim = 3;
  double p = 2.0;  // in [2, dim)
  double rho0 = 0.25;
  double q0 = 0.25;
  int n_terms = 12;
  double box_side = 2.0;  // centers on a lattice inside [0, box_side]^N

  double packing_exponent() const { return (dim - p) / (dim - 1.0); }
  std::vector<double> radii() const;  // rho_1 .. rho_{n_terms}
  double radius_sum_full() const;     // sum_{n>=1} rho_n^{(N-p)/(N-1)}, closed form
  double radius_sum_tail(int after) const;
  void validate() const;
};

struct AppendixConstants {
  double a_p = 0.0;  // ((p-1)/p) omega_N^{1/(p-1)}
  double b_p = 0.0;  // a_p + c_p
  double c_p = 0.0;  // ((p-1)/(N-p)) omega_N^{1/(p-1)}

  static AppendixConstants make(int dim, double p);
};

struct PackedDensity {
  Density density;  // bump sum
  std::vector<Point> centers;
  std::vector<double> radii;
  double spacing = 0.0;  // lattice spacing used
};

// Greedy axis-aligned lattice placement with spacing 4 * rho_1^{(N-p)/(N-1)}
// (the largest radius dominates every pairwise constraint); deterministic
// enumeration order. Throws ConfigError with the maximal feasible count when
// n_terms does not fit in the box.
PackedDensity build(const CounterexampleSpec& spec);

struct LocalLowerReport {
  std::vector<double> values;  // W_p^{f_n}(x_n, rho_n) per term
  double a_p = 0.0;
  double max_rel_err = 0.0;
  bool ok = false;
};

// Appendix lower bound: each bump contributes exactly a_p at its own scale,
// so lim_{R->0} sup_x W_p^f(x, R) >= a_p > 0.
LocalLowerReport verify_local_lower(const CounterexampleSpec& spec, const PackedDensity& packed,
                                    double rel_tol = 1e-8, const QuadratureSpec& quad = {});

struct GlobalUpperReport {
  double computed_max = 0.0;  // max over the sample of W_p^f(x, infinity)
  Point argmax;
  double analytic_tail = 0.0;  // c_p * sum of omitted rho_n^{(N-p)/(N-1)}
  double bound = 0.0;          // b_p + c_p * full radius sum
  double margin = 0.0;         // bound - (computed_max + analytic_tail)
  bool ok = false;
  // Per-bump split checks of the two Appendix cases.
  double worst_near_excess = 0.0;  // max over near pairs of W^{f_n}(x,inf) - b_p
  double worst_far_excess = 0.0;   // max over far pairs of W^{f_n}(x,inf) - c_p rho_n^e
  double worst_subadditivity = 0.0;
  std::string offending;  // nonempty when a split check fails
  std::vector<Point> sample;
};

// Appendix upper bound at every sample point (centers, pairwise midpoints,
// far field, plus caller extras), including the analytic truncation tail so
// truncation never weakens the verification.
GlobalUpperReport verify_global_upper(const CounterexampleSpec& spec,
                                      const PackedDensity& packed,
                                      const std::vector<Point>& extra_sample = {},
                                      double tol = 1e-6, const QuadratureSpec& quad = {});

// At most one bump satisfies |x - x_n| < rho_n + rho_n^{(N-p)/(N-1)} for any
// x; verified combinatorially from the packing distances.
bool verify_disjointness(const CounterexampleSpec& spec, const PackedDensity& packed);

}  // namespace wolff
