#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wolff/density.hpp"
#include "wolff/wolff.hpp"

namespace wolff {

struct RadialGrid {
  double R = 1.0;
  int n_nodes = 257;  // >= 64
  enum class Spacing { uniform, log_refined } spacing = Spacing::uniform;
  double r_min = 0.0;  // first node for log_refined; must be positive there

  std::vector<double> nodes() const;
};

// Discrete radial solution of -Delta_p u = f on B_R with u(R) = 0. u is the
// cumulative quadrature of the closed-form representation; du is the exact
// derivative of that representation at the nodes.
struct RadialSolution {
  int dim = 3;
  double p = 2.0;
  double R = 1.0;
  std::vector<double> r;
  std::vector<double> u;
  std::vector<double> du;
  double sup = 0.0;  // u(0)

  double value(double radius) const;       // piecewise linear, clamped
  double interval_slope(int i) const;      // (u[i+1]-u[i])/(r[i+1]-r[i])
};

RadialSolution solve_radial_dirichlet(const Density& f, double p, const RadialGrid& grid);

// Max defect over nodes of r^{N-1}|u'|^{p-2}u'(r) + \int_0^r s^{N-1} f ds,
// relative to the total mass scale.
double radial_flux_residual(const RadialSolution& sol, const Density& f);

struct SupBoundReport {
  double sup_u = 0.0;
  double sup_wolff = 0.0;
  double ratio = 1.0;  // sup_u / sup_wolff; 0/0 reported as 1
  bool consistent = true;
};

SupBoundReport verify_sup_bound(const Density& f, double p, const RadialGrid& grid,
                                const QuadratureSpec& spec = {});

// --- test functions -------------------------------------------------------

// A member of a W^{1,p} test family on B_R. Radial members carry profile and
// slope in r; off-center members are bumps about a point at distance
// center_dist from the origin.
struct ThetaFunction {
  enum class Kind { radial, offcenter } kind = Kind::radial;
  std::string label;
  std::function<double(double)> value;  // radial: theta(r); offcenter: bump profile of s
  std::function<double(double)> slope;
  double support = 1.0;      // radial support or bump width
  double center_dist = 0.0;  // offcenter only
};

// Seeded, reproducible family of W^{1,p}_0(B_R) members: centered polynomial
// bumps, shifted shells, oscillatory profiles, off-center bumps.
std::vector<ThetaFunction> make_theta_family(int count, double R, std::uint64_t seed);

struct HardyReport {
  struct Row {
    std::string label;
    double ratio_sharp = 0.0;    // \int f h^{1-p} |theta|^p / \int |grad theta|^p
    double ratio_bounded = 0.0;  // \int f |theta|^p / (sup(h)^{p-1} \int |grad theta|^p)
  };
  std::vector<Row> rows;
  double max_ratio_sharp = 0.0;
  double max_ratio_bounded = 0.0;
};

// Checks the Hardy-type inequalities for h solving -Delta_p h = f. The
// driving density is passed explicitly so nothing is differentiated
// numerically; a theta = h member is appended to the family.
HardyReport hardy_check(const RadialSolution& h, const Density& f, double p,
                        const std::vector<ThetaFunction>& family);

struct PoincareReport {
  struct Row {
    std::string label;
    double gamma = 0.0;
  };
  std::vector<Row> zero_trace_rows;  // \int f|theta|^p <= gamma sup W^{p-1} \int |grad theta|^p
  std::vector<Row> two_term_rows;    // the rho > R variant with the (rho-R)^{-p} term
  double gamma_zero_trace = 0.0;
  double gamma_two_term = 0.0;
  double sup_wolff_2r = 0.0;
  double sup_wolff_2rho = 0.0;
  bool consistent = true;  // false if sup W = 0 with a nonzero numerator
};

PoincareReport weighted_poincare_check(const Density& f, double p, double R,
                                       const std::vector<ThetaFunction>& zero_trace_family,
                                       double rho, const QuadratureSpec& spec = {});

}  // namespace wolff
