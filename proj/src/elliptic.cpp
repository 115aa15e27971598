#include "wolff/elliptic.hpp"

#include <algorithm>
#include <cmath>

#include "wolff/errors.hpp"
#include "wolff/geometry.hpp"
#include "wolff/quadrature.hpp"
#include "wolff/radial_integrals.hpp"

namespace wolff {

std::vector<double> RadialGrid::nodes() const {
  if (n_nodes < 64) throw ConfigError("radial grid: n_nodes must be >= 64");
  if (!(R > 0.0)) throw ConfigError("radial grid: R must be positive");
  std::vector<double> out(n_nodes);
  if (spacing == Spacing::uniform) {
    for (int i = 0; i < n_nodes; ++i) out[i] = R * i / (n_nodes - 1.0);
  } else {
    const double lo = r_min > 0.0 ? r_min : R * 1e-6;
    if (!(lo > 0.0) || lo >= R)
      throw ConfigError("radial grid: log_refined needs 0 < r_min < R");
    const double q = std::log(R / lo);
    for (int i = 0; i < n_nodes; ++i) out[i] = lo * std::exp(q * i / (n_nodes - 1.0));
    out.back() = R;
  }
  return out;
}

double RadialSolution::value(double radius) const {
  if (radius >= r.back()) return 0.0;
  if (radius <= r.front()) {
    if (r.front() <= 0.0) return u.front();
    const double s = std::max(radius, 0.0) / r.front();
    return sup + s * (u.front() - sup);
  }
  const auto it = std::upper_bound(r.begin(), r.end(), radius);
  const std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
  const double s = (radius - r[i]) / (r[i + 1] - r[i]);
  return u[i] + s * (u[i + 1] - u[i]);
}

double RadialSolution::interval_slope(int i) const {
  return (u[i + 1] - u[i]) / (r[i + 1] - r[i]);
}

RadialSolution solve_radial_dirichlet(const Density& f, double p, const RadialGrid& grid) {
  if (!f.is_radial())
    throw std::invalid_argument("solve_radial_dirichlet: density must be a radial profile");
  if (!(p > 1.0)) throw std::invalid_argument("solve_radial_dirichlet: p must exceed 1");
  const int dim = f.dim();
  const double kpow = 1.0 / (p - 1.0);

  // u(r) = \int_r^R (rho^{1-N} \int_0^rho s^{N-1} f ds)^{1/(p-1)} d rho.
  auto g = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    const double m = f.radial_weighted_mass(0.0, rho);
    if (m <= 0.0) return 0.0;
    return std::pow(std::pow(rho, 1.0 - dim) * m, kpow);
  };

  RadialSolution sol;
  sol.dim = dim;
  sol.p = p;
  sol.R = grid.R;
  sol.r = grid.nodes();
  const int n = static_cast<int>(sol.r.size());
  sol.u.assign(n, 0.0);
  sol.du.assign(n, 0.0);
  for (int i = n - 2; i >= 0; --i) {
    double inc;
    if (sol.r[i] <= 0.0)
      inc = quad::integrate_to_zero(g, sol.r[i + 1]);
    else
      inc = quad::integrate(g, sol.r[i], sol.r[i + 1]);
    sol.u[i] = sol.u[i + 1] + inc;
  }
  for (int i = 0; i < n; ++i) sol.du[i] = sol.r[i] > 0.0 ? -g(sol.r[i]) : 0.0;
  sol.sup = sol.r.front() <= 0.0 ? sol.u.front()
                                 : sol.u.front() + quad::integrate_to_zero(g, sol.r.front());
  return sol;
}

double radial_flux_residual(const RadialSolution& sol, const Density& f) {
  const double scale = std::max(f.radial_weighted_mass(0.0, sol.R), 1e-300);
  double worst = 0.0;
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    const double r = sol.r[i];
    if (r <= 0.0) continue;
    const double flux =
        std::pow(r, sol.dim - 1) * std::pow(std::abs(sol.du[i]), sol.p - 1.0) *
        (sol.du[i] <= 0.0 ? -1.0 : 1.0);
    const double defect = flux + f.radial_weighted_mass(0.0, r);
    worst = std::max(worst, std::abs(defect) / scale);
  }
  return worst;
}

SupBoundReport verify_sup_bound(const Density& f, double p, const RadialGrid& grid,
                                const QuadratureSpec& spec) {
  SupBoundReport report;
  const RadialSolution sol = solve_radial_dirichlet(f, p, grid);
  report.sup_u = sol.sup;

  const int dim = f.dim();
  bool infinite = false;
  for (double frac : {0.0, 0.25, 0.5, 0.75}) {
    Point x = origin(dim);
    x[0] = frac * grid.R;
    const WolffResult w = wolff_eval(f, WolffQuery{1.0, p, x, 2.0 * grid.R}, spec);
    if (!w.finite()) infinite = true;
    report.sup_wolff = std::max(report.sup_wolff, w.value);
  }
  if (report.sup_u == 0.0 && report.sup_wolff == 0.0) {
    report.ratio = 1.0;  // f == 0 convention
  } else if (report.sup_wolff > 0.0 && !infinite) {
    report.ratio = report.sup_u / report.sup_wolff;
  } else {
    report.ratio = 0.0;
    report.consistent = !(infinite && std::isfinite(report.sup_u));
  }
  return report;
}

// --- Hardy and Poincare checks --------------------------------------------

namespace {

struct ThetaIntegrals {
  double num_sharp = 0.0;    // \int f h^{1-p} |theta|^p
  double num_bounded = 0.0;  // \int f |theta|^p
  double den = 0.0;          // \int |grad theta|^p
  double lp = 0.0;           // \int |theta|^p (over B_support)
};

ThetaIntegrals theta_integrals(const ThetaFunction& theta, const Density& f, double p,
                               const RadialSolution* h) {
  const int dim = f.dim();
  const double area = geom::unit_sphere_area(dim);
  ThetaIntegrals out;
  auto fval = [&](double r) { return r < f.support_radius() ? f.radial_value(r) : 0.0; };
  if (theta.kind == ThetaFunction::Kind::radial) {
    const double S = theta.support;
    out.den = area * quad::integrate_to_zero(
                         [&](double r) {
                           return std::pow(std::abs(theta.slope(r)), p) * std::pow(r, dim - 1);
                         },
                         S);
    out.lp = area * quad::integrate_to_zero(
                        [&](double r) {
                          return std::pow(std::abs(theta.value(r)), p) * std::pow(r, dim - 1);
                        },
                        S);
    out.num_bounded = area * quad::integrate_to_zero(
                                 [&](double r) {
                                   return fval(r) * std::pow(std::abs(theta.value(r)), p) *
                                          std::pow(r, dim - 1);
                                 },
                                 S);
    if (h != nullptr) {
      out.num_sharp = area * quad::integrate_to_zero(
                                 [&](double r) {
                                   const double hv = h->value(r);
                                   if (hv <= 0.0) return 0.0;
                                   return fval(r) * std::pow(hv, 1.0 - p) *
                                          std::pow(std::abs(theta.value(r)), p) *
                                          std::pow(r, dim - 1);
                                 },
                                 S);
    }
  } else {
    const double d = theta.center_dist;
    const double w = theta.support;
    auto weight = [&](double s) { return std::pow(std::abs(theta.value(s)), p); };
    out.den = area * quad::integrate_to_zero(
                         [&](double s) {
                           return std::pow(std::abs(theta.slope(s)), p) * std::pow(s, dim - 1);
                         },
                         w);
    out.lp = integral_over_offcenter_ball_weighted([](double) { return 1.0; }, weight, dim, d, w);
    out.num_bounded = integral_over_offcenter_ball_weighted(fval, weight, dim, d, w);
    if (h != nullptr) {
      out.num_sharp = integral_over_offcenter_ball_weighted(
          [&](double r) {
            const double hv = h->value(r);
            return hv > 0.0 ? fval(r) * std::pow(hv, 1.0 - p) : 0.0;
          },
          weight, dim, d, w);
    }
  }
  return out;
}

}  // namespace

HardyReport hardy_check(const RadialSolution& h, const Density& f, double p,
                        const std::vector<ThetaFunction>& family) {
  if (h.sup <= 0.0)
    throw std::invalid_argument("hardy_check: h vanishes; -Delta_p h = f needs f > 0 somewhere");
  HardyReport report;
  const int dim = f.dim();
  const double sup_pow = std::pow(h.sup, p - 1.0);

  for (const auto& theta : family) {
    const ThetaIntegrals ints = theta_integrals(theta, f, p, &h);
    HardyReport::Row row;
    row.label = theta.label;
    row.ratio_sharp = ints.den > 0.0 ? ints.num_sharp / ints.den : 0.0;
    row.ratio_bounded = ints.den > 0.0 ? ints.num_bounded / (sup_pow * ints.den) : 0.0;
    report.rows.push_back(row);
  }

  // theta = h saturates the integration-by-parts identity: \int f h equals
  // \int |h'|^p exactly in the continuum, so this member measures the
  // discretization error of the solution representation.
  {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + 1 < h.r.size(); ++i) {
      const double r0 = h.r[i];
      const double r1 = h.r[i + 1];
      const double u0 = h.u[i];
      const double slope = h.interval_slope(static_cast<int>(i));
      auto h_lin = [&](double r) { return u0 + slope * (r - r0); };
      auto f_h = [&](double r) {
        return (r < f.support_radius() ? f.radial_value(r) : 0.0) * h_lin(r) *
               std::pow(r, dim - 1);
      };
      num += r0 <= 0.0 ? quad::integrate_to_zero(f_h, r1) : quad::integrate(f_h, r0, r1);
      den += std::pow(std::abs(slope), p) * (std::pow(r1, dim) - std::pow(r0, dim)) / dim;
    }
    HardyReport::Row row;
    row.label = "solution";
    row.ratio_sharp = den > 0.0 ? num / den : 0.0;  // shared area factor cancels
    // For theta = h the bounded variant reads \int f h^p <= sup^{p-1} \int |h'|^p.
    double num_b = 0.0;
    for (std::size_t i = 0; i + 1 < h.r.size(); ++i) {
      const double r0 = h.r[i];
      const double r1 = h.r[i + 1];
      const double u0 = h.u[i];
      const double slope = h.interval_slope(static_cast<int>(i));
      auto f_hp = [&](double r) {
        const double hv = u0 + slope * (r - r0);
        return (r < f.support_radius() ? f.radial_value(r) : 0.0) *
               std::pow(std::max(hv, 0.0), p) * std::pow(r, dim - 1);
      };
      num_b += r0 <= 0.0 ? quad::integrate_to_zero(f_hp, r1) : quad::integrate(f_hp, r0, r1);
    }
    row.ratio_bounded = den > 0.0 ? num_b / (sup_pow * den) : 0.0;
    report.rows.push_back(row);
  }

  for (const auto& row : report.rows) {
    report.max_ratio_sharp = std::max(report.max_ratio_sharp, row.ratio_sharp);
    report.max_ratio_bounded = std::max(report.max_ratio_bounded, row.ratio_bounded);
  }
  return report;
}

PoincareReport weighted_poincare_check(const Density& f, double p, double R,
                                       const std::vector<ThetaFunction>& zero_trace_family,
                                       double rho, const QuadratureSpec& spec) {
  if (!(rho > R)) throw std::invalid_argument("weighted_poincare_check: rho must exceed R");
  PoincareReport report;
  const int dim = f.dim();
  const double area = geom::unit_sphere_area(dim);

  auto sup_wolff = [&](double ball, double radius) {
    double sup = 0.0;
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      Point x = origin(dim);
      x[0] = frac * ball;
      const WolffResult w = wolff_eval(f, WolffQuery{1.0, p, x, radius}, spec);
      sup = std::max(sup, w.value);
    }
    return sup;
  };
  report.sup_wolff_2r = sup_wolff(2.0 * R, 2.0 * R);
  report.sup_wolff_2rho = sup_wolff(2.0 * rho, 2.0 * rho);

  const double w2r = std::pow(report.sup_wolff_2r, p - 1.0);
  for (const auto& theta : zero_trace_family) {
    const ThetaIntegrals ints = theta_integrals(theta, f, p, nullptr);
    PoincareReport::Row row;
    row.label = theta.label;
    if (ints.num_bounded > 0.0 && w2r == 0.0) {
      report.consistent = false;
      row.gamma = std::numeric_limits<double>::infinity();
    } else {
      row.gamma = (w2r > 0.0 && ints.den > 0.0) ? ints.num_bounded / (w2r * ints.den) : 0.0;
    }
    report.zero_trace_rows.push_back(row);
    report.gamma_zero_trace = std::max(report.gamma_zero_trace, row.gamma);
  }

  // Second variant: theta in W^{1,p}(B_R), integrals of the right-hand side
  // over B_rho. Family: constant, ramp, the proof's cutoff, and a bump.
  struct Member {
    std::string label;
    std::function<double(double)> value, slope;
  };
  const double width = rho - R;
  std::vector<Member> family2 = {
      {"constant", [](double) { return 1.0; }, [](double) { return 0.0; }},
      {"ramp", [R](double r) { return r / R; }, [R](double) { return 1.0 / R; }},
      {"cutoff",
       [R, width](double r) { return r <= R ? 1.0 : std::max(0.0, 1.0 - (r - R) / width); },
       [R, rho, width](double r) { return (r > R && r < rho) ? -1.0 / width : 0.0; }},
      {"bump", [R](double r) { return std::exp(-r * r / (R * R)); },
       [R](double r) { return -2.0 * r / (R * R) * std::exp(-r * r / (R * R)); }},
  };
  const double w2rho = std::pow(report.sup_wolff_2rho, p - 1.0);
  auto fval = [&](double r) { return r < f.support_radius() ? f.radial_value(r) : 0.0; };
  for (const auto& m : family2) {
    const double num = area * quad::integrate_to_zero(
                                  [&](double r) {
                                    return fval(r) * std::pow(std::abs(m.value(r)), p) *
                                           std::pow(r, dim - 1);
                                  },
                                  R);
    const double grad = area * quad::integrate_to_zero(
                                   [&](double r) {
                                     return std::pow(std::abs(m.slope(r)), p) *
                                            std::pow(r, dim - 1);
                                   },
                                   rho);
    const double lp = area * quad::integrate_to_zero(
                                 [&](double r) {
                                   return std::pow(std::abs(m.value(r)), p) *
                                          std::pow(r, dim - 1);
                                 },
                                 rho);
    const double denom = w2rho * (grad + lp / std::pow(width, p));
    PoincareReport::Row row;
    row.label = m.label;
    if (num > 0.0 && denom == 0.0) {
      report.consistent = false;
      row.gamma = std::numeric_limits<double>::infinity();
    } else {
      row.gamma = denom > 0.0 ? num / denom : 0.0;
    }
    report.two_term_rows.push_back(row);
    report.gamma_two_term = std::max(report.gamma_two_term, row.gamma);
  }
  return report;
}

}  // namespace wolff
