#include "wolff/verifier.hpp"

#include <algorithm>
#include <cmath>

#include "wolff/errors.hpp"
#include "wolff/geometry.hpp"
#include "wolff/parallel.hpp"

namespace wolff {

NormReport norms(const ParabolicSolution& sol, const CylinderRegion& region,
                 const std::vector<double>& q_grid, double p) {
  const Geometry1D& geom = sol.grid.space;
  const bool radial = geom.kind == Geometry1D::Kind::radial;
  const double lo_edge = radial ? 0.0 : region.center - region.radius;
  const double hi_edge = radial ? region.radius : region.center + region.radius;
  if (!(region.t_lo > sol.times.front()) || !(region.t_hi < sol.times.back()))
    throw std::invalid_argument("norms: region touches the time boundary");
  if (!(hi_edge < geom.x_hi) || (!radial && !(lo_edge > geom.x_lo)))
    throw std::invalid_argument("norms: region touches the lateral boundary");
  if (!(region.t_hi > region.t_lo)) throw std::invalid_argument("norms: empty time window");

  const double h = geom.dx();

  // Clipped cell measures inside the spatial ball.
  std::vector<double> measure(sol.x.size(), 0.0);
  for (std::size_t i = 0; i < sol.x.size(); ++i) {
    const double cell_lo = std::max(sol.x[i] - 0.5 * h, radial ? 0.0 : geom.x_lo);
    const double cell_hi = std::min(sol.x[i] + 0.5 * h, geom.x_hi);
    const double a = std::max(cell_lo, lo_edge);
    const double b = std::min(cell_hi, hi_edge);
    if (b <= a) continue;
    if (radial && geom.dim > 1)
      measure[i] =
          geom::unit_ball_volume(geom.dim) * (std::pow(b, geom.dim) - std::pow(a, geom.dim));
    else
      measure[i] = b - a;
  }

  // Trapezoidal weights on the slice times clipped to the window.
  const std::size_t n_slices = sol.times.size();
  std::vector<double> tw(n_slices, 0.0);
  for (std::size_t n = 0; n + 1 < n_slices; ++n) {
    const double a = std::max(sol.times[n], region.t_lo);
    const double b = std::min(sol.times[n + 1], region.t_hi);
    if (b <= a) continue;
    tw[n] += 0.5 * (b - a);
    tw[n + 1] += 0.5 * (b - a);
  }

  NormReport report;
  report.q_grid = q_grid;
  report.lq.assign(q_grid.size(), 0.0);
  report.ess_sup_slice.assign(q_grid.size(), 0.0);
  for (std::size_t n = 0; n < n_slices; ++n) {
    const bool in_window = sol.times[n] >= region.t_lo && sol.times[n] <= region.t_hi;
    if (tw[n] <= 0.0 && !in_window) continue;
    for (std::size_t iq = 0; iq < q_grid.size(); ++iq) {
      double slice_lq = 0.0;
      double slice_low = 0.0;
      const double q = q_grid[iq];
      for (std::size_t i = 0; i < sol.x.size(); ++i) {
        if (measure[i] <= 0.0) continue;
        const double gmag = std::abs(sol.grad[n][i]);
        slice_lq += measure[i] * std::pow(gmag, q);
        slice_low += measure[i] * std::pow(gmag, q - p + 2.0);
      }
      report.lq[iq] += tw[n] * slice_lq;
      if (in_window)
        report.ess_sup_slice[iq] = std::max(report.ess_sup_slice[iq], slice_low);
    }
    if (in_window)
      for (std::size_t i = 0; i < sol.x.size(); ++i)
        if (measure[i] > 0.0)
          report.sup_norm = std::max(report.sup_norm, std::abs(sol.grad[n][i]));
  }
  for (std::size_t iq = 0; iq < q_grid.size(); ++iq)
    report.lq[iq] = std::pow(report.lq[iq], 1.0 / q_grid[iq]);
  return report;
}

Density make_log_density(int dim, double s, double alpha, double support) {
  if (!(support < 1.0))
    throw ConfigError("log density: support must be < 1 so log(1/r) stays positive");
  RadialProfile prof;
  prof.support_radius = support;
  prof.label = "power_log";
  prof.value = [s, alpha](double r) {
    if (r <= 0.0 || r >= 1.0) return 0.0;
    return std::pow(r, -s) * std::pow(std::log(1.0 / r), -alpha);
  };
  return Density(dim, std::move(prof));
}

std::string classify_threshold(const std::vector<double>& sup_seq,
                               const std::vector<std::vector<double>>& lq_seqs, double tol) {
  const std::size_t L = sup_seq.size();
  if (L < 3) return "inconclusive";
  auto rel = [](double a, double b) { return std::abs(b - a) / std::max(std::abs(a), 1e-300); };
  const bool sup_stable = rel(sup_seq[L - 3], sup_seq[L - 2]) < tol &&
                          rel(sup_seq[L - 2], sup_seq[L - 1]) < tol;
  if (sup_stable) return "lipschitz_consistent";
  bool sup_growing = true;
  for (std::size_t i = 0; i + 1 < L; ++i)
    if (!(sup_seq[i + 1] > sup_seq[i])) sup_growing = false;
  bool lq_stable = true;
  for (const auto& seq : lq_seqs) {
    if (seq.size() != L) return "inconclusive";
    if (rel(seq[L - 3], seq[L - 2]) >= tol || rel(seq[L - 2], seq[L - 1]) >= tol)
      lq_stable = false;
  }
  if (sup_growing && lq_stable) return "sup_divergent_lq_stable";
  return "inconclusive";
}

ThresholdScan threshold_scan(const ThresholdScanConfig& cfg) {
  if (cfg.levels < 3) throw ConfigError("threshold_scan: need at least 3 refinement levels");
  ThresholdScan scan;
  scan.config = cfg;
  const std::size_t n_alpha = cfg.alphas.size();
  scan.rows.assign(n_alpha * cfg.levels, ThresholdRow{});

  parallel_for(n_alpha * cfg.levels, cfg.jobs, [&](std::size_t cell) {
    const std::size_t ia = cell / cfg.levels;
    const int level = static_cast<int>(cell % cfg.levels);
    ThresholdRow row;
    row.alpha = cfg.alphas[ia];
    row.level = level;
    try {
      ParabolicProblem prob;
      VectorFieldSpec law;
      law.kind = VectorFieldSpec::Kind::pure_p_laplacian;
      law.p = cfg.p;
      prob.field = regularize(law, cfg.eps);
      prob.coeffs.p = cfg.p;
      prob.source_density = make_log_density(cfg.dim, 1.0, row.alpha, cfg.density_support);
      prob.coeffs.f = *prob.source_density;

      SpaceTimeGrid grid;
      grid.space = {Geometry1D::Kind::radial, cfg.dim, 0.0, cfg.domain_radius,
                    cfg.base_cells << level};
      grid.time = {0.0, cfg.t_end, cfg.dt_base / (1 << level), 1e-12, 1.0, 1.0};
      const ParabolicSolution sol = solve_ivbp(prob, grid);
      const NormReport rep = norms(sol, cfg.region, cfg.q_grid, cfg.p);
      row.sup_grad = rep.sup_norm;
      row.lq = rep.lq;
    } catch (const std::exception& err) {
      row.solved = false;
      row.error = err.what();
    }
    scan.rows[cell] = std::move(row);
  });

  for (std::size_t ia = 0; ia < n_alpha; ++ia) {
    std::vector<double> sup_seq;
    std::vector<std::vector<double>> lq_seqs(cfg.q_grid.size());
    bool complete = true;
    for (int level = 0; level < cfg.levels; ++level) {
      const ThresholdRow& row = scan.rows[ia * cfg.levels + level];
      if (!row.solved) {
        complete = false;
        break;
      }
      sup_seq.push_back(row.sup_grad);
      for (std::size_t iq = 0; iq < row.lq.size(); ++iq) lq_seqs[iq].push_back(row.lq[iq]);
    }
    scan.classifications.push_back(
        complete ? classify_threshold(sup_seq, lq_seqs, cfg.stability_tol) : "failed");
  }
  return scan;
}

ConditionReport wolff_condition_report(const StructureCoefficients& coeffs,
                                       const std::vector<Point>& sample,
                                       const std::vector<double>& radii, double nu_main,
                                       double nu_aposteriori, const QuadratureSpec& spec,
                                       int jobs) {
  coeffs.validate();
  if (radii.empty()) throw ConfigError("wolff_condition_report: empty radius grid");
  const int dim = coeffs.f.dim();
  const double p = coeffs.p;

  ConditionReport report;
  report.radii = radii;
  report.nu_main = nu_main;
  report.nu_aposteriori = nu_aposteriori;

  std::vector<Point> pts = sample;
  if (pts.empty()) pts.push_back(origin(dim));

  struct Item {
    std::string name;
    Density density;
    double beta;
    double pp;
  };
  std::vector<Item> items;
  auto sq = [](const Density& d) { return d.power(2.0); };
  items.push_back({"W_p[g^p]", coeffs.g.power(p), 1.0, p});
  items.push_back({"W_p[g1^p]", coeffs.g1.power(p), 1.0, p});
  items.push_back({"W_p[f]", coeffs.f, 1.0, p});
  items.push_back({"W_p[f1^(p/(p-1))]", coeffs.f1.power(p / (p - 1.0)), 1.0, p});
  items.push_back({"W_2/3,3[f^2]", sq(coeffs.f), 2.0 / 3.0, 3.0});
  items.push_back({"W_2/3,3[g^2]", sq(coeffs.g), 2.0 / 3.0, 3.0});
  items.push_back({"W_2/3,3[f1^2]", sq(coeffs.f1), 2.0 / 3.0, 3.0});
  items.push_back({"W_2/3,3[g1^2]", sq(coeffs.g1), 2.0 / 3.0, 3.0});
  items.push_back({"W_2/3,3[f2^2]", sq(coeffs.f2), 2.0 / 3.0, 3.0});
  items.push_back({"W_2/3,3[g2^2]", sq(coeffs.g2), 2.0 / 3.0, 3.0});
  // The composite of the Lipschitz condition exactly as printed: one Wolff
  // potential of the sum of the six squares, equal weights.
  items.push_back({"W_2/3,3[sum_of_squares]",
                   Density::sum_of({sq(coeffs.f), sq(coeffs.g), sq(coeffs.f1), sq(coeffs.g1),
                                    sq(coeffs.f2), sq(coeffs.g2)}),
                   2.0 / 3.0, 3.0});

  std::vector<ConditionCurve> curves(items.size());
  parallel_for(items.size(), jobs, [&](std::size_t it) {
    ConditionCurve curve;
    curve.name = items[it].name;
    curve.values.assign(radii.size(), 0.0);
    for (std::size_t ir = 0; ir < radii.size(); ++ir) {
      double sup = 0.0;
      for (const auto& x : pts) {
        const WolffResult res =
            wolff_eval(items[it].density, WolffQuery{items[it].beta, items[it].pp, x, radii[ir]},
                       spec);
        if (!res.finite()) curve.any_divergent = true;
        sup = std::max(sup, res.value);
      }
      curve.values[ir] = sup;
    }
    curves[it] = std::move(curve);
  });
  report.curves = std::move(curves);

  const std::size_t last = radii.size() - 1;  // smallest radius
  auto value_of = [&](const std::string& name) -> const ConditionCurve& {
    for (const auto& c : report.curves)
      if (c.name == name) return c;
    throw std::logic_error("wolff_condition_report: missing curve " + name);
  };
  const auto& gp = value_of("W_p[g^p]");
  const auto& g1p = value_of("W_p[g1^p]");
  const auto& composite = value_of("W_2/3,3[sum_of_squares]");
  const auto& fp = value_of("W_p[f]");
  const auto& f1p = value_of("W_p[f1^(p/(p-1))]");
  report.main_gradient_at_min_r = gp.values[last] + g1p.values[last];
  report.main_composite_at_min_r = composite.values[last];
  report.aposteriori_at_min_r =
      fp.values[last] + f1p.values[last] + gp.values[last] + g1p.values[last];
  bool divergent = false;
  for (const auto& c : report.curves) divergent = divergent || c.any_divergent;
  report.main_condition_met = !divergent &&
                              report.main_gradient_at_min_r < nu_main &&
                              report.main_composite_at_min_r < nu_main;
  report.aposteriori_condition_met = !divergent && report.aposteriori_at_min_r < nu_aposteriori;
  return report;
}

// --- scaling ---------------------------------------------------------------

namespace {

StructureCoefficients scale_any(const StructureCoefficients& coeffs, double lambda) {
  StructureCoefficients out = coeffs;
  const double p = coeffs.p;
  out.f = coeffs.f.times(std::pow(lambda, 1.0 - p));
  out.f1 = coeffs.f1.times(std::pow(lambda, 2.0 - p));
  out.f2 = coeffs.f2.times(std::pow(lambda, 1.0 - p));
  // g, g1, g2 are invariant under the scaling.
  return out;
}

}  // namespace

StructureCoefficients scale_coefficients(const StructureCoefficients& coeffs, double lambda) {
  if (!(lambda > 1.0)) throw std::invalid_argument("scale_coefficients: lambda must exceed 1");
  return scale_any(coeffs, lambda);
}

StructureCoefficients unscale_coefficients(const StructureCoefficients& coeffs, double lambda) {
  if (!(lambda > 1.0)) throw std::invalid_argument("unscale_coefficients: lambda must exceed 1");
  return scale_any(coeffs, 1.0 / lambda);
}

ScaledProblem scale_problem(const ParabolicProblem& prob, const SpaceTimeGrid& grid,
                            double lambda) {
  if (!(lambda > 1.0)) throw std::invalid_argument("scale_problem: lambda must exceed 1");
  const double p = prob.field.p;
  const double tau_of_t = std::pow(lambda, p - 2.0);

  ScaledProblem out;
  out.problem = prob;
  out.problem.coeffs = scale_any(prob.coeffs, lambda);
  out.problem.field.eps = prob.field.eps * std::pow(lambda, 2.0 - p);
  if (prob.source_density)
    out.problem.source_density = prob.source_density->times(std::pow(lambda, 1.0 - p));
  if (prob.source) {
    const SourceFn base = prob.source;
    out.problem.source = [base, lambda, p, tau_of_t](double x, double tau, double v, double z) {
      return std::pow(lambda, 1.0 - p) * base(x, tau / tau_of_t, lambda * v, lambda * z);
    };
  }
  if (prob.initial) {
    const ScalarFn base = prob.initial;
    out.problem.initial = [base, lambda](double x) { return base(x) / lambda; };
  }
  if (prob.boundary_left) {
    const ScalarFn base = prob.boundary_left;
    out.problem.boundary_left = [base, lambda, tau_of_t](double tau) {
      return base(tau / tau_of_t) / lambda;
    };
  }
  if (prob.boundary_right) {
    const ScalarFn base = prob.boundary_right;
    out.problem.boundary_right = [base, lambda, tau_of_t](double tau) {
      return base(tau / tau_of_t) / lambda;
    };
  }
  out.grid = grid;
  out.grid.time.t0 = grid.time.t0 * tau_of_t;
  out.grid.time.t1 = grid.time.t1 * tau_of_t;
  out.grid.time.dt0 = grid.time.dt0 * tau_of_t;
  out.grid.time.dt_min = grid.time.dt_min * tau_of_t;
  out.grid.time.dt_max = grid.time.dt_max * tau_of_t;
  return out;
}

ParabolicSolution scale_solution(const ParabolicSolution& sol, double lambda, double p) {
  if (!(lambda > 1.0)) throw std::invalid_argument("scale_solution: lambda must exceed 1");
  ParabolicSolution out = sol;
  const double tau_of_t = std::pow(lambda, p - 2.0);
  for (auto& t : out.times) t *= tau_of_t;
  out.grid.time.t0 *= tau_of_t;
  out.grid.time.t1 *= tau_of_t;
  out.eps = sol.eps * std::pow(lambda, 2.0 - p);
  for (auto& slice : out.u)
    for (auto& v : slice) v /= lambda;
  for (auto& slice : out.grad)
    for (auto& v : slice) v /= lambda;
  return out;
}

}  // namespace wolff
