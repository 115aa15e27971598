#pragma once

#include <string>
#include <vector>

#include "wolff/parabolic.hpp"
#include "wolff/wolff.hpp"

namespace wolff {

// Interior space-time cylinder B' x (t_lo, t_hi). For radial geometry the
// ball is centered at the origin; for intervals it is [center - radius,
// center + radius].
struct CylinderRegion {
  double radius = 0.5;
  double center = 0.0;
  double t_lo = 0.0;
  double t_hi = 1.0;
};

struct NormReport {
  std::vector<double> q_grid;
  std::vector<double> lq;             // L^q norms of |grad u| over the cylinder
  std::vector<double> ess_sup_slice;  // per q: sup_t of \int |grad u|^{q-p+2} dx
  double sup_norm = 0.0;
  int refinement_level = 0;
};

NormReport norms(const ParabolicSolution& sol, const CylinderRegion& region,
                 const std::vector<double>& q_grid, double p);

// |x|^{-s} (log 1/|x|)^{-alpha} on B_support; requires support < 1.
Density make_log_density(int dim, double s, double alpha, double support);

// --- threshold scan --------------------------------------------------------

struct ThresholdScanConfig {
  double p = 2.0;
  std::vector<double> alphas = {1.5, 0.5};
  int levels = 4;
  int base_cells = 32;
  double dt_base = 2e-3;  // halved per level together with dx
  int dim = 3;
  double domain_radius = 1.0;
  double t_end = 0.5;
  double density_support = 0.5;
  CylinderRegion region{0.6, 0.0, 0.1, 0.5};
  std::vector<double> q_grid = {4.0, 8.0};
  double eps = 1e-8;
  double stability_tol = 0.02;  // successive-level relative change
  int jobs = 1;
};

struct ThresholdRow {
  double alpha = 0.0;
  int level = 0;
  double sup_grad = 0.0;
  std::vector<double> lq;
  bool solved = true;
  std::string error;
};

struct ThresholdScan {
  ThresholdScanConfig config;
  std::vector<ThresholdRow> rows;            // alpha-major, level within
  std::vector<std::string> classifications;  // per alpha
};

// Deterministic classifier over the refinement sequences: the last two
// successive-level changes of sup|grad u| below tol means
// "lipschitz_consistent"; a monotonically growing sup with stable L^q norms
// means "sup_divergent_lq_stable"; anything else is "inconclusive".
std::string classify_threshold(const std::vector<double>& sup_seq,
                               const std::vector<std::vector<double>>& lq_seqs, double tol);

// Solves u_t - Delta_p u = f_alpha with zero data over nested refinements of
// the radial grid and classifies each alpha. Cells run concurrently under
// cfg.jobs; rows are assembled by (alpha, level) key order.
ThresholdScan threshold_scan(const ThresholdScanConfig& cfg);

// --- Wolff condition report -------------------------------------------------

struct ConditionCurve {
  std::string name;
  std::vector<double> values;  // sup over the sample, per radius
  bool any_divergent = false;
};

struct ConditionReport {
  std::vector<double> radii;
  std::vector<ConditionCurve> curves;
  double nu_main = 0.1;
  double nu_aposteriori = 0.1;
  double main_gradient_at_min_r = 0.0;
  double main_composite_at_min_r = 0.0;
  double aposteriori_at_min_r = 0.0;
  bool main_condition_met = false;
  bool aposteriori_condition_met = false;
};

// Evaluates every Wolff potential in the hypotheses of the Lipschitz theorem
// (the W_p gradient-coefficient part plus the W_{2/3,3} composite of the sum
// of squares, exactly as printed) and of the a-posteriori theorem, and flags
// them against the two caller-supplied smallness thresholds.
ConditionReport wolff_condition_report(const StructureCoefficients& coeffs,
                                       const std::vector<Point>& sample,
                                       const std::vector<double>& radii, double nu_main,
                                       double nu_aposteriori, const QuadratureSpec& spec = {},
                                       int jobs = 1);

// --- scaling transform ------------------------------------------------------

// v(x, tau) = u(x, t)/lambda with tau = lambda^{p-2} t maps solutions to
// solutions; the coefficient maps are f -> lambda^{1-p} f, f1 -> lambda^{2-p} f1,
// f2 -> lambda^{1-p} f2 with g, g1, g2 unchanged.
StructureCoefficients scale_coefficients(const StructureCoefficients& coeffs, double lambda);

// Inverse of scale_coefficients with the same lambda > 1.
StructureCoefficients unscale_coefficients(const StructureCoefficients& coeffs, double lambda);

struct ScaledProblem {
  ParabolicProblem problem;
  SpaceTimeGrid grid;
};

ScaledProblem scale_problem(const ParabolicProblem& prob, const SpaceTimeGrid& grid,
                            double lambda);

ParabolicSolution scale_solution(const ParabolicSolution& sol, double lambda, double p);

}  // namespace wolff
