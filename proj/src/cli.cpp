#include "wolff/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>

#include "wolff/config.hpp"
#include "wolff/counterexample.hpp"
#include "wolff/errors.hpp"
#include "wolff/geometry.hpp"
#include "wolff/verifier.hpp"
#include "wolff/version.hpp"

namespace wolff {

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kVerificationError = 4;

struct CommonOpts {
  std::string config_path;
  std::string out_dir = "out";
  int jobs = 1;
  double tol = 0.0;  // 0 keeps the quadrature defaults
};

Json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& err) {
    throw ConfigError("config: parse failure in '" + path + "': " + err.what());
  }
  return j;
}

QuadratureSpec quad_spec(const Json& config, const CommonOpts& opts) {
  QuadratureSpec spec =
      cfg::quadrature(config.contains("quadrature") ? config.at("quadrature") : Json(),
                      "quadrature");
  if (opts.tol > 0.0) {
    spec.rel_tol = opts.tol;
    spec.abs_tol = opts.tol * 1e-2;
  }
  return spec;
}

std::string status_str(WolffStatus status) {
  switch (status) {
    case WolffStatus::converged:
      return "ok";
    case WolffStatus::infinite:
      return "infinite";
    case WolffStatus::non_integrable:
      return "non_integrable";
  }
  return "unknown";
}

Json tolerances_json(const QuadratureSpec& spec) {
  return Json{{"abs_tol", spec.abs_tol},
              {"rel_tol", spec.rel_tol},
              {"radial_nodes", spec.radial_nodes},
              {"dyadic_depth", spec.dyadic_depth}};
}

// --- subcommand runners ---------------------------------------------------

int run_wolff(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const Density f = cfg::density(config.at("density"));
  const QuadratureSpec spec = quad_spec(config, opts);
  manifest.set_tolerances(tolerances_json(spec));
  if (!config.contains("queries") || !config.at("queries").is_array())
    throw ConfigError("config: queries: expected an array");

  CsvTable table({"x", "R", "value", "status"});
  for (std::size_t i = 0; i < config.at("queries").size(); ++i) {
    const std::string path = "queries[" + std::to_string(i) + "]";
    const Json& q = config.at("queries").at(i);
    WolffQuery query;
    query.beta = cfg::num_or(q, "beta", 1.0);
    query.p = cfg::need_num(q, "p", path);
    const auto pts = cfg::point_list(Json::array({q.at("center")}), f.dim(), path + ".center");
    query.center = pts.front();
    if (q.at("radius").is_string() && q.at("radius").get<std::string>() == "inf")
      query.radius = WolffQuery::infinite_radius();
    else
      query.radius = cfg::need_num(q, "radius", path);
    const WolffResult res = wolff_eval(f, query, spec);
    table.add_row({point_str(query.center), format_double(query.radius),
                   format_double(res.value), status_str(res.status)});
  }
  manifest.emit(opts.out_dir, "wolff.csv", table.str());
  return kOk;
}

int run_kato(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const Density f = cfg::density(config.at("density"));
  const QuadratureSpec spec = quad_spec(config, opts);
  manifest.set_tolerances(tolerances_json(spec));
  const double beta = cfg::num_or(config, "beta", 1.0);
  const double p = cfg::need_num(config, "p", "kato");
  const double threshold = cfg::need_num(config, "threshold", "kato");
  const auto sample = cfg::point_list(
      config.contains("sample") ? config.at("sample") : Json(), f.dim(), "sample");
  const auto radii = cfg::radii_list(config.at("radii"), "radii");

  const KatoScan scan = kato_limit_scan(f, beta, p, sample, radii, threshold, spec, opts.jobs);

  CsvTable table({"x", "R", "value", "status"});
  for (const auto& row : scan.rows)
    table.add_row({point_str(row.x), format_double(row.radius), format_double(row.value),
                   status_str(row.status)});
  manifest.emit(opts.out_dir, "kato.csv", table.str());

  Json summary;
  summary["classification"] = scan.classification;
  summary["threshold"] = scan.threshold;
  summary["any_divergent"] = scan.any_divergent;
  summary["radii"] = scan.radii;
  summary["sup_curve"] = scan.sup_curve;
  manifest.emit(opts.out_dir, "kato_summary.json", summary.dump(2) + "\n");
  return kOk;
}

int run_pk(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const Density F = cfg::density(config.at("density"));
  const QuadratureSpec spec = quad_spec(config, opts);
  const double radius = cfg::need_num(config, "domain_radius", "pk");
  const int family = cfg::int_or(config, "family_size", 24);
  const auto seed = static_cast<std::uint64_t>(cfg::int_or(config, "seed", 2024));
  manifest.set_seed(seed);
  manifest.set_tolerances(tolerances_json(spec));

  const PkEstimate est = pk_form_bound_estimate(F, radius, family, seed, spec);

  CsvTable members({"label", "fq", "grad", "l2", "integrable"});
  for (const auto& m : est.members)
    members.add_row({m.label, format_double(m.fq), format_double(m.grad),
                     format_double(m.l2), m.integrable ? "1" : "0"});
  manifest.emit(opts.out_dir, "pk_members.csv", members.str());

  CsvTable frontier({"c_cap", "beta"});
  for (const auto& fp : est.frontier)
    frontier.add_row({format_double(fp.c_cap), format_double(fp.beta)});
  manifest.emit(opts.out_dir, "pk_frontier.csv", frontier.str());

  Json summary;
  summary["beta_hat"] = est.beta_hat;
  summary["c_hat"] = est.c_hat;
  summary["family_size"] = est.family_size;
  summary["seed"] = est.seed;
  summary["domain_radius"] = est.domain_radius;
  summary["all_integrable"] = est.all_integrable;
  summary["note"] =
      "beta_hat is a lower estimate of the true form bound: a finite test family "
      "can only under-observe it";
  manifest.emit(opts.out_dir, "pk.json", summary.dump(2) + "\n");
  return kOk;
}

int run_classes(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const QuadratureSpec spec = quad_spec(config, opts);
  manifest.set_tolerances(tolerances_json(spec));
  int status = kOk;
  Json summary;

  if (config.contains("density")) {
    const Density f = cfg::density(config.at("density"));
    const double alpha = cfg::need_num(config, "alpha", "classes");
    const double beta = cfg::need_num(config, "beta", "classes");
    const double p = cfg::need_num(config, "p", "classes");
    const double q = cfg::need_num(config, "q", "classes");
    const double kappa = cfg::need_num(config, "kappa", "classes");
    const auto xs = cfg::point_list(Json::array({config.at("x")}), f.dim(), "x");
    const auto radii = cfg::radii_list(config.at("radii"), "radii");

    CsvTable table({"R", "lhs", "rhs", "ratio"});
    double ratio_min = std::numeric_limits<double>::infinity();
    double ratio_max = 0.0;
    int branch = 0;
    for (double R : radii) {
      const EmbeddingCheck check =
          class_embedding_check(f, alpha, beta, p, q, kappa, xs.front(), R, spec);
      branch = check.branch;
      table.add_row({format_double(R), format_double(check.lhs), format_double(check.rhs),
                     format_double(check.ratio)});
      if (check.ratio > 0.0) {
        ratio_min = std::min(ratio_min, check.ratio);
        ratio_max = std::max(ratio_max, check.ratio);
      }
    }
    manifest.emit(opts.out_dir, "classes.csv", table.str());
    summary["branch"] = branch;
    summary["ratio_min"] = ratio_min;
    summary["ratio_max"] = ratio_max;
    summary["ratio_spread"] = ratio_min > 0.0 ? ratio_max / ratio_min : 0.0;
  }

  if (config.contains("exponent_check")) {
    const Json& e = config.at("exponent_check");
    auto rat = [&](const char* key) {
      if (!e.contains(key)) throw ConfigError(std::string("config: exponent_check.") + key);
      const Json& v = e.at(key);
      if (v.is_string()) return Rational::parse(v.get<std::string>());
      return Rational(v.get<std::int64_t>());
    };
    const EmbeddingExponents expo =
        embedding_exponents(rat("alpha"), rat("beta"), rat("p"), rat("q"), rat("kappa"),
                            rat("s"), cfg::need_int(e, "dim", "exponent_check"));
    summary["exponent_lhs"] = expo.lhs.str();
    summary["exponent_rhs"] = expo.rhs.str();
    summary["exponents_equal"] = expo.equal;
    summary["lhs_converges"] = expo.lhs_converges;
    summary["rhs_converges"] = expo.rhs_converges;
    summary["mass_finite"] = expo.mass_finite;
    if (!expo.equal) status = kVerificationError;
  }

  manifest.emit(opts.out_dir, "classes.json", summary.dump(2) + "\n");
  return status;
}

int run_elliptic(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const Density f = cfg::density(config.at("density"));
  const double p = cfg::need_num(config, "p", "elliptic");
  const RadialGrid grid = cfg::radial_grid(config.at("grid"));
  const QuadratureSpec spec = quad_spec(config, opts);
  manifest.set_tolerances(tolerances_json(spec));

  const RadialSolution sol = solve_radial_dirichlet(f, p, grid);
  std::string profile;
  for (std::size_t i = 0; i < sol.r.size(); ++i)
    profile += format_double(sol.r[i]) + " " + format_double(sol.u[i]) + "\n";
  manifest.emit(opts.out_dir, "profile.txt", profile);

  const SupBoundReport sup = verify_sup_bound(f, p, grid, spec);
  Json summary;
  summary["sup_u"] = sup.sup_u;
  summary["sup_wolff"] = sup.sup_wolff;
  summary["ratio"] = sup.ratio;
  summary["consistent"] = sup.consistent;
  summary["flux_residual"] = radial_flux_residual(sol, f);
  manifest.emit(opts.out_dir, "elliptic.json", summary.dump(2) + "\n");
  return sup.consistent ? kOk : kVerificationError;
}

int run_hardy(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const Density f = cfg::density(config.at("density"));
  const double p = cfg::need_num(config, "p", "hardy");
  const RadialGrid grid = cfg::radial_grid(config.at("grid"));
  const int count = cfg::int_or(config, "family_count", 20);
  const auto seed = static_cast<std::uint64_t>(cfg::int_or(config, "seed", 20240501));
  const double tolerance = cfg::num_or(config, "tolerance", 5e-3);
  const double rho = cfg::num_or(config, "rho", 1.5 * grid.R);
  const QuadratureSpec spec = quad_spec(config, opts);
  manifest.set_seed(seed);
  manifest.set_tolerances(tolerances_json(spec));

  const RadialSolution h = solve_radial_dirichlet(f, p, grid);
  const auto family = make_theta_family(count, grid.R, seed);
  const HardyReport hardy = hardy_check(h, f, p, family);

  CsvTable table({"label", "ratio_sharp", "ratio_bounded"});
  for (const auto& row : hardy.rows)
    table.add_row({row.label, format_double(row.ratio_sharp),
                   format_double(row.ratio_bounded)});
  manifest.emit(opts.out_dir, "hardy.csv", table.str());

  const PoincareReport poincare = weighted_poincare_check(f, p, grid.R, family, rho, spec);
  CsvTable ptab({"family", "label", "gamma"});
  for (const auto& row : poincare.zero_trace_rows)
    ptab.add_row({"zero_trace", row.label, format_double(row.gamma)});
  for (const auto& row : poincare.two_term_rows)
    ptab.add_row({"two_term", row.label, format_double(row.gamma)});
  manifest.emit(opts.out_dir, "poincare.csv", ptab.str());

  const bool pass = hardy.max_ratio_sharp <= 1.0 + tolerance &&
                    hardy.max_ratio_bounded <= 1.0 + tolerance && poincare.consistent;
  Json summary;
  summary["max_ratio_sharp"] = hardy.max_ratio_sharp;
  summary["max_ratio_bounded"] = hardy.max_ratio_bounded;
  summary["tolerance"] = tolerance;
  summary["gamma_zero_trace"] = poincare.gamma_zero_trace;
  summary["gamma_two_term"] = poincare.gamma_two_term;
  summary["pass"] = pass;
  manifest.emit(opts.out_dir, "hardy.json", summary.dump(2) + "\n");
  return pass ? kOk : kVerificationError;
}

ParabolicProblem problem_from_config(const Json& config, const SpaceTimeGrid& grid) {
  ParabolicProblem prob;
  prob.field = cfg::field(config.at("field"));
  if (config.contains("coefficients"))
    prob.coeffs = cfg::coefficients(config.at("coefficients"));
  else
    prob.coeffs.p = prob.field.p;
  if (config.contains("source_density"))
    prob.source_density = cfg::density(config.at("source_density"), "source_density");
  prob.initial = cfg::named_profile(
      config.contains("initial") ? config.at("initial") : Json("zero"), grid.space, "initial");
  prob.boundary_left = cfg::named_profile(
      config.contains("boundary_left") ? config.at("boundary_left") : Json("zero"), grid.space,
      "boundary_left");
  prob.boundary_right = cfg::named_profile(
      config.contains("boundary_right") ? config.at("boundary_right") : Json("zero"),
      grid.space, "boundary_right");
  return prob;
}

void emit_solution(const ParabolicSolution& sol, const CommonOpts& opts,
                   RunManifest& manifest) {
  CsvTable field({"t", "x", "u", "grad"});
  for (std::size_t n = 0; n < sol.times.size(); ++n)
    for (std::size_t i = 0; i < sol.x.size(); ++i)
      field.add_row({format_double(sol.times[n]), format_double(sol.x[i]),
                     format_double(sol.u[n][i]), format_double(sol.grad[n][i])});
  manifest.emit(opts.out_dir, "field.csv", field.str());

  CsvTable steps({"t", "dt", "newton_iters", "picard_iters", "rejections", "residual"});
  for (const auto& s : sol.newton_stats)
    steps.add_row({format_double(s.t_new), format_double(s.dt), std::to_string(s.newton_iters),
                   std::to_string(s.picard_iters), std::to_string(s.rejections),
                   format_double(s.residual)});
  manifest.emit(opts.out_dir, "steps.csv", steps.str());
}

int run_solve(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const SpaceTimeGrid grid = cfg::spacetime(config, "solve");
  const ParabolicProblem prob = problem_from_config(config, grid);
  NewtonOptions newton;
  if (config.contains("newton")) {
    newton.max_iter = cfg::int_or(config.at("newton"), "max_iter", newton.max_iter);
    newton.tol = cfg::num_or(config.at("newton"), "tol", newton.tol);
  }
  manifest.set_tolerances(Json{{"newton_tol", newton.tol}, {"eps", prob.field.eps}});

  const ParabolicSolution sol = solve_ivbp(prob, grid, newton);
  emit_solution(sol, opts, manifest);

  Json summary;
  summary["slices"] = sol.times.size();
  summary["eps"] = sol.eps;
  summary["final_time"] = sol.times.back();
  double sup_grad = 0.0;
  for (double g : sol.grad.back()) sup_grad = std::max(sup_grad, std::abs(g));
  summary["final_sup_grad"] = sup_grad;
  manifest.emit(opts.out_dir, "solve.json", summary.dump(2) + "\n");
  return kOk;
}

int run_verify(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const std::string mode = cfg::str_or(config, "mode", "norms");

  if (mode == "norms") {
    const Json& solve_cfg = config.at("solve");
    const SpaceTimeGrid grid = cfg::spacetime(solve_cfg, "solve");
    const ParabolicProblem prob = problem_from_config(solve_cfg, grid);
    const ParabolicSolution sol = solve_ivbp(prob, grid);
    CylinderRegion region;
    const Json& r = config.at("region");
    region.radius = cfg::need_num(r, "radius", "region");
    region.center = cfg::num_or(r, "center", 0.0);
    region.t_lo = cfg::need_num(r, "t_lo", "region");
    region.t_hi = cfg::need_num(r, "t_hi", "region");
    std::vector<double> q_grid;
    for (const auto& v : config.at("q_grid")) q_grid.push_back(v.get<double>());
    const NormReport rep = norms(sol, region, q_grid, prob.field.p);

    CsvTable table({"q", "lq_norm", "ess_sup_slice"});
    for (std::size_t i = 0; i < q_grid.size(); ++i)
      table.add_row({format_double(q_grid[i]), format_double(rep.lq[i]),
                     format_double(rep.ess_sup_slice[i])});
    manifest.emit(opts.out_dir, "norms.csv", table.str());

    Json summary;
    summary["sup_norm"] = rep.sup_norm;
    summary["q_grid"] = rep.q_grid;
    summary["lq"] = rep.lq;
    summary["ess_sup_slice"] = rep.ess_sup_slice;
    if (config.contains("weak_residual_family")) {
      const int k = config.at("weak_residual_family").get<int>();
      const auto family = make_spacetime_family(
          k, grid, static_cast<std::uint64_t>(cfg::int_or(config, "seed", 7)));
      summary["weak_residual"] = weak_residual(sol, prob, family);
    }
    manifest.emit(opts.out_dir, "norms.json", summary.dump(2) + "\n");
    return kOk;
  }

  if (mode == "threshold") {
    ThresholdScanConfig scan_cfg;
    scan_cfg.p = cfg::need_num(config, "p", "verify");
    if (config.contains("alphas")) {
      scan_cfg.alphas.clear();
      for (const auto& v : config.at("alphas")) scan_cfg.alphas.push_back(v.get<double>());
    }
    scan_cfg.levels = cfg::int_or(config, "levels", scan_cfg.levels);
    scan_cfg.base_cells = cfg::int_or(config, "base_cells", scan_cfg.base_cells);
    scan_cfg.dt_base = cfg::num_or(config, "dt_base", scan_cfg.dt_base);
    scan_cfg.dim = cfg::int_or(config, "dim", scan_cfg.dim);
    scan_cfg.t_end = cfg::num_or(config, "t_end", scan_cfg.t_end);
    scan_cfg.eps = cfg::num_or(config, "eps", scan_cfg.eps);
    scan_cfg.stability_tol = cfg::num_or(config, "stability_tol", scan_cfg.stability_tol);
    if (config.contains("q_grid")) {
      scan_cfg.q_grid.clear();
      for (const auto& v : config.at("q_grid")) scan_cfg.q_grid.push_back(v.get<double>());
    }
    if (config.contains("region")) {
      const Json& r = config.at("region");
      scan_cfg.region.radius = cfg::num_or(r, "radius", scan_cfg.region.radius);
      scan_cfg.region.t_lo = cfg::num_or(r, "t_lo", scan_cfg.region.t_lo);
      scan_cfg.region.t_hi = cfg::num_or(r, "t_hi", scan_cfg.region.t_hi);
    }
    scan_cfg.jobs = opts.jobs;
    const ThresholdScan scan = threshold_scan(scan_cfg);

    std::vector<std::string> header = {"alpha", "level", "sup_grad"};
    for (double q : scan_cfg.q_grid) header.push_back("l" + format_double(q));
    header.push_back("status");
    CsvTable table(header);
    for (const auto& row : scan.rows) {
      std::vector<std::string> cells = {format_double(row.alpha), std::to_string(row.level),
                                        format_double(row.sup_grad)};
      for (std::size_t iq = 0; iq < scan_cfg.q_grid.size(); ++iq)
        cells.push_back(iq < row.lq.size() ? format_double(row.lq[iq]) : "");
      cells.push_back(row.solved ? "ok" : row.error);
      table.add_row(std::move(cells));
    }
    manifest.emit(opts.out_dir, "threshold.csv", table.str());

    Json summary;
    for (std::size_t ia = 0; ia < scan_cfg.alphas.size(); ++ia)
      summary["classifications"][format_double(scan_cfg.alphas[ia])] =
          scan.classifications[ia];
    manifest.emit(opts.out_dir, "threshold.json", summary.dump(2) + "\n");
    return kOk;
  }

  if (mode == "conditions") {
    const StructureCoefficients coeffs = cfg::coefficients(config.at("coefficients"));
    const QuadratureSpec spec = quad_spec(config, opts);
    const auto sample = cfg::point_list(
        config.contains("sample") ? config.at("sample") : Json(), coeffs.f.dim(), "sample");
    const auto radii = cfg::radii_list(config.at("radii"), "radii");
    const double nu_main = cfg::num_or(config, "nu_main", 0.1);
    const double nu_apost = cfg::num_or(config, "nu_aposteriori", 0.1);
    const ConditionReport rep =
        wolff_condition_report(coeffs, sample, radii, nu_main, nu_apost, spec, opts.jobs);

    CsvTable table({"curve", "R", "value"});
    for (const auto& curve : rep.curves)
      for (std::size_t ir = 0; ir < rep.radii.size(); ++ir)
        table.add_row({curve.name, format_double(rep.radii[ir]),
                       format_double(curve.values[ir])});
    manifest.emit(opts.out_dir, "conditions.csv", table.str());

    Json summary;
    summary["nu_main"] = rep.nu_main;
    summary["nu_aposteriori"] = rep.nu_aposteriori;
    summary["main_gradient_at_min_r"] = rep.main_gradient_at_min_r;
    summary["main_composite_at_min_r"] = rep.main_composite_at_min_r;
    summary["aposteriori_at_min_r"] = rep.aposteriori_at_min_r;
    summary["main_condition_met"] = rep.main_condition_met;
    summary["aposteriori_condition_met"] = rep.aposteriori_condition_met;
    manifest.emit(opts.out_dir, "conditions.json", summary.dump(2) + "\n");
    return kOk;
  }

  throw ConfigError("config: verify mode must be norms, threshold, or conditions");
}

int run_scale(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  const double lambda = cfg::need_num(config, "lambda", "scale");
  const StructureCoefficients coeffs = cfg::coefficients(config.at("coefficients"));
  const StructureCoefficients scaled = scale_coefficients(coeffs, lambda);
  const StructureCoefficients back = unscale_coefficients(scaled, lambda);

  auto mass_triplet = [](const StructureCoefficients& c) {
    return Json{{"f", c.f.total_mass()},   {"g", c.g.total_mass()},
                {"f1", c.f1.total_mass()}, {"g1", c.g1.total_mass()},
                {"f2", c.f2.total_mass()}, {"g2", c.g2.total_mass()}};
  };
  Json summary;
  summary["lambda"] = lambda;
  summary["p"] = coeffs.p;
  summary["factors"] = Json{{"f", std::pow(lambda, 1.0 - coeffs.p)},
                            {"f1", std::pow(lambda, 2.0 - coeffs.p)},
                            {"f2", std::pow(lambda, 1.0 - coeffs.p)},
                            {"g", 1.0},
                            {"g1", 1.0},
                            {"g2", 1.0}};
  summary["mass_original"] = mass_triplet(coeffs);
  summary["mass_scaled"] = mass_triplet(scaled);
  summary["mass_roundtrip"] = mass_triplet(back);

  double roundtrip_dev = 0.0;
  auto dev = [&](const Density& a, const Density& b) {
    const double ma = a.total_mass();
    const double mb = b.total_mass();
    roundtrip_dev = std::max(roundtrip_dev, std::abs(ma - mb) / std::max(1.0, std::abs(ma)));
  };
  dev(coeffs.f, back.f);
  dev(coeffs.f1, back.f1);
  dev(coeffs.f2, back.f2);
  dev(coeffs.g, back.g);
  summary["roundtrip_deviation"] = roundtrip_dev;
  manifest.emit(opts.out_dir, "scale.json", summary.dump(2) + "\n");
  return roundtrip_dev <= 1e-12 ? kOk : kVerificationError;
}

int run_counterexample(const Json& config, const CommonOpts& opts, RunManifest& manifest) {
  CounterexampleSpec spec;
  spec.dim = cfg::int_or(config, "dim", spec.dim);
  spec.p = cfg::num_or(config, "p", spec.p);
  spec.rho0 = cfg::num_or(config, "rho0", spec.rho0);
  spec.q0 = cfg::num_or(config, "q0", spec.q0);
  spec.n_terms = cfg::int_or(config, "n_terms", spec.n_terms);
  spec.box_side = cfg::num_or(config, "box_side", spec.box_side);
  const double tol = cfg::num_or(config, "tolerance", 1e-6);
  const QuadratureSpec quad = quad_spec(config, opts);
  manifest.set_tolerances(tolerances_json(quad));

  const PackedDensity packed = build(spec);
  const AppendixConstants consts = AppendixConstants::make(spec.dim, spec.p);
  const LocalLowerReport lower = verify_local_lower(spec, packed, 1e-8, quad);
  const GlobalUpperReport upper =
      verify_global_upper(spec, packed,
                          cfg::point_list(config.contains("extra_samples")
                                              ? config.at("extra_samples")
                                              : Json(),
                                          spec.dim, "extra_samples"),
                          tol, quad);
  const bool disjoint = verify_disjointness(spec, packed);

  CsvTable table({"x", "R", "value", "status"});
  for (const auto& x : upper.sample) {
    const WolffResult res =
        wolff_eval(packed.density, WolffQuery{1.0, spec.p, x, WolffQuery::infinite_radius()},
                   quad);
    table.add_row({point_str(x), "inf", format_double(res.value), status_str(res.status)});
  }
  manifest.emit(opts.out_dir, "samples.csv", table.str());

  Json summary;
  summary["constants"] = Json{{"a_p", consts.a_p}, {"b_p", consts.b_p}, {"c_p", consts.c_p}};
  summary["spacing"] = packed.spacing;
  summary["n_terms"] = spec.n_terms;
  summary["local_lower"] =
      Json{{"a_p", lower.a_p}, {"max_rel_err", lower.max_rel_err}, {"ok", lower.ok}};
  summary["global_upper"] = Json{{"computed_max", upper.computed_max},
                                 {"analytic_tail", upper.analytic_tail},
                                 {"bound", upper.bound},
                                 {"margin", upper.margin},
                                 {"worst_near_excess", upper.worst_near_excess},
                                 {"worst_far_excess", upper.worst_far_excess},
                                 {"worst_subadditivity", upper.worst_subadditivity},
                                 {"ok", upper.ok}};
  summary["disjointness"] = disjoint;
  const bool pass = lower.ok && upper.ok && disjoint;
  summary["pass"] = pass;
  manifest.emit(opts.out_dir, "counterexample.json", summary.dump(2) + "\n");
  return pass ? kOk : kVerificationError;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"wolffkit: Wolff potentials, Kato-class diagnostics, and gradient "
               "regularity checks for degenerate parabolic equations"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  const std::vector<std::string> names = {"wolff",  "kato",  "pk",    "classes",
                                          "elliptic", "hardy", "solve", "verify",
                                          "scale",  "counterexample"};
  std::map<std::string, CommonOpts> opt_map;
  for (const auto& name : names) {
    CLI::App* sub = app.add_subcommand(name);
    CommonOpts& opts = opt_map[name];
    sub->add_option("--config", opts.config_path, "JSON config file")->required();
    sub->add_option("--out", opts.out_dir, "output directory");
    sub->add_option("--jobs", opts.jobs, "parallel jobs for scans");
    sub->add_option("--tol", opts.tol, "override quadrature relative tolerance");
  }

  try {
    // CLI11 wants mutable argv in reverse order.
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& err) {
    std::ostringstream oss;
    const int code = app.exit(err, oss, oss);
    std::cout << oss.str();
    return code == 0 ? 0 : kConfigError;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  const CommonOpts& opts = opt_map[name];

  const auto started = std::chrono::steady_clock::now();
  try {
    const Json config = load_config(opts.config_path);
    RunManifest manifest(name, config);
    int status = kOk;
    if (name == "wolff")
      status = run_wolff(config, opts, manifest);
    else if (name == "kato")
      status = run_kato(config, opts, manifest);
    else if (name == "pk")
      status = run_pk(config, opts, manifest);
    else if (name == "classes")
      status = run_classes(config, opts, manifest);
    else if (name == "elliptic")
      status = run_elliptic(config, opts, manifest);
    else if (name == "hardy")
      status = run_hardy(config, opts, manifest);
    else if (name == "solve")
      status = run_solve(config, opts, manifest);
    else if (name == "verify")
      status = run_verify(config, opts, manifest);
    else if (name == "scale")
      status = run_scale(config, opts, manifest);
    else if (name == "counterexample")
      status = run_counterexample(config, opts, manifest);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    manifest.finalize(opts.out_dir, wall);
    return status;
  } catch (const ConfigError& err) {
    std::cout << Json{{"error", "config"}, {"detail", err.what()}}.dump() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& err) {
    std::cout << Json{{"error", "config"}, {"detail", err.what()}}.dump() << "\n";
    return kConfigError;
  } catch (const std::exception& err) {
    std::cout << Json{{"error", "numerical"}, {"detail", err.what()}}.dump() << "\n";
    return kNumericalError;
  }
}

}  // namespace wolff
