#include "wolff/counterexample.hpp"

#include <algorithm>
#include <cmath>

#include "wolff/errors.hpp"
#include "wolff/geometry.hpp"

namespace wolff {

std::vector<double> CounterexampleSpec::radii() const {
  std::vector<double> out(n_terms);
  for (int n = 1; n <= n_terms; ++n) out[n - 1] = rho0 * std::pow(q0, n);
  return out;
}

double CounterexampleSpec::radius_sum_full() const {
  // sum_{n>=1} (rho0 q0^n)^e with e = (N-p)/(N-1): geometric, closed form.
  const double e = packing_exponent();
  const double qe = std::pow(q0, e);
  return std::pow(rho0, e) * qe / (1.0 - qe);
}

double CounterexampleSpec::radius_sum_tail(int after) const {
  const double e = packing_exponent();
  const double qe = std::pow(q0, e);
  return std::pow(rho0, e) * std::pow(qe, after + 1) / (1.0 - qe);
}

void CounterexampleSpec::validate() const {
  if (dim < 3) throw ConfigError("counterexample: dim must be >= 3 so that p in [2, N)");
  if (!(p >= 2.0) || !(p < dim))
    throw ConfigError("counterexample: p must lie in [2, N); b_p and c_p diverge as p -> N");
  if (!(rho0 > 0.0) || !(rho0 < 1.0) || !(q0 > 0.0) || !(q0 < 1.0))
    throw ConfigError("counterexample: need rho0, q0 in (0, 1)");
  if (n_terms < 1) throw ConfigError("counterexample: n_terms must be >= 1");
  if (!(box_side > 0.0)) throw ConfigError("counterexample: box_side must be positive");
  const std::vector<double> rho = radii();
  for (std::size_t i = 0; i + 1 < rho.size(); ++i)
    if (!(rho[i] > rho[i + 1])) throw ConfigError("counterexample: radii must decrease");
  if (!(rho.front() < 1.0)) throw ConfigError("counterexample: radii must lie in (0, 1)");
  if (!std::isfinite(radius_sum_full()))
    throw ConfigError("counterexample: radius series diverges");
}

AppendixConstants AppendixConstants::make(int dim, double p) {
  if (!(p >= 2.0) || !(p < dim))
    throw ConfigError("appendix constants: p must lie in [2, N)");
  AppendixConstants c;
  const double omega_pow = std::pow(geom::unit_ball_volume(dim), 1.0 / (p - 1.0));
  c.a_p = (p - 1.0) / p * omega_pow;
  c.c_p = (p - 1.0) / (dim - p) * omega_pow;
  c.b_p = c.a_p + c.c_p;  // exact identity by construction
  return c;
}

PackedDensity build(const CounterexampleSpec& spec) {
  spec.validate();
  const std::vector<double> rho = spec.radii();
  // Uniform lattice spacing from the largest radius dominates every pairwise
  // constraint 4 rho_{min(n,m)}^e because the radii decrease.
  const double spacing = 4.0 * std::pow(rho.front(), spec.packing_exponent());
  const int per_axis = static_cast<int>(std::floor(spec.box_side / spacing)) + 1;
  std::size_t capacity = 1;
  for (int k = 0; k < spec.dim; ++k) capacity *= static_cast<std::size_t>(per_axis);
  if (capacity < static_cast<std::size_t>(spec.n_terms))
    throw ConfigError("counterexample: packing infeasible; at most " +
                      std::to_string(capacity) + " centers fit in the box at spacing " +
                      std::to_string(spacing));

  PackedDensity packed;
  packed.spacing = spacing;
  packed.radii = rho;
  BumpSum bumps;
  // Deterministic enumeration order: lexicographic lattice index.
  for (int n = 0; n < spec.n_terms; ++n) {
    Point c(spec.dim, 0.0);
    std::size_t rest = static_cast<std::size_t>(n);
    for (int k = spec.dim - 1; k >= 0; --k) {
      c[k] = spacing * static_cast<double>(rest % per_axis);
      rest /= per_axis;
    }
    packed.centers.push_back(c);
    bumps.bumps.push_back(Bump{c, rho[n], std::pow(rho[n], -spec.p)});
  }
  // Verify the pairwise packing constraint on the actual numbers.
  const double e = spec.packing_exponent();
  for (std::size_t i = 0; i < packed.centers.size(); ++i)
    for (std::size_t j = i + 1; j < packed.centers.size(); ++j) {
      const double need = 4.0 * std::pow(rho[std::min(i, j)], e);
      if (dist(packed.centers[i], packed.centers[j]) < need - 1e-12)
        throw NumericalError("counterexample: packing constraint violated internally");
    }
  packed.density = Density(spec.dim, std::move(bumps));
  packed.density.set_label("appendix_counterexample");
  return packed;
}

LocalLowerReport verify_local_lower(const CounterexampleSpec& spec, const PackedDensity& packed,
                                    double rel_tol, const QuadratureSpec& quad) {
  LocalLowerReport report;
  report.a_p = AppendixConstants::make(spec.dim, spec.p).a_p;
  for (std::size_t n = 0; n < packed.centers.size(); ++n) {
    Density single(spec.dim,
                   BumpSum{{Bump{packed.centers[n], packed.radii[n],
                                 std::pow(packed.radii[n], -spec.p)}}});
    const WolffResult res =
        wolff_eval(single, WolffQuery{1.0, spec.p, packed.centers[n], packed.radii[n]}, quad);
    report.values.push_back(res.value);
    if (res.finite())
      report.max_rel_err =
          std::max(report.max_rel_err, std::abs(res.value - report.a_p) / report.a_p);
    else
      report.max_rel_err = std::numeric_limits<double>::infinity();
  }
  report.ok = report.max_rel_err <= rel_tol;
  return report;
}

bool verify_disjointness(const CounterexampleSpec& spec, const PackedDensity& packed) {
  const double e = spec.packing_exponent();
  for (std::size_t i = 0; i < packed.centers.size(); ++i)
    for (std::size_t j = i + 1; j < packed.centers.size(); ++j) {
      const double reach_i = packed.radii[i] + std::pow(packed.radii[i], e);
      const double reach_j = packed.radii[j] + std::pow(packed.radii[j], e);
      if (reach_i + reach_j > dist(packed.centers[i], packed.centers[j]))
        return false;  // some x could sit within reach of two bumps
    }
  return true;
}

GlobalUpperReport verify_global_upper(const CounterexampleSpec& spec,
                                      const PackedDensity& packed,
                                      const std::vector<Point>& extra_sample, double tol,
                                      const QuadratureSpec& quad) {
  const AppendixConstants consts = AppendixConstants::make(spec.dim, spec.p);
  const double e = spec.packing_exponent();
  GlobalUpperReport report;

  // Sample: centers, pairwise midpoints, far-field points, caller extras.
  std::vector<Point> sample = packed.centers;
  for (std::size_t i = 0; i < packed.centers.size(); ++i)
    for (std::size_t j = i + 1; j < packed.centers.size(); ++j) {
      Point mid(spec.dim);
      for (int k = 0; k < spec.dim; ++k)
        mid[k] = 0.5 * (packed.centers[i][k] + packed.centers[j][k]);
      sample.push_back(std::move(mid));
    }
  {
    Point far(spec.dim, spec.box_side + 1.0);
    sample.push_back(far);
    Point near_edge(spec.dim, 0.0);
    near_edge[0] = -0.5;
    sample.push_back(near_edge);
  }
  sample.insert(sample.end(), extra_sample.begin(), extra_sample.end());
  report.sample = sample;

  // The analytic tail for the omitted terms n > n_terms is valid at sample
  // points farther than rho_n + rho_n^e from every omitted lattice site;
  // sites are spacing-separated so midpoints and centers qualify. Spot-check
  // the margin against the largest omitted radius.
  const double rho_next = spec.rho0 * std::pow(spec.q0, spec.n_terms + 1);
  const double omitted_reach = rho_next + std::pow(rho_next, e);
  if (omitted_reach > 0.25 * packed.spacing)
    throw NumericalError("counterexample: omitted-term reach too large for the tail bound");
  report.analytic_tail = consts.c_p * spec.radius_sum_tail(spec.n_terms);
  report.bound = consts.b_p + consts.c_p * spec.radius_sum_full();

  const double inf = WolffQuery::infinite_radius();
  for (const auto& x : sample) {
    const WolffResult res = wolff_eval(packed.density, WolffQuery{1.0, spec.p, x, inf}, quad);
    if (!res.finite())
      throw NumericalError("counterexample: unexpected divergent potential in upper check");
    if (res.value > report.computed_max) {
      report.computed_max = res.value;
      report.argmax = x;
    }

    // Per-bump split: near case <= b_p, far case <= c_p rho_n^e, and the
    // p >= 2 subadditivity W^f <= sum_n W^{f_n}.
    double split_sum = 0.0;
    for (std::size_t n = 0; n < packed.centers.size(); ++n) {
      Density single(spec.dim,
                     BumpSum{{Bump{packed.centers[n], packed.radii[n],
                                   std::pow(packed.radii[n], -spec.p)}}});
      const double wn =
          wolff_eval(single, WolffQuery{1.0, spec.p, x, inf}, quad).value;
      split_sum += wn;
      const double reach = packed.radii[n] + std::pow(packed.radii[n], e);
      if (dist(x, packed.centers[n]) < reach) {
        const double excess = wn - consts.b_p;
        if (excess > report.worst_near_excess) {
          report.worst_near_excess = excess;
          if (excess > tol)
            report.offending = "near case at bump " + std::to_string(n);
        }
      } else {
        const double excess = wn - consts.c_p * std::pow(packed.radii[n], e);
        if (excess > report.worst_far_excess) {
          report.worst_far_excess = excess;
          if (excess > tol)
            report.offending = "far case at bump " + std::to_string(n);
        }
      }
    }
    const double sub = res.value - split_sum;
    if (sub > report.worst_subadditivity) {
      report.worst_subadditivity = sub;
      if (sub > tol) report.offending = "subadditivity";
    }
  }
  report.margin = report.bound - (report.computed_max + report.analytic_tail);
  report.ok = report.margin >= 0.0 && report.worst_near_excess <= tol &&
              report.worst_far_excess <= tol && report.worst_subadditivity <= tol;
  return report;
}

}  // namespace wolff
