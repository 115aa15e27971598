#include "wolff/wolff.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "wolff/errors.hpp"
#include "wolff/parallel.hpp"
#include "wolff/quadrature.hpp"

namespace wolff {

namespace {

void validate_query(const Density& f, const WolffQuery& q, const QuadratureSpec& spec) {
  if (!(q.p > 1.0)) throw std::invalid_argument("wolff_eval: p must exceed 1");
  if (!(q.beta > 0.0)) throw std::invalid_argument("wolff_eval: beta must be positive");
  if (!(f.dim() - q.beta * q.p > 0.0))
    throw std::invalid_argument("wolff_eval: requires N - beta*p > 0");
  if (!(q.radius > 0.0)) throw std::invalid_argument("wolff_eval: radius must be positive");
  if (static_cast<int>(q.center.size()) != f.dim())
    throw std::invalid_argument("wolff_eval: center dimension mismatch");
  if (spec.radial_nodes < 2 || spec.radial_nodes > 64)
    throw std::invalid_argument("wolff_eval: radial_nodes out of range");
  if (spec.dyadic_depth < 8) throw std::invalid_argument("wolff_eval: dyadic_depth < 8");
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
    throw std::invalid_argument("wolff_eval: tolerances must be positive");
}

}  // namespace

WolffResult wolff_eval(const Density& f, const WolffQuery& q, const QuadratureSpec& spec) {
  validate_query(f, q, spec);
  WolffResult out;
  const double kpow = 1.0 / (q.p - 1.0);
  const double aexp = q.beta * q.p - f.dim();  // < 0
  const double far = f.far_radius(q.center);

  try {
    double tail = 0.0;
    double upper = q.radius;
    if (q.radius > far) {
      const double mass = f.total_mass();
      if (mass <= 0.0) return out;
      // Outside the support the inner integral is constant, so the tail is a
      // pure power integral in closed form.
      const double e = -aexp * kpow;
      const double at_R = std::isfinite(q.radius) ? std::pow(q.radius, -e) : 0.0;
      tail = std::pow(mass, kpow) * (std::pow(far, -e) - at_R) / e;
      upper = far;
    }

    auto shell_integrand = [&](double t) {
      const double r = std::exp(t);
      const double m = f.ball_mass(q.center, r);
      if (m <= 0.0) return 0.0;
      return std::pow(std::pow(r, aexp) * m, kpow);
    };

    // Kinks of the mass function (support edges crossing the ball boundary)
    // would wreck Gauss accuracy mid-shell; panels split there.
    std::vector<double> breaks;
    for (double b : f.radial_breakpoints(q.center))
      if (b > 0.0 && b < upper) breaks.push_back(std::log(b));
    auto shell_value = [&](double t_lo, double t_hi) {
      double acc = 0.0;
      double lo = t_lo;
      for (double b : breaks) {
        if (b <= lo || b >= t_hi) continue;
        acc += quad::integrate(shell_integrand, lo, b, spec.radial_nodes);
        lo = b;
      }
      return acc + quad::integrate(shell_integrand, lo, t_hi, spec.radial_nodes);
    };

    // Shell contributions may grow geometrically through scales where the
    // mass plateaus (a bump far smaller than the query radius), so growth is
    // never taken as divergence early; only the behavior at the depth cap
    // decides.
    const int max_shells = std::max(spec.dyadic_depth, 400);
    const double log_upper = std::log(upper);
    constexpr double kLn2 = 0.6931471805599453;

    double sum = 0.0;
    double prev = -1.0;
    double ratio = 0.0;
    int small_count = 0;
    std::deque<std::pair<int, double>> window;  // (shell index, ratio)
    bool finished = false;

    auto infinite = [&](int shells, double rate, const std::string& note) {
      out.value = std::numeric_limits<double>::infinity();
      out.status = WolffStatus::infinite;
      out.divergence_rate = rate;
      out.shells_used = shells;
      out.note = note;
      return out;
    };

    int k = 0;
    for (; k < max_shells; ++k) {
      const double t_hi = log_upper - k * kLn2;
      const double c = shell_value(t_hi - kLn2, t_hi);
      sum += c;
      if (!std::isfinite(sum))
        return infinite(k + 1, std::log2(std::max(ratio, 1.0)),
                        "partial sums overflow; integrand not integrable at r = 0");
      if (prev > 0.0 && c > 0.0) {
        ratio = c / prev;
        window.emplace_back(k, ratio);
        if (window.size() > 16) window.pop_front();
      }
      const double tol = 0.25 * std::max(spec.abs_tol, spec.rel_tol * (sum + tail));
      if (c <= tol) {
        if (f.ball_mass(q.center, std::exp(t_hi - kLn2)) <= 0.0) {
          finished = true;  // no support below this shell
          ++k;
          break;
        }
        if (++small_count >= 2 && ratio < 0.9) {
          const double rr = std::clamp(ratio, 0.0, 0.9);
          sum += c * rr / (1.0 - rr);
          finished = true;
          ++k;
          break;
        }
      } else {
        small_count = 0;
      }
      prev = c;
      if (std::exp(t_hi - kLn2) < 1e-290) break;  // underflow floor
    }

    out.shells_used = k;
    if (!finished) {
      // Ran out of shells: decide between slow convergence and divergence.
      double mean_ratio = 0.0;
      double gamma = 0.0;  // local power fit c_k ~ k^{-gamma}
      for (const auto& [idx, rr] : window) {
        mean_ratio += rr;
        gamma += idx * (1.0 - rr);
      }
      if (!window.empty()) {
        mean_ratio /= window.size();
        gamma /= window.size();
      }
      if (mean_ratio >= 1.0 - 1e-12)
        return infinite(k, std::log2(std::max(mean_ratio, 1.0)),
                        "shell contributions do not decay toward r = 0");
      if (gamma > 1.05 && prev > 0.0) {
        sum += prev * (k / (gamma - 1.0));
        out.tail_estimated = true;
        out.note = "subgeometric decay; tail extrapolated with exponent " + std::to_string(gamma);
      } else {
        return infinite(k, 0.0,
                        "shell contributions not summable (fitted exponent " +
                            std::to_string(gamma) + ")");
      }
    }
    out.value = sum + tail;
    return out;
  } catch (const NonIntegrableError& err) {
    out.value = 0.0;
    out.status = WolffStatus::non_integrable;
    out.note = err.what();
    return out;
  }
}

KatoScan kato_limit_scan(const Density& f, double beta, double p,
                         const std::vector<Point>& domain_sample,
                         const std::vector<double>& radii, double threshold,
                         const QuadratureSpec& spec, int jobs) {
  if (radii.size() < 2) throw std::invalid_argument("kato_limit_scan: need at least 2 radii");
  for (std::size_t i = 0; i + 1 < radii.size(); ++i)
    if (!(radii[i] > radii[i + 1]) || !(radii[i + 1] > 0.0))
      throw std::invalid_argument("kato_limit_scan: radii must decrease strictly toward 0");

  KatoScan scan;
  scan.beta = beta;
  scan.p = p;
  scan.threshold = threshold;
  scan.radii = radii;

  // The suprema in all worked examples are attained at singular points, so
  // always include the origin and every bump center.
  scan.sample = domain_sample;
  auto add_point = [&](const Point& pt) {
    for (const auto& existing : scan.sample)
      if (dist(existing, pt) < 1e-14) return;
    scan.sample.push_back(pt);
  };
  add_point(origin(f.dim()));
  if (f.kind() == Density::Kind::bump_sum)
    for (const auto& b : f.bumps().bumps) add_point(b.center);

  const std::size_t nx = scan.sample.size();
  const std::size_t nr = radii.size();
  scan.rows.resize(nx * nr);
  parallel_for(nx, jobs, [&](std::size_t ix) {
    for (std::size_t ir = 0; ir < nr; ++ir) {
      WolffQuery q{beta, p, scan.sample[ix], radii[ir]};
      const WolffResult res = wolff_eval(f, q, spec);
      KatoRow row;
      row.x = scan.sample[ix];
      row.radius = radii[ir];
      row.value = res.value;
      row.status = res.status;
      scan.rows[ir * nx + ix] = std::move(row);
    }
  });

  scan.sup_curve.assign(nr, 0.0);
  for (std::size_t ir = 0; ir < nr; ++ir) {
    double sup = 0.0;
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const KatoRow& row = scan.rows[ir * nx + ix];
      if (row.status != WolffStatus::converged) scan.any_divergent = true;
      sup = std::max(sup, row.value);
    }
    scan.sup_curve[ir] = sup;
  }
  const bool decayed = !scan.any_divergent && scan.sup_curve.back() < threshold;
  scan.classification = decayed ? "consistent" : "inconsistent";
  return scan;
}

EmbeddingCheck class_embedding_check(const Density& f, double alpha, double beta, double p,
                                     double q, double kappa, const Point& x, double R,
                                     const QuadratureSpec& spec) {
  if (!(p > 1.0) || !(q > 1.0) || !(alpha > 0.0) || !(beta > 0.0) || !(kappa > 0.0))
    throw std::invalid_argument("class_embedding_check: need p,q > 1 and alpha,beta,kappa > 0");
  const double bpaq = beta * p / (alpha * q);
  EmbeddingCheck out;
  const double tol = 1e-12 * std::max(1.0, kappa);
  if (kappa > std::max(bpaq, 1.0) + tol) {
    out.branch = 1;
  } else if (std::abs(kappa - bpaq) <= tol) {
    if (kappa < 1.0 - tol)
      throw ConfigError("class_embedding_check: equality branch needs kappa >= 1");
    if (kappa > (p - 1.0) / (q - 1.0) + tol)
      throw ConfigError(
          "class_embedding_check: equality branch needs kappa <= (p-1)/(q-1)");
    out.branch = 2;
  } else {
    throw ConfigError(
        "class_embedding_check: hypothesis violated; neither kappa > max(beta p/(alpha q), 1) "
        "nor kappa = beta p/(alpha q) in [1, (p-1)/(q-1)]");
  }

  const WolffResult lhs = wolff_eval(f.power(1.0 / kappa), WolffQuery{alpha, q, x, R}, spec);
  const WolffResult rf = wolff_eval(f, WolffQuery{beta, p, x, 2.0 * R}, spec);
  out.lhs_status = lhs.status;
  out.rhs_status = rf.status;
  out.lhs = lhs.value;
  const double r_expo = (kappa * alpha * q - beta * p) / (kappa * (q - 1.0));
  const double w_expo = (p - 1.0) / (kappa * (q - 1.0));
  out.rhs = std::pow(R, r_expo) * std::pow(rf.value, w_expo);
  if (out.rhs > 0.0)
    out.ratio = out.lhs / out.rhs;
  else
    out.ratio = out.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return out;
}

EmbeddingExponents embedding_exponents(const Rational& alpha, const Rational& beta,
                                       const Rational& p, const Rational& q,
                                       const Rational& kappa, const Rational& s, int dim) {
  EmbeddingExponents out;
  const Rational one(1);
  // lhs: W_{alpha,q} of |y|^{-s/kappa} scales like R^{(alpha q - s/kappa)/(q-1)}.
  out.lhs = (alpha * q - s / kappa) / (q - one);
  // rhs: R^{(kappa alpha q - beta p)/(kappa(q-1))} times
  // (W_{beta,p} of |y|^{-s} at 2R)^{(p-1)/(kappa(q-1))}.
  const Rational wolff_expo = (beta * p - s) / (p - one);
  out.rhs = (kappa * alpha * q - beta * p) / (kappa * (q - one)) +
            wolff_expo * ((p - one) / (kappa * (q - one)));
  out.equal = out.lhs == out.rhs;
  out.lhs_converges = s / kappa < alpha * q;
  out.rhs_converges = s < beta * p;
  out.mass_finite = s < Rational(dim);
  return out;
}

}  // namespace wolff
