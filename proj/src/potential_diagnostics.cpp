#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "wolff/errors.hpp"
#include "wolff/geometry.hpp"
#include "wolff/quadrature.hpp"
#include "wolff/radial_integrals.hpp"
#include "wolff/wolff.hpp"

namespace wolff {

double integral_over_offcenter_ball(const std::function<double(double)>& phi, int dim,
                                    double d, double rho) {
  const double area = geom::unit_sphere_area(dim);
  auto weighted = [&](double s) { return phi(s) * std::pow(s, dim - 1); };
  if (d <= 1e-14 * rho) return area * quad::integrate_to_zero(weighted, rho);
  double sum = 0.0;
  if (rho > d) sum += area * quad::integrate_to_zero(weighted, rho - d);
  const double lo = std::abs(d - rho);
  const double hi = d + rho;
  auto band = [&](double s) {
    const double cos_t = (d * d + s * s - rho * rho) / (2.0 * d * s);
    return weighted(s) * geom::cap_fraction(dim, cos_t);
  };
  if (lo < 1e-13 * hi)
    sum += area * quad::integrate_to_zero(band, hi);
  else
    sum += area * quad::integrate_graded(band, lo, hi, 32);
  return sum;
}

namespace {

// Normalized spherical average of phi(|c + s omega|) over omega, |c| = d.
double sphere_average(const std::function<double(double)>& phi, int dim, double d, double s) {
  if (s <= 0.0) return phi(d);
  if (d <= 0.0) return phi(s);
  const double knorm = std::tgamma(0.5 * dim) /
                       (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (dim - 1)));
  auto slice = [&](double alpha) {
    const double arg2 = d * d + s * s - 2.0 * d * s * std::cos(alpha);
    const double arg = std::sqrt(std::max(arg2, 0.0));
    return phi(arg) * std::pow(std::sin(alpha), dim - 2);
  };
  return knorm * quad::integrate_graded(slice, 0.0, std::numbers::pi, 16, 12);
}

}  // namespace

double integral_over_offcenter_ball_weighted(const std::function<double(double)>& phi,
                                             const std::function<double(double)>& weight,
                                             int dim, double d, double rho) {
  const double area = geom::unit_sphere_area(dim);
  auto outer = [&](double s) {
    return weight(s) * std::pow(s, dim - 1) * sphere_average(phi, dim, d, s);
  };
  if (d > 0.0 && d < rho) {
    // The sphere about the ball center passes through the origin at s = d.
    return area * (quad::integrate_graded(outer, 0.0, d, 16, 12) +
                   quad::integrate_graded(outer, d, rho, 16, 12));
  }
  return area * quad::integrate_graded(outer, 0.0, rho, 16, 12);
}

// --- pk_form_bound_estimate ----------------------------------------------

namespace {

struct RadialTheta {
  std::string label;
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double support = 1.0;
};

// Quartic bump on [0, 1).
double eta(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - a * a;
  return w * w;
}

double eta_slope(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - a * a;
  return -4.0 * t * w;
}

struct PkIntegrals {
  double fq = 0.0, grad = 0.0, l2 = 0.0;
};

PkIntegrals radial_member_integrals(const Density& F, int dim, const RadialTheta& theta) {
  PkIntegrals out;
  const double area = geom::unit_sphere_area(dim);
  const double S = theta.support;
  out.grad = area * quad::integrate_to_zero(
                        [&](double r) {
                          const double d = theta.slope(r);
                          return d * d * std::pow(r, dim - 1);
                        },
                        S);
  out.l2 = area * quad::integrate_to_zero(
                      [&](double r) {
                        const double v = theta.value(r);
                        return v * v * std::pow(r, dim - 1);
                      },
                      S);
  switch (F.kind()) {
    case Density::Kind::radial_profile: {
      const double upper = std::min(S, F.support_radius());
      out.fq = area * quad::integrate_to_zero(
                          [&](double r) {
                            const double v = theta.value(r);
                            return F.radial_value(r) * v * v * std::pow(r, dim - 1);
                          },
                          upper);
      break;
    }
    case Density::Kind::bump_sum: {
      for (const auto& b : F.bumps().bumps) {
        if (b.height <= 0.0 || b.radius <= 0.0) continue;
        out.fq += b.height * integral_over_offcenter_ball(
                                 [&](double r) {
                                   const double v = theta.value(r);
                                   return v * v;
                                 },
                                 dim, norm(b.center), b.radius);
      }
      break;
    }
    default: {
      // Grid / sum: Stieltjes sum of theta^2 against the radial mass profile.
      const double S = std::min(theta.support, F.support_radius());
      const int shells = 256;
      double m_prev = 0.0;
      for (int j = 1; j <= shells; ++j) {
        const double s = S * j / shells;
        const double m = F.ball_mass(origin(dim), s);
        const double v = theta.value(s - 0.5 * S / shells);
        out.fq += v * v * (m - m_prev);
        m_prev = m;
      }
      break;
    }
  }
  return out;
}

struct TensorTheta {
  Point center;
  double w = 0.0;
};

PkIntegrals tensor_member_integrals(const Density& F, int dim, const TensorTheta& theta) {
  PkIntegrals out;
  const double iv = quad::integrate([](double t) { return eta(t) * eta(t); }, -1.0, 1.0);
  const double id =
      quad::integrate([](double t) { return eta_slope(t) * eta_slope(t); }, -1.0, 1.0);
  const double w = theta.w;
  out.l2 = std::pow(w * iv, dim);
  out.grad = dim * (id / w) * std::pow(w * iv, dim - 1);
  // \int F theta^2 by a tensor Gauss rule over the support box.
  const auto& rule = quad::gauss_rule(12);
  const int order = static_cast<int>(rule.nodes.size());
  std::size_t total = 1;
  for (int k = 0; k < dim; ++k) total *= order;
  Point x(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    double wgt = 1.0;
    double shape = 1.0;
    for (int k = 0; k < dim; ++k) {
      const int i = static_cast<int>(rest % order);
      rest /= order;
      x[k] = theta.center[k] + w * rule.nodes[i];
      wgt *= w * rule.weights[i];
      const double e = eta(rule.nodes[i]);
      shape *= e * e;
    }
    if (shape > 0.0) out.fq += wgt * shape * F.value_at(x);
  }
  return out;
}

}  // namespace

PkEstimate pk_form_bound_estimate(const Density& F, double domain_radius,
                                  int test_family_size, std::uint64_t seed,
                                  const QuadratureSpec& spec) {
  (void)spec;
  if (!(domain_radius > 0.0))
    throw std::invalid_argument("pk_form_bound_estimate: domain radius must be positive");
  if (test_family_size < 4)
    throw std::invalid_argument("pk_form_bound_estimate: family size must be >= 4");
  const int dim = F.dim();
  PkEstimate est;
  est.domain_radius = domain_radius;
  est.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<RadialTheta> radial_members;
  const int n_ladder = std::max(2, test_family_size * 2 / 5);
  const int n_spike = std::max(1, test_family_size / 5);
  const int n_tensor = std::max(1, test_family_size / 5);
  const int n_random = std::max(1, test_family_size - n_ladder - n_spike - n_tensor);

  // Concentration ladder: the same bump shrunk geometrically toward the
  // origin, which is where all the example densities are singular.
  for (int j = 0; j < n_ladder; ++j) {
    const double s = domain_radius * std::pow(2.0, -j);
    radial_members.push_back({"ladder_" + std::to_string(j),
                              [s](double r) { return eta(r / s); },
                              [s](double r) { return eta_slope(r / s) / s; }, s});
  }
  // Power spikes approximating the Hardy quasi-extremizers r^{-(N-2)/2}.
  const double gamma_max = dim > 2 ? 0.5 * (dim - 2) : 0.25;
  for (int j = 0; j < n_spike; ++j) {
    const double gamma = gamma_max * (0.45 + 0.5 * (j + 1.0) / n_spike);
    const double ep = domain_radius * std::pow(2.0, -3.0 * (j + 1));
    const double R = domain_radius;
    auto phi = [gamma, ep, R](double r) {
      return std::pow((r * r + ep * ep) / (R * R), -0.5 * gamma);
    };
    auto phi_slope = [gamma, ep, R, phi](double r) {
      return -gamma * r / (r * r + ep * ep) * phi(r);
    };
    radial_members.push_back({"spike_" + std::to_string(j),
                              [phi, R](double r) { return phi(r) * eta(r / R); },
                              [phi, phi_slope, R](double r) {
                                return phi_slope(r) * eta(r / R) + phi(r) * eta_slope(r / R) / R;
                              },
                              R});
  }
  // Randomized smooth radial profiles: small sums of shifted bumps.
  for (int j = 0; j < n_random; ++j) {
    struct Piece {
      double a, c, w;
    };
    std::vector<Piece> pieces;
    for (int m = 0; m < 4; ++m) {
      const double w = domain_radius * (0.05 + 0.25 * unit(rng));
      const double c = (domain_radius * 0.95 - w) * unit(rng);
      pieces.push_back({2.0 * unit(rng) - 1.0, c, w});
    }
    auto value = [pieces](double r) {
      double v = 0.0;
      for (const auto& pc : pieces) v += pc.a * eta((r - pc.c) / pc.w);
      return v;
    };
    auto slope = [pieces](double r) {
      double v = 0.0;
      for (const auto& pc : pieces) v += pc.a * eta_slope((r - pc.c) / pc.w) / pc.w;
      return v;
    };
    radial_members.push_back({"random_" + std::to_string(j), value, slope, domain_radius});
  }

  // Tensor-product bumps placed clear of the origin.
  std::vector<TensorTheta> tensor_members;
  for (int j = 0; j < n_tensor; ++j) {
    TensorTheta t;
    t.w = domain_radius * (0.10 + 0.08 * unit(rng));
    Point dir(dim);
    double len = 0.0;
    for (int k = 0; k < dim; ++k) {
      dir[k] = 2.0 * unit(rng) - 1.0;
      len += dir[k] * dir[k];
    }
    len = std::sqrt(std::max(len, 1e-12));
    const double offset = t.w * std::sqrt(static_cast<double>(dim)) + 0.25 * domain_radius;
    t.center.resize(dim);
    for (int k = 0; k < dim; ++k) t.center[k] = dir[k] / len * offset;
    tensor_members.push_back(std::move(t));
  }

  for (const auto& theta : radial_members) {
    PkMember member;
    member.label = theta.label;
    try {
      const PkIntegrals ints = radial_member_integrals(F, dim, theta);
      member.fq = ints.fq;
      member.grad = ints.grad;
      member.l2 = ints.l2;
    } catch (const NonIntegrableError&) {
      member.integrable = false;
      est.all_integrable = false;
    }
    est.members.push_back(std::move(member));
  }
  for (std::size_t j = 0; j < tensor_members.size(); ++j) {
    PkMember member;
    member.label = "tensor_" + std::to_string(j);
    try {
      const PkIntegrals ints = tensor_member_integrals(F, dim, tensor_members[j]);
      member.fq = ints.fq;
      member.grad = ints.grad;
      member.l2 = ints.l2;
    } catch (const NonIntegrableError&) {
      member.integrable = false;
      est.all_integrable = false;
    }
    est.members.push_back(std::move(member));
  }
  est.family_size = static_cast<int>(est.members.size());

  // Feasible pairs satisfy beta*grad + C*l2 >= fq for every member. Pick the
  // C budget from the family itself (10x the median of fq/l2), then report
  // the smallest beta at that budget and the smallest C making it feasible.
  std::vector<double> quotients;
  for (const auto& m : est.members)
    if (m.integrable && m.l2 > 0.0 && m.fq > 0.0) quotients.push_back(m.fq / m.l2);
  double c_cap = 1.0;
  if (!quotients.empty()) {
    std::sort(quotients.begin(), quotients.end());
    c_cap = 10.0 * quotients[quotients.size() / 2];
  }
  auto beta_at = [&](double c_budget) {
    double beta = 0.0;
    for (const auto& m : est.members) {
      if (!m.integrable || m.grad <= 0.0) continue;
      beta = std::max(beta, (m.fq - c_budget * m.l2) / m.grad);
    }
    return std::max(beta, 0.0);
  };
  est.beta_hat = beta_at(c_cap);
  double c_hat = 0.0;
  for (const auto& m : est.members) {
    if (!m.integrable || m.l2 <= 0.0) continue;
    c_hat = std::max(c_hat, (m.fq - est.beta_hat * m.grad) / m.l2);
  }
  est.c_hat = std::max(c_hat, 0.0);

  est.frontier.push_back({0.0, beta_at(0.0)});
  if (!quotients.empty()) {
    double c = quotients.front() / 4.0;
    const double c_top = quotients.back() * 4.0;
    while (c <= c_top) {
      est.frontier.push_back({c, beta_at(c)});
      c *= 2.0;
    }
  }
  return est;
}

}  // namespace wolff
