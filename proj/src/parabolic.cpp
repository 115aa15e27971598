#include "wolff/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "wolff/errors.hpp"

namespace wolff {

void StructureCoefficients::validate() const {
  if (!(p >= 2.0)) throw ConfigError("structure coefficients: p must be >= 2");
  if (!(c0 > 0.0)) throw ConfigError("structure coefficients: c0 must be positive");
  if (!(c1 >= c0)) throw ConfigError("structure coefficients: c1 must be >= c0");
}

double VectorFieldSpec::weight_at(double x) const {
  switch (kind) {
    case Kind::pure_p_laplacian:
      return 1.0;
    case Kind::weighted_p_laplacian:
      return weight ? weight(x) : 1.0;
    case Kind::user_tabulated: {
      if (tab_values.empty()) return 1.0;
      if (tab_values.size() == 1) return tab_values[0];
      const double s = std::clamp((x - tab_x0) / (tab_x1 - tab_x0), 0.0, 1.0);
      const double pos = s * (tab_values.size() - 1);
      const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                  tab_values.size() - 2);
      const double w = pos - i;
      return (1.0 - w) * tab_values[i] + w * tab_values[i + 1];
    }
  }
  return 1.0;
}

double VectorFieldSpec::flux(double x, double z) const {
  const double s2 = z * z + eps * eps;
  const double degenerate = s2 > 0.0 ? std::pow(s2, 0.5 * (p - 2.0)) : 0.0;
  return weight_at(x) * degenerate * z + eps * z;
}

double VectorFieldSpec::flux_dz(double x, double z) const {
  const double s2 = z * z + eps * eps;
  if (s2 <= 0.0) return eps + (p == 2.0 ? weight_at(x) : 0.0);
  return weight_at(x) * std::pow(s2, 0.5 * (p - 4.0)) * ((p - 1.0) * z * z + eps * eps) + eps;
}

VectorFieldSpec regularize(const VectorFieldSpec& spec, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("regularize: eps must be positive");
  VectorFieldSpec out = spec;
  out.eps = eps;
  if (out.kind == VectorFieldSpec::Kind::user_tabulated && out.tab_values.size() > 1) {
    // Box-kernel smoothing of the tabulated x-dependence with width eps.
    const double dx = (out.tab_x1 - out.tab_x0) / (out.tab_values.size() - 1);
    const int halo = static_cast<int>(std::floor(eps / std::max(dx, 1e-300)));
    if (halo > 0) {
      const auto& v = spec.tab_values;
      const int n = static_cast<int>(v.size());
      for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        int cnt = 0;
        for (int j = i - halo; j <= i + halo; ++j) {
          const int jc = std::clamp(j, 0, n - 1);
          acc += v[jc];
          ++cnt;
        }
        out.tab_values[i] = acc / cnt;
      }
    }
  }
  return out;
}

MonotonicityProbe check_monotonicity(const VectorFieldSpec& spec,
                                     const std::vector<double>& z_probes, double x_probe) {
  MonotonicityProbe probe;
  probe.worst_margin = std::numeric_limits<double>::infinity();
  for (double z : z_probes) {
    const double margin =
        spec.flux_dz(x_probe, z) - spec.c0 * std::pow(std::abs(z), spec.p - 2.0);
    if (margin < probe.worst_margin) {
      probe.worst_margin = margin;
      probe.worst_z = z;
    }
  }
  probe.ok = probe.worst_margin >= -1e-12;
  return probe;
}

std::vector<double> Geometry1D::nodes() const {
  if (n_cells < 2) throw ConfigError("geometry: need at least 2 cells");
  if (!(x_hi > x_lo)) throw ConfigError("geometry: x_hi must exceed x_lo");
  if (kind == Kind::radial && x_lo != 0.0)
    throw ConfigError("geometry: radial domain must start at r = 0");
  if (kind == Kind::radial && dim < 1) throw ConfigError("geometry: radial dim must be >= 1");
  std::vector<double> out(n_cells + 1);
  for (int i = 0; i <= n_cells; ++i) out[i] = x_lo + (x_hi - x_lo) * i / n_cells;
  return out;
}

double Geometry1D::face_weight(double x) const {
  if (kind == Kind::interval || dim == 1) return 1.0;
  return std::pow(x, dim - 1);
}

double Geometry1D::cell_volume(int i) const {
  const double h = dx();
  const double xi = x_lo + h * i;
  if (kind == Kind::interval || dim == 1) {
    if (i == 0 || i == n_cells) return 0.5 * h;
    return h;
  }
  const double lo = std::max(xi - 0.5 * h, 0.0);
  const double hi = std::min(xi + 0.5 * h, x_hi);
  return (std::pow(hi, dim) - std::pow(lo, dim)) / dim;
}

namespace {

struct Disc {
  const ParabolicProblem* prob = nullptr;
  Geometry1D geom;
  double theta = 1.0;
  int m = 0;       // n_cells
  int lo = 0;      // first unknown node
  int hi = 0;      // last unknown node
  double h = 0.0;  // dx
  std::vector<double> x;
  std::vector<double> vol;
  std::vector<double> wface;   // at x_{i+1/2}, i = 0..m-1
  std::vector<double> b_cell;  // cell-averaged source density
  double clamp_bound = 0.0;

  double bval(int i, double t, double ui, double zi) const {
    double b = b_cell[i];
    if (prob->source) b += prob->source(x[i], t, ui, zi);
    return std::clamp(b, -clamp_bound, clamp_bound);
  }

  double z_at(const std::vector<double>& u, int i) const {
    if (geom.kind == Geometry1D::Kind::radial && i == 0) return 0.0;  // symmetry
    if (i == 0) return (u[1] - u[0]) / h;
    if (i == m) return (u[m] - u[m - 1]) / h;
    return (u[i + 1] - u[i - 1]) / (2.0 * h);
  }
};

Disc build_disc(const ParabolicProblem& prob, const SpaceTimeGrid& grid) {
  if (!(prob.field.eps > 0.0))
    throw ConfigError("parabolic solver: vector field must be regularized (eps > 0)");
  if (!(prob.field.p >= 2.0)) throw ConfigError("parabolic solver: p must be >= 2");
  if (!(grid.theta >= 0.5 && grid.theta <= 1.0))
    throw ConfigError("parabolic solver: theta must lie in [1/2, 1]");
  Disc d;
  d.prob = &prob;
  d.geom = grid.space;
  d.theta = grid.theta;
  d.m = grid.space.n_cells;
  d.h = grid.space.dx();
  d.x = grid.space.nodes();
  const bool radial = grid.space.kind == Geometry1D::Kind::radial;
  d.lo = radial ? 0 : 1;
  d.hi = d.m - 1;
  d.vol.resize(d.m + 1);
  for (int i = 0; i <= d.m; ++i) d.vol[i] = grid.space.cell_volume(i);
  d.wface.resize(d.m);
  for (int i = 0; i < d.m; ++i) d.wface[i] = grid.space.face_weight(d.x[i] + 0.5 * d.h);
  d.clamp_bound = 1.0 / prob.field.eps;

  d.b_cell.assign(d.m + 1, 0.0);
  if (prob.source_density) {
    const Density& rho = *prob.source_density;
    if (!rho.is_radial())
      throw ConfigError("parabolic solver: source density must be a radial profile");
    const int want_dim = radial ? grid.space.dim : 1;
    if (rho.dim() != want_dim)
      throw ConfigError("parabolic solver: source density dimension must match the geometry");
    if (!radial && grid.space.x_lo < 0.0)
      throw ConfigError("parabolic solver: density sources need x_lo >= 0");
    // Exact cell averages: point sampling is undefined at the singularity and
    // averages preserve the potential at grid scale.
    for (int i = 0; i <= d.m; ++i) {
      const double lo_face = std::max(d.x[i] - 0.5 * d.h, std::max(grid.space.x_lo, 0.0));
      const double hi_face = std::min(d.x[i] + 0.5 * d.h, grid.space.x_hi);
      if (d.vol[i] > 0.0)
        d.b_cell[i] = rho.radial_weighted_mass(lo_face, hi_face) / d.vol[i];
    }
  }
  return d;
}

// Phi_i(u, t) = div of the weighted flux plus the volume-scaled source.
void spatial_operator(const Disc& d, const std::vector<double>& u, double t,
                      std::vector<double>& phi) {
  const auto& field = d.prob->field;
  std::vector<double> face(d.m);
  for (int i = 0; i < d.m; ++i) {
    const double slope = (u[i + 1] - u[i]) / d.h;
    face[i] = d.wface[i] * field.flux(d.x[i] + 0.5 * d.h, slope);
  }
  phi.assign(d.m + 1, 0.0);
  for (int i = d.lo; i <= d.hi; ++i) {
    const double inflow = i == 0 ? 0.0 : face[i - 1];
    phi[i] = face[i] - inflow + d.vol[i] * d.bval(i, t, u[i], d.z_at(u, i));
  }
}

double residual(const Disc& d, const std::vector<double>& uold,
                const std::vector<double>& unew, const std::vector<double>& phi_old,
                double t_new, double dt, std::vector<double>& g) {
  std::vector<double> phi_new;
  spatial_operator(d, unew, t_new, phi_new);
  g.assign(d.m + 1, 0.0);
  double umax = 1.0;
  for (int i = 0; i <= d.m; ++i) umax = std::max(umax, std::abs(unew[i]));
  double worst = 0.0;
  for (int i = d.lo; i <= d.hi; ++i) {
    g[i] = d.vol[i] * (unew[i] - uold[i]) -
           dt * (d.theta * phi_new[i] + (1.0 - d.theta) * phi_old[i]);
    worst = std::max(worst, std::abs(g[i]) / (d.vol[i] * umax));
  }
  return worst;
}

struct Tridiag {
  std::vector<double> lower, diag, upper;
};

void jacobian(const Disc& d, const std::vector<double>& u, double t_new, double dt,
              Tridiag& jac) {
  const auto& field = d.prob->field;
  const int n = d.m + 1;
  jac.lower.assign(n, 0.0);
  jac.diag.assign(n, 1.0);
  jac.upper.assign(n, 0.0);
  std::vector<double> fdz(d.m);
  for (int i = 0; i < d.m; ++i) {
    const double slope = (u[i + 1] - u[i]) / d.h;
    fdz[i] = d.wface[i] * field.flux_dz(d.x[i] + 0.5 * d.h, slope) / d.h;
  }
  for (int i = d.lo; i <= d.hi; ++i) {
    double dphi_dm = 0.0, dphi_di = 0.0, dphi_dp = 0.0;
    dphi_dp += fdz[i];
    dphi_di -= fdz[i];
    if (i > 0) {
      dphi_di -= fdz[i - 1];
      dphi_dm += fdz[i - 1];
    }
    // Source partials by central differences; the clamp zeroes them outside
    // its range automatically.
    const double ui = u[i];
    const double zi = d.z_at(u, i);
    const double du = 1e-7 * std::max(1.0, std::abs(ui));
    const double dbdu =
        (d.bval(i, t_new, ui + du, zi) - d.bval(i, t_new, ui - du, zi)) / (2.0 * du);
    const double dz = 1e-7 * std::max(1.0, std::abs(zi));
    const double dbdz =
        (d.bval(i, t_new, ui, zi + dz) - d.bval(i, t_new, ui, zi - dz)) / (2.0 * dz);
    dphi_di += d.vol[i] * dbdu;
    const bool radial0 = d.geom.kind == Geometry1D::Kind::radial && i == 0;
    if (!radial0 && i > 0 && i < d.m) {
      dphi_dp += d.vol[i] * dbdz / (2.0 * d.h);
      dphi_dm -= d.vol[i] * dbdz / (2.0 * d.h);
    }
    jac.diag[i] = d.vol[i] - dt * d.theta * dphi_di;
    jac.lower[i] = -dt * d.theta * dphi_dm;
    jac.upper[i] = -dt * d.theta * dphi_dp;
  }
}

// Thomas solve restricted to rows lo..hi; boundary columns are folded into
// the right-hand side by the caller having zero lower/upper couplings there.
void solve_tridiag(const Tridiag& jac, std::vector<double>& rhs, int lo, int hi) {
  const int n = hi - lo + 1;
  if (n <= 0) return;
  std::vector<double> c(n, 0.0), dvec(n, 0.0);
  double beta = jac.diag[lo];
  if (beta == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
  c[0] = jac.upper[lo] / beta;
  dvec[0] = rhs[lo] / beta;
  for (int k = 1; k < n; ++k) {
    const int i = lo + k;
    beta = jac.diag[i] - jac.lower[i] * c[k - 1];
    if (beta == 0.0) throw NumericalError("tridiagonal solve: zero pivot");
    c[k] = jac.upper[i] / beta;
    dvec[k] = (rhs[i] - jac.lower[i] * dvec[k - 1]) / beta;
  }
  for (int k = n - 2; k >= 0; --k) dvec[k] -= c[k] * dvec[k + 1];
  for (int k = 0; k < n; ++k) rhs[lo + k] = dvec[k];
}

void apply_boundary(const Disc& d, std::vector<double>& u, double t) {
  if (d.geom.kind == Geometry1D::Kind::interval)
    u[0] = d.prob->boundary_left ? d.prob->boundary_left(t) : 0.0;
  u[d.m] = d.prob->boundary_right ? d.prob->boundary_right(t) : 0.0;
}

// One attempt at fixed dt. Returns true with stats filled on convergence.
bool try_step(const Disc& d, const std::vector<double>& uold, double t, double dt,
              const NewtonOptions& opts, std::vector<double>& unew, StepStats& stats) {
  const double t_new = t + dt;
  std::vector<double> phi_old;
  if (d.theta < 1.0)
    spatial_operator(d, uold, t, phi_old);
  else
    phi_old.assign(d.m + 1, 0.0);

  unew = uold;
  apply_boundary(d, unew, t_new);

  std::vector<double> g, trial, gt;
  Tridiag jac;
  double res = residual(d, uold, unew, phi_old, t_new, dt, g);
  stats.residual_history.push_back(res);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (res <= opts.tol) {
      stats.newton_iters = iter;
      stats.residual = res;
      return true;
    }
    jacobian(d, unew, t_new, dt, jac);
    std::vector<double> rhs = g;
    for (int i = d.lo; i <= d.hi; ++i) rhs[i] = -rhs[i];
    solve_tridiag(jac, rhs, d.lo, d.hi);

    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < opts.max_line_search; ++ls) {
      trial = unew;
      for (int i = d.lo; i <= d.hi; ++i) trial[i] += lambda * rhs[i];
      const double res_t = residual(d, uold, trial, phi_old, t_new, dt, gt);
      if (res_t <= (1.0 - 1e-4 * lambda) * res || res_t <= opts.tol) {
        unew.swap(trial);
        g.swap(gt);
        res = res_t;
        stats.residual_history.push_back(res);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;  // Newton stagnated; fall through to Picard
  }
  if (res <= opts.tol) {
    stats.residual = res;
    return true;
  }

  // Picard fallback: lagged-diffusivity linear solves. Always well posed for
  // the regularized flux; each sweep is checked against the true residual.
  const auto& field = d.prob->field;
  int stall = 0;
  for (int it = 0; it < opts.max_picard; ++it) {
    Tridiag lin;
    const int n = d.m + 1;
    lin.lower.assign(n, 0.0);
    lin.diag.assign(n, 1.0);
    lin.upper.assign(n, 0.0);
    std::vector<double> rhs(n, 0.0);
    std::vector<double> kappa(d.m);
    for (int i = 0; i < d.m; ++i) {
      const double slope = (unew[i + 1] - unew[i]) / d.h;
      const double xm = d.x[i] + 0.5 * d.h;
      kappa[i] = std::abs(slope) > 1e-300 ? field.flux(xm, slope) / slope
                                          : field.flux_dz(xm, 0.0);
      kappa[i] *= d.wface[i] / d.h;
    }
    for (int i = d.lo; i <= d.hi; ++i) {
      double diag = d.vol[i] + dt * d.theta * kappa[i];
      double up = -dt * d.theta * kappa[i];
      double lo_c = 0.0;
      if (i > 0) {
        diag += dt * d.theta * kappa[i - 1];
        lo_c = -dt * d.theta * kappa[i - 1];
      }
      rhs[i] = d.vol[i] * uold[i] +
               dt * d.theta * d.vol[i] * d.bval(i, t_new, unew[i], d.z_at(unew, i)) +
               dt * (1.0 - d.theta) * phi_old[i];
      // Fold Dirichlet neighbors into the right-hand side.
      if (i + 1 > d.hi) {
        rhs[i] -= up * unew[i + 1];
        up = 0.0;
      }
      if (i - 1 < d.lo && i > 0) {
        rhs[i] -= lo_c * unew[i - 1];
        lo_c = 0.0;
      }
      lin.diag[i] = diag;
      lin.upper[i] = up;
      lin.lower[i] = lo_c;
    }
    solve_tridiag(lin, rhs, d.lo, d.hi);
    for (int i = d.lo; i <= d.hi; ++i) unew[i] = rhs[i];
    const double res_p = residual(d, uold, unew, phi_old, t_new, dt, g);
    stats.residual_history.push_back(res_p);
    ++stats.picard_iters;
    if (res_p <= opts.tol) {
      stats.residual = res_p;
      return true;
    }
    stall = res_p > 0.98 * res ? stall + 1 : 0;
    res = res_p;
    if (stall >= 5) break;
  }
  stats.residual = res;
  return false;
}

}  // namespace

StepResult step(const ParabolicProblem& prob, const SpaceTimeGrid& grid,
                const std::vector<double>& state, double t, double dt,
                const NewtonOptions& opts) {
  const Disc d = build_disc(prob, grid);
  if (static_cast<int>(state.size()) != d.m + 1)
    throw std::invalid_argument("step: state size does not match the grid");
  for (double v : state)
    if (!std::isfinite(v)) throw std::invalid_argument("step: state must be finite");

  StepResult out;
  double dt_try = dt;
  for (;;) {
    StepStats stats;
    stats.dt = dt_try;
    stats.t_new = t + dt_try;
    stats.rejections = out.stats.rejections;
    if (try_step(d, state, t, dt_try, opts, out.u, stats)) {
      out.stats = stats;
      return out;
    }
    out.stats.rejections += 1;
    dt_try *= 0.5;
    if (dt_try < grid.time.dt_min)
      throw NumericalError("step: nonlinear solver failed down to dt_min at t = " +
                           std::to_string(t) + " (residual " + std::to_string(stats.residual) +
                           ")");
  }
}

ParabolicSolution solve_ivbp(const ParabolicProblem& prob, const SpaceTimeGrid& grid,
                             const NewtonOptions& opts) {
  const Disc d = build_disc(prob, grid);
  const TimeGrid& tg = grid.time;
  if (!(tg.t1 > tg.t0)) throw ConfigError("solve_ivbp: empty time window");
  if (!(tg.dt0 > 0.0)) throw ConfigError("solve_ivbp: dt0 must be positive");

  ParabolicSolution sol;
  sol.grid = grid;
  sol.eps = prob.field.eps;
  sol.x = d.x;

  std::vector<double> u0(d.m + 1, 0.0);
  for (int i = 0; i <= d.m; ++i) u0[i] = prob.initial ? prob.initial(d.x[i]) : 0.0;
  // Corner compatibility between initial and boundary traces.
  double scale = 1.0;
  for (double v : u0) scale = std::max(scale, std::abs(v));
  const double corner_tol = 1e-7 * scale;
  const double br = prob.boundary_right ? prob.boundary_right(tg.t0) : 0.0;
  if (std::abs(u0[d.m] - br) > corner_tol)
    throw ConfigError("solve_ivbp: initial and right boundary data mismatch at the corner");
  if (grid.space.kind == Geometry1D::Kind::interval) {
    const double bl = prob.boundary_left ? prob.boundary_left(tg.t0) : 0.0;
    if (std::abs(u0[0] - bl) > corner_tol)
      throw ConfigError("solve_ivbp: initial and left boundary data mismatch at the corner");
  }
  apply_boundary(d, u0, tg.t0);

  sol.times.push_back(tg.t0);
  sol.u.push_back(u0);

  double t = tg.t0;
  double dt = std::min(tg.dt0, tg.dt_max);
  std::vector<double> cur = u0;
  const double t_end = tg.t1;
  while (t < t_end - 1e-14 * (t_end - tg.t0)) {
    const double dt_try = std::min(dt, t_end - t);
    StepResult res = step(prob, grid, cur, t, dt_try, opts);
    t += res.stats.dt;
    cur = res.u;
    sol.times.push_back(t);
    sol.u.push_back(cur);
    sol.newton_stats.push_back(std::move(res.stats));
    dt = std::min(res.stats.dt * tg.growth, tg.dt_max);
  }

  sol.grad.reserve(sol.u.size());
  for (const auto& slice : sol.u) {
    std::vector<double> g(slice.size(), 0.0);
    for (int i = 1; i < d.m; ++i) g[i] = (slice[i + 1] - slice[i - 1]) / (2.0 * d.h);
    g[0] = (slice[1] - slice[0]) / d.h;
    g[d.m] = (slice[d.m] - slice[d.m - 1]) / d.h;
    sol.grad.push_back(std::move(g));
  }
  return sol;
}

int ParabolicSolution::slice_at(double t) const {
  const auto it = std::lower_bound(times.begin(), times.end(), t - 1e-14);
  return static_cast<int>(std::min<std::ptrdiff_t>(it - times.begin(),
                                                   static_cast<std::ptrdiff_t>(times.size()) - 1));
}

std::vector<SpaceTimeTestFn> make_spacetime_family(int count, const SpaceTimeGrid& grid,
                                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto eta = [](double t) {
    const double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    const double w = 1.0 - a * a;
    return w * w;
  };
  auto eta_slope = [](double t) {
    const double a = std::abs(t);
    if (a >= 1.0) return 0.0;
    return -4.0 * t * (1.0 - a * a);
  };
  const double L = grid.space.x_hi - grid.space.x_lo;
  const double T = grid.time.t1 - grid.time.t0;
  std::vector<SpaceTimeTestFn> family;
  for (int j = 0; j < count; ++j) {
    const double cx = grid.space.x_lo + L * (0.25 + 0.5 * unit(rng));
    const double wx =
        std::min({L * (0.1 + 0.2 * unit(rng)), cx - grid.space.x_lo, grid.space.x_hi - cx}) *
        0.9;
    const double ct = grid.time.t0 + T * (0.3 + 0.4 * unit(rng));
    const double wt = std::min({T * (0.15 + 0.2 * unit(rng)), ct - grid.time.t0,
                                grid.time.t1 - ct}) *
                      0.9;
    SpaceTimeTestFn fn;
    fn.label = "psi_" + std::to_string(j);
    fn.value = [=](double x, double t) { return eta((x - cx) / wx) * eta((t - ct) / wt); };
    fn.dx = [=](double x, double t) {
      return eta_slope((x - cx) / wx) / wx * eta((t - ct) / wt);
    };
    family.push_back(std::move(fn));
  }
  return family;
}

double weak_residual(const ParabolicSolution& sol, const ParabolicProblem& prob,
                     const std::vector<SpaceTimeTestFn>& family) {
  const Disc d = build_disc(prob, sol.grid);
  const std::size_t n_slices = sol.u.size();
  if (n_slices < 2) throw std::invalid_argument("weak_residual: need at least two slices");
  double worst = 0.0;
  for (const auto& psi : family) {
    double acc = 0.0;
    // \int u psi dx at the window ends.
    for (int i = 0; i <= d.m; ++i) {
      acc += d.vol[i] * (sol.u.back()[i] * psi.value(d.x[i], sol.times.back()) -
                         sol.u.front()[i] * psi.value(d.x[i], sol.times.front()));
    }
    for (std::size_t n = 0; n + 1 < n_slices; ++n) {
      const double t0 = sol.times[n];
      const double t1 = sol.times[n + 1];
      const double dt = t1 - t0;
      const auto& u1 = sol.u[n + 1];
      // -u d_tau psi, with psi differenced in time so constants telescope.
      for (int i = 0; i <= d.m; ++i)
        acc -= d.vol[i] * u1[i] * (psi.value(d.x[i], t1) - psi.value(d.x[i], t0));
      // A(grad u) . grad psi on faces.
      for (int i = 0; i < d.m; ++i) {
        const double xm = d.x[i] + 0.5 * d.h;
        const double slope = (u1[i + 1] - u1[i]) / d.h;
        acc += dt * d.wface[i] * prob.field.flux(xm, slope) * psi.dx(xm, t1) * d.h;
      }
      // -b psi.
      for (int i = 0; i <= d.m; ++i)
        acc -= dt * d.vol[i] * d.bval(i, t1, u1[i], d.z_at(u1, i)) * psi.value(d.x[i], t1);
    }
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

}  // namespace wolff
