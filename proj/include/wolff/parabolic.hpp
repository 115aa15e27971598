#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wolff/density.hpp"

namespace wolff {

// The six coefficient densities and constants of the structure conditions.
struct StructureCoefficients {
  double p = 2.0;
  double c0 = 1.0;
  double c1 = 1.0;
  Density f, g, f1, g1, f2, g2;

  void validate() const;
};

// Scalar flux law A(x, z) for the 1D/radial solver. Regularized form:
// A_eps(x, z) = a(x) (z^2 + eps^2)^{(p-2)/2} z + eps z.
struct VectorFieldSpec {
  enum class Kind { pure_p_laplacian, weighted_p_laplacian, user_tabulated };
  Kind kind = Kind::pure_p_laplacian;
  double p = 2.0;
  double eps = 0.0;  // 0 means not yet regularized
  double c0 = 1.0;
  double c1 = 1.0;
  std::function<double(double)> weight;  // a(x) for weighted_p_laplacian
  double tab_x0 = 0.0, tab_x1 = 1.0;     // user_tabulated sample range
  std::vector<double> tab_values;

  double weight_at(double x) const;
  double flux(double x, double z) const;
  double flux_dz(double x, double z) const;
};

// The approximation step: the degenerate |z| factor becomes
// (z^2 + eps^2)^{(p-2)/2}, an extra eps*z term is added, and tabulated
// x-coefficients are smoothed with a box kernel of width eps. The clamp of
// the right-hand side to [-1/eps, 1/eps] is applied by the stepper.
VectorFieldSpec regularize(const VectorFieldSpec& spec, double eps);

struct MonotonicityProbe {
  bool ok = true;
  double worst_margin = 0.0;  // min over probes of dA/dz - c0 |z|^{p-2}
  double worst_z = 0.0;
};

MonotonicityProbe check_monotonicity(const VectorFieldSpec& spec,
                                     const std::vector<double>& z_probes,
                                     double x_probe = 0.5);

struct Geometry1D {
  enum class Kind { interval, radial } kind = Kind::interval;
  int dim = 1;  // N in the radial weight r^{N-1}
  double x_lo = 0.0;
  double x_hi = 1.0;
  int n_cells = 128;

  std::vector<double> nodes() const;
  double dx() const { return (x_hi - x_lo) / n_cells; }
  double face_weight(double x) const;
  // Per-unit-solid-angle volume of the dual cell around node i.
  double cell_volume(int i) const;
};

struct TimeGrid {
  double t0 = 0.0;
  double t1 = 1.0;
  double dt0 = 1e-2;
  double dt_min = 1e-10;
  double dt_max = 1.0;
  double growth = 1.2;  // 1.0 pins the step size
};

struct SpaceTimeGrid {
  Geometry1D space;
  TimeGrid time;
  double theta = 1.0;  // implicitness in [1/2, 1]
};

struct NewtonOptions {
  int max_iter = 40;
  double tol = 1e-11;
  int max_line_search = 10;
  int max_picard = 80;
};

struct StepStats {
  double t_new = 0.0;
  double dt = 0.0;
  int newton_iters = 0;
  int picard_iters = 0;
  int rejections = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

using SourceFn = std::function<double(double, double, double, double)>;  // b(x, t, u, z)
using ScalarFn = std::function<double(double)>;

struct ParabolicProblem {
  VectorFieldSpec field;  // regularized: eps > 0
  StructureCoefficients coeffs;
  std::optional<Density> source_density;  // cell-averaged into b
  SourceFn source;                        // optional extra b(x,t,u,z)
  ScalarFn initial;
  ScalarFn boundary_left;   // interval geometry only
  ScalarFn boundary_right;  // u(x_hi, t)
};

struct StepResult {
  std::vector<double> u;
  StepStats stats;
};

// One implicit theta-step from state at time t. Retries with halved dt on
// nonlinear failure; throws NumericalError below dt_min.
StepResult step(const ParabolicProblem& prob, const SpaceTimeGrid& grid,
                const std::vector<double>& state, double t, double dt,
                const NewtonOptions& opts = {});

struct ParabolicSolution {
  SpaceTimeGrid grid;
  double eps = 0.0;
  std::vector<double> x;
  std::vector<double> times;
  std::vector<std::vector<double>> u;     // per slice
  std::vector<std::vector<double>> grad;  // centered differences, one-sided ends
  std::vector<StepStats> newton_stats;

  int slice_at(double t) const;  // index of the first slice with time >= t
};

ParabolicSolution solve_ivbp(const ParabolicProblem& prob, const SpaceTimeGrid& grid,
                             const NewtonOptions& opts = {});

struct SpaceTimeTestFn {
  std::string label;
  std::function<double(double, double)> value;  // psi(x, t)
  std::function<double(double, double)> dx;
};

std::vector<SpaceTimeTestFn> make_spacetime_family(int count, const SpaceTimeGrid& grid,
                                                   std::uint64_t seed);

// Max over the family of the defect of the weak integral identity
// \int u psi |_{t0}^{t1} + \iint (-u psi_tau + A(grad u) grad psi - b psi).
double weak_residual(const ParabolicSolution& sol, const ParabolicProblem& prob,
                     const std::vector<SpaceTimeTestFn>& family);

}  // namespace wolff
