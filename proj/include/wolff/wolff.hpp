#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "wolff/density.hpp"
#include "wolff/rational.hpp"

namespace wolff {

// Evaluation request for W_{beta,p}^f(center, radius).
struct WolffQuery {
  double beta = 1.0;
  double p = 2.0;
  Point center;
  double radius = 1.0;  // may be +infinity

  static constexpr double infinite_radius() { return std::numeric_limits<double>::infinity(); }
};

struct QuadratureSpec {
  int radial_nodes = 16;   // Gauss order per dyadic shell
  int dyadic_depth = 48;   // minimum shell count; >= 8
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
};

enum class WolffStatus {
  converged,       // value is the potential up to the requested tolerance
  infinite,        // integrand not integrable at r -> 0; value = partial sum
  non_integrable,  // the density itself is not integrable over some ball
};

struct WolffResult {
  double value = 0.0;
  WolffStatus status = WolffStatus::converged;
  // Per-octave log2 growth of shell contributions when status == infinite;
  // equals (sigma - beta p)/(p - 1) for a local power singularity |y|^{-sigma}.
  double divergence_rate = 0.0;
  int shells_used = 0;
  bool tail_estimated = false;  // subgeometric decay extrapolated at the cap
  std::string note;

  bool finite() const { return status == WolffStatus::converged; }
};

// W_{beta,p}^f(x, R) by per-shell Gauss quadrature in log r over dyadic
// shells [2^{-k-1}R, 2^{-k}R], with the exact power-law tail outside the
// support when R exceeds it.
WolffResult wolff_eval(const Density& f, const WolffQuery& q, const QuadratureSpec& spec = {});

// --- Kato-class scan ---------------------------------------------------

struct KatoRow {
  Point x;
  double radius = 0.0;
  double value = 0.0;
  WolffStatus status = WolffStatus::converged;
};

struct KatoScan {
  double beta = 1.0;
  double p = 2.0;
  double threshold = 0.0;
  std::vector<double> radii;      // strictly decreasing
  std::vector<Point> sample;      // caller points + bump centers + origin
  std::vector<KatoRow> rows;      // radius-major, sample order within
  std::vector<double> sup_curve;  // per radius
  bool any_divergent = false;
  std::string classification;     // "consistent" or "inconsistent"
};

// Empirical decay curve R -> sup_x W_{beta,p}^f(x, R). The classification is
// a diagnostic: "consistent" means the curve fell below the caller threshold
// at the smallest radius, not a membership proof.
KatoScan kato_limit_scan(const Density& f, double beta, double p,
                         const std::vector<Point>& domain_sample,
                         const std::vector<double>& radii, double threshold,
                         const QuadratureSpec& spec = {}, int jobs = 1);

// --- Form-boundedness estimate ------------------------------------------

struct PkMember {
  std::string label;
  double fq = 0.0;    // \int F theta^2
  double grad = 0.0;  // \int |grad theta|^2
  double l2 = 0.0;    // \int theta^2
  bool integrable = true;
};

struct PkEstimate {
  // Smallest (beta, C) over the generated family with \int F theta^2 <=
  // beta \int |grad theta|^2 + C \int theta^2. A lower estimate of the true
  // form bound: a finite family can only under-observe it.
  double beta_hat = 0.0;
  double c_hat = 0.0;
  struct FrontierPoint {
    double c_cap = 0.0;
    double beta = 0.0;
  };
  std::vector<FrontierPoint> frontier;
  std::vector<PkMember> members;
  double domain_radius = 0.0;
  int family_size = 0;
  std::uint64_t seed = 0;
  bool all_integrable = true;
};

PkEstimate pk_form_bound_estimate(const Density& F, double domain_radius,
                                  int test_family_size, std::uint64_t seed = 2024,
                                  const QuadratureSpec& spec = {});

// --- Class embedding (Wolff-potential comparison) ------------------------

struct EmbeddingCheck {
  double lhs = 0.0;    // W_{alpha,q}^{f^{1/kappa}}(x, R)
  double rhs = 0.0;    // R^{(kappa alpha q - beta p)/(kappa(q-1))} W_{beta,p}^f(x,2R)^{(p-1)/(kappa(q-1))}
  double ratio = 0.0;  // lhs / rhs, with the comparison constant left at 1
  int branch = 0;      // 1: kappa > max(beta p/(alpha q), 1); 2: equality branch
  WolffStatus lhs_status = WolffStatus::converged;
  WolffStatus rhs_status = WolffStatus::converged;
};

EmbeddingCheck class_embedding_check(const Density& f, double alpha, double beta, double p,
                                     double q, double kappa, const Point& x, double R,
                                     const QuadratureSpec& spec = {});

// Exact R-exponent algebra for pure power densities f(y) = |y|^{-s}.
struct EmbeddingExponents {
  Rational lhs;
  Rational rhs;
  bool equal = false;
  bool lhs_converges = false;  // s/kappa < alpha q
  bool rhs_converges = false;  // s < beta p
  bool mass_finite = false;    // s < N
};

EmbeddingExponents embedding_exponents(const Rational& alpha, const Rational& beta,
                                       const Rational& p, const Rational& q,
                                       const Rational& kappa, const Rational& s, int dim);

}  // namespace wolff
