#pragma once

#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace wolff {

using Point = std::vector<double>;

double dist(const Point& a, const Point& b);
double norm(const Point& a);
Point origin(int dim);

// Radial density about the origin: f(r) for r > 0, supported in [0, support_radius].
struct RadialProfile {
  std::function<double(double)> value;
  double support_radius = 1.0;
  std::string label = "radial";
};

struct Bump {
  Point center;
  double radius = 0.0;
  double height = 0.0;
};

struct BumpSum {
  std::vector<Bump> bumps;
};

// Uniform grid of cell-constant samples; cell (i0, i1, ...) spans
// origin + h*[i, i+1) per axis, row-major storage.
struct GridSamples {
  Point corner;
  double h = 1.0;
  std::vector<int> shape;
  std::vector<double> values;
};

// A nonnegative, compactly supported spatial density. Houses the structure
// coefficients f, g, f1, g1, f2, g2 and composites of them. Immutable after
// construction; radial profiles carry a cumulative mass table so repeated
// ball-mass queries stay cheap.
class Density {
 public:
  enum class Kind { radial_profile, bump_sum, grid_samples, sum };

  Density();  // zero density (empty bump sum), dim 3
  Density(int dim, RadialProfile profile);
  Density(int dim, BumpSum bumps);
  Density(int dim, GridSamples grid);
  static Density zero(int dim);
  static Density sum_of(std::vector<Density> terms);

  int dim() const { return dim_; }
  Kind kind() const;
  const std::string& label() const { return label_; }
  Density& set_label(std::string label) {
    label_ = std::move(label);
    return *this;
  }

  // \int_{B_r(x)} f dy. Throws NonIntegrableError when the profile is not
  // integrable over the queried ball.
  double ball_mass(const Point& x, double r) const;

  double total_mass() const;

  // Smallest rho with supp f inside B_rho(x).
  double far_radius(const Point& x) const;

  // Smallest S with supp f inside B_S(0).
  double support_radius() const;

  // Radii r where r -> ball_mass(x, r) has a kink (support edges crossing
  // the ball boundary); quadratures split panels there.
  std::vector<double> radial_breakpoints(const Point& x) const;

  // \int_{r0}^{r1} f(s) s^{N-1} ds; radial profiles only.
  double radial_weighted_mass(double r0, double r1) const;

  // Pointwise profile value; radial profiles only.
  double radial_value(double r) const;

  // Pointwise evaluation at a point (piecewise constant for bump sums and
  // grids). Radial profiles may blow up at the origin.
  double value_at(const Point& x) const;

  bool is_radial() const { return kind() == Kind::radial_profile; }
  bool is_zero() const;

  const BumpSum& bumps() const;
  const RadialProfile& radial() const;

  // Pointwise power f^e. Bump sums require pairwise disjoint supports.
  Density power(double e) const;

  // y -> f(y / lambda); dilates the support by lambda.
  Density dilated(double lambda) const;

  // c * f.
  Density times(double c) const;

  const std::vector<Density>& terms() const;  // sum kind only

 private:
  struct MassTable;

  void build_table();

  int dim_ = 3;
  std::string label_ = "density";
  std::variant<RadialProfile, BumpSum, GridSamples, std::vector<Density>> body_;
  std::shared_ptr<const MassTable> table_;  // radial profiles only
};

}  // namespace wolff
