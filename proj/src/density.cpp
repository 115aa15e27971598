#include "wolff/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wolff/errors.hpp"
#include "wolff/geometry.hpp"
#include "wolff/quadrature.hpp"

namespace wolff {

double dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(const Point& a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

Point origin(int dim) { return Point(static_cast<std::size_t>(dim), 0.0); }

// Cumulative table of \int f(s) s^{N-1} ds over dyadic octaves of [0, S].
// Built once at construction; queries then cost one Gauss panel.
struct Density::MassTable {
  double support = 0.0;
  int dim = 0;
  std::vector<double> increment;  // increment[j] = mass on [S 2^{-j-1}, S 2^{-j}]
  std::vector<double> below;      // below[j] = mass on [0, S 2^{-j}]
  double tail = 0.0;              // estimated mass below the deepest octave
  double tail_exponent = 0.0;     // local power of the cumulative near 0
  bool diverged = false;
  double divergence_ratio = 0.0;

  double cumulative(const std::function<double(double)>& f, double r) const;
};

namespace {

constexpr int kTableMax = 1100;

double weighted(const std::function<double(double)>& f, int dim, double s) {
  return f(s) * std::pow(s, dim - 1);
}

}  // namespace

double Density::MassTable::cumulative(const std::function<double(double)>& f, double r) const {
  if (diverged) throw NonIntegrableError("density: profile not integrable near 0");
  if (r <= 0.0 || support <= 0.0) return 0.0;
  if (r >= support) return below[0];
  const int j = std::min<int>(static_cast<int>(std::floor(std::log2(support / r))),
                              static_cast<int>(increment.size()) - 1);
  const double s_hi = support * std::pow(2.0, -j);
  const double s_lo = 0.5 * s_hi;
  if (j >= static_cast<int>(increment.size()) - 1 && r < s_lo) {
    // Below table resolution: extrapolate the observed power law.
    const double base = below[increment.size()];
    if (base <= 0.0) return 0.0;
    return base * std::pow(r / s_lo, tail_exponent);
  }
  const double lo_cum = below[j + 1];
  const int n = dim;
  return lo_cum + quad::integrate([&](double s) { return weighted(f, n, s); },
                                  std::min(s_lo, r), r);
}

void Density::build_table() {
  const auto* prof = std::get_if<RadialProfile>(&body_);
  if (prof == nullptr) return;
  auto table = std::make_shared<MassTable>();
  table->support = prof->support_radius;
  table->dim = dim_;
  const auto& f = prof->value;
  const int n = dim_;

  double hi = prof->support_radius;
  double sum = 0.0;
  double prev = -1.0;
  double ratio = 0.0;
  int grow_count = 0;
  for (int j = 0; j < kTableMax; ++j) {
    const double lo = 0.5 * hi;
    const double inc = quad::integrate([&](double s) { return weighted(f, n, s); }, lo, hi);
    table->increment.push_back(inc);
    sum += inc;
    if (prev > 0.0 && inc > 0.0) {
      ratio = inc / prev;
      grow_count = (ratio >= 1.0 - 1e-9) ? grow_count + 1 : 0;
      if (grow_count >= 10 && inc > 1e-300) {
        table->diverged = true;
        table->divergence_ratio = ratio;
        break;
      }
    }
    prev = inc;
    hi = lo;
    if (sum > 0.0 && inc >= 0.0 && inc <= 1e-17 * sum && ratio <= 0.9) break;
    if (hi < 1e-280) break;
  }
  if (!table->diverged) {
    const double r = std::clamp(ratio, 0.0, 0.95);
    const double last = table->increment.empty() ? 0.0 : table->increment.back();
    table->tail = last * r / (1.0 - r);
    table->tail_exponent = (r > 0.0 && r < 1.0) ? -std::log2(r) : static_cast<double>(n);
    // Cumulative-from-below sums.
    table->below.assign(table->increment.size() + 1, 0.0);
    table->below[table->increment.size()] = table->tail;
    for (int j = static_cast<int>(table->increment.size()) - 1; j >= 0; --j)
      table->below[j] = table->below[j + 1] + table->increment[j];
  }
  table_ = std::move(table);
}

Density::Density() : dim_(3), body_(BumpSum{}) { label_ = "zero"; }

Density::Density(int dim, RadialProfile profile) : dim_(dim), body_(std::move(profile)) {
  if (dim < 1) throw ConfigError("density: dim must be >= 1");
  const auto& prof = std::get<RadialProfile>(body_);
  if (!(prof.support_radius > 0.0) || !std::isfinite(prof.support_radius))
    throw ConfigError("density: radial profile needs a finite positive support radius");
  if (!prof.value) throw ConfigError("density: radial profile has no value function");
  for (double t : {0.9, 0.5, 0.1, 0.01})
    if (prof.value(t * prof.support_radius) < 0.0)
      throw ConfigError("density: radial profile takes negative values");
  label_ = prof.label;
  build_table();
}

Density::Density(int dim, BumpSum bumps) : dim_(dim), body_(std::move(bumps)) {
  if (dim < 1) throw ConfigError("density: dim must be >= 1");
  for (const auto& b : std::get<BumpSum>(body_).bumps) {
    if (static_cast<int>(b.center.size()) != dim)
      throw ConfigError("density: bump center dimension mismatch");
    if (b.radius < 0.0 || b.height < 0.0)
      throw ConfigError("density: bump radius and height must be nonnegative");
  }
  label_ = "bumps";
}

Density::Density(int dim, GridSamples grid) : dim_(dim), body_(std::move(grid)) {
  if (dim < 1) throw ConfigError("density: dim must be >= 1");
  const auto& g = std::get<GridSamples>(body_);
  if (static_cast<int>(g.corner.size()) != dim || static_cast<int>(g.shape.size()) != dim)
    throw ConfigError("density: grid corner/shape dimension mismatch");
  if (!(g.h > 0.0)) throw ConfigError("density: grid spacing must be positive");
  std::size_t cells = 1;
  for (int s : g.shape) {
    if (s <= 0) throw ConfigError("density: grid shape entries must be positive");
    cells *= static_cast<std::size_t>(s);
  }
  if (cells != g.values.size()) throw ConfigError("density: grid value count mismatch");
  for (double v : g.values)
    if (v < 0.0) throw ConfigError("density: grid samples must be nonnegative");
  label_ = "grid";
}

Density Density::zero(int dim) {
  Density d;
  d.dim_ = dim;
  d.body_ = BumpSum{};
  d.label_ = "zero";
  return d;
}

Density Density::sum_of(std::vector<Density> terms) {
  if (terms.empty()) throw ConfigError("density: empty sum");
  Density d;
  d.dim_ = terms.front().dim();
  for (const auto& t : terms)
    if (t.dim() != d.dim_) throw ConfigError("density: sum terms have mixed dimensions");
  d.label_ = "sum";
  d.body_ = std::move(terms);
  return d;
}

Density::Kind Density::kind() const {
  if (std::holds_alternative<RadialProfile>(body_)) return Kind::radial_profile;
  if (std::holds_alternative<BumpSum>(body_)) return Kind::bump_sum;
  if (std::holds_alternative<GridSamples>(body_)) return Kind::grid_samples;
  return Kind::sum;
}

const BumpSum& Density::bumps() const {
  const auto* b = std::get_if<BumpSum>(&body_);
  if (b == nullptr) throw std::logic_error("density: not a bump sum");
  return *b;
}

const RadialProfile& Density::radial() const {
  const auto* r = std::get_if<RadialProfile>(&body_);
  if (r == nullptr) throw std::logic_error("density: not a radial profile");
  return *r;
}

const std::vector<Density>& Density::terms() const {
  const auto* t = std::get_if<std::vector<Density>>(&body_);
  if (t == nullptr) throw std::logic_error("density: not a sum");
  return *t;
}

bool Density::is_zero() const {
  if (const auto* b = std::get_if<BumpSum>(&body_)) {
    for (const auto& bump : b->bumps)
      if (bump.height > 0.0 && bump.radius > 0.0) return false;
    return true;
  }
  return false;
}

double Density::radial_value(double r) const { return radial().value(r); }

double Density::value_at(const Point& x) const {
  switch (kind()) {
    case Kind::radial_profile: {
      const auto& prof = radial();
      const double r = norm(x);
      return r <= prof.support_radius ? prof.value(r) : 0.0;
    }
    case Kind::bump_sum: {
      double v = 0.0;
      for (const auto& b : bumps().bumps)
        if (dist(x, b.center) < b.radius) v += b.height;
      return v;
    }
    case Kind::grid_samples: {
      const auto& g = std::get<GridSamples>(body_);
      std::size_t flat = 0;
      for (int k = 0; k < dim_; ++k) {
        const double rel = (x[k] - g.corner[k]) / g.h;
        if (rel < 0.0 || rel >= g.shape[k]) return 0.0;
        flat = flat * g.shape[k] + static_cast<std::size_t>(rel);
      }
      return g.values[flat];
    }
    case Kind::sum: {
      double v = 0.0;
      for (const auto& t : terms()) v += t.value_at(x);
      return v;
    }
  }
  return 0.0;
}

double Density::radial_weighted_mass(double r0, double r1) const {
  const auto& prof = radial();
  const int n = dim_;
  r1 = std::min(r1, prof.support_radius);
  if (!(r1 > r0)) return 0.0;
  if (r0 <= 0.0) return table_->cumulative(prof.value, r1);
  // Away from 0 the band integral is finite even for divergent profiles;
  // integrate octave by octave instead of differencing cumulatives.
  double acc = 0.0;
  double lo = r0;
  while (lo < r1) {
    const double hi = std::min(r1, 2.0 * lo);
    acc += quad::integrate([&](double s) { return weighted(prof.value, n, s); }, lo, hi);
    lo = hi;
  }
  return acc;
}

namespace {

// Mass of a radial profile over a ball centered at distance d from the
// origin: full spheres for s <= r - d plus a cap-weighted band.
double offcenter_radial_mass(const Density& density, const RadialProfile& prof, int dim,
                             double d, double r) {
  const double area = geom::unit_sphere_area(dim);
  const double S = prof.support_radius;
  double mass = 0.0;
  if (r > d) mass += area * density.radial_weighted_mass(0.0, std::min(r - d, S));
  const double lo = std::abs(d - r);
  const double hi = std::min(d + r, S);
  if (hi <= lo) return mass;
  auto band = [&](double s) {
    const double cos_t = (d * d + s * s - r * r) / (2.0 * d * s);
    return prof.value(s) * std::pow(s, dim - 1) * geom::cap_fraction(dim, cos_t);
  };
  if (lo < 1e-13 * hi) {
    // Ball boundary passes through the singular point (d == r).
    mass += area * quad::integrate_to_zero(band, hi);
  } else {
    mass += area * quad::integrate_graded(band, lo, hi, 32);
  }
  return mass;
}

double grid_cell_fraction(const Point& center, double half, const Point& x, double r,
                          int depth) {
  const int dim = static_cast<int>(center.size());
  const double half_diag = half * std::sqrt(static_cast<double>(dim));
  const double d = dist(center, x);
  if (d + half_diag <= r) return 1.0;
  if (d - half_diag >= r) return 0.0;
  if (depth == 0) return d <= r ? 1.0 : 0.0;
  const int children = 1 << dim;
  double sum = 0.0;
  Point child(center.size());
  for (int c = 0; c < children; ++c) {
    for (int k = 0; k < dim; ++k)
      child[k] = center[k] + (((c >> k) & 1) != 0 ? 0.5 : -0.5) * half;
    sum += grid_cell_fraction(child, 0.5 * half, x, r, depth - 1);
  }
  return sum / children;
}

}  // namespace

double Density::ball_mass(const Point& x, double r) const {
  if (!(r > 0.0)) return 0.0;
  if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("ball_mass: point dimension mismatch");
  switch (kind()) {
    case Kind::radial_profile: {
      const auto& prof = radial();
      const double d = norm(x);
      if (d <= 1e-14 * std::max(r, prof.support_radius))
        return geom::unit_sphere_area(dim_) *
               radial_weighted_mass(0.0, std::min(r, prof.support_radius));
      return offcenter_radial_mass(*this, prof, dim_, d, r);
    }
    case Kind::bump_sum: {
      double sum = 0.0;
      for (const auto& b : bumps().bumps)
        sum += b.height * geom::ball_intersection_volume(dim_, dist(x, b.center), r, b.radius);
      return sum;
    }
    case Kind::grid_samples: {
      const auto& g = std::get<GridSamples>(body_);
      const double cell_vol = std::pow(g.h, dim_);
      double sum = 0.0;
      std::vector<int> idx(dim_, 0);
      Point center(dim_);
      for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        if (g.values[flat] > 0.0) {
          std::size_t rest = flat;
          for (int k = dim_ - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(rest % g.shape[k]);
            rest /= g.shape[k];
          }
          for (int k = 0; k < dim_; ++k) center[k] = g.corner[k] + g.h * (idx[k] + 0.5);
          const double frac = grid_cell_fraction(center, 0.5 * g.h, x, r, 4);
          sum += g.values[flat] * cell_vol * frac;
        }
      }
      return sum;
    }
    case Kind::sum: {
      double sum = 0.0;
      for (const auto& t : terms()) sum += t.ball_mass(x, r);
      return sum;
    }
  }
  return 0.0;
}

double Density::total_mass() const {
  switch (kind()) {
    case Kind::radial_profile:
      return geom::unit_sphere_area(dim_) *
             radial_weighted_mass(0.0, radial().support_radius);
    case Kind::bump_sum: {
      double sum = 0.0;
      for (const auto& b : bumps().bumps)
        sum += b.height * geom::unit_ball_volume(dim_) * std::pow(b.radius, dim_);
      return sum;
    }
    case Kind::grid_samples: {
      const auto& g = std::get<GridSamples>(body_);
      double sum = 0.0;
      for (double v : g.values) sum += v;
      return sum * std::pow(g.h, dim_);
    }
    case Kind::sum: {
      double sum = 0.0;
      for (const auto& t : terms()) sum += t.total_mass();
      return sum;
    }
  }
  return 0.0;
}

double Density::far_radius(const Point& x) const {
  switch (kind()) {
    case Kind::radial_profile:
      return norm(x) + radial().support_radius;
    case Kind::bump_sum: {
      double far = 0.0;
      for (const auto& b : bumps().bumps)
        if (b.height > 0.0) far = std::max(far, dist(x, b.center) + b.radius);
      return far;
    }
    case Kind::grid_samples: {
      const auto& g = std::get<GridSamples>(body_);
      const double half_diag = 0.5 * g.h * std::sqrt(static_cast<double>(dim_));
      double far = 0.0;
      std::vector<int> idx(dim_, 0);
      Point center(dim_);
      for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        if (g.values[flat] > 0.0) {
          std::size_t rest = flat;
          for (int k = dim_ - 1; k >= 0; --k) {
            idx[k] = static_cast<int>(rest % g.shape[k]);
            rest /= g.shape[k];
          }
          for (int k = 0; k < dim_; ++k) center[k] = g.corner[k] + g.h * (idx[k] + 0.5);
          far = std::max(far, dist(x, center) + half_diag);
        }
      }
      return far;
    }
    case Kind::sum: {
      double far = 0.0;
      for (const auto& t : terms()) far = std::max(far, t.far_radius(x));
      return far;
    }
  }
  return 0.0;
}

double Density::support_radius() const { return far_radius(origin(dim_)); }

std::vector<double> Density::radial_breakpoints(const Point& x) const {
  std::vector<double> out;
  switch (kind()) {
    case Kind::radial_profile: {
      const double d = norm(x);
      const double S = radial().support_radius;
      out = {std::abs(d - S), d + S};
      if (d > 0.0) out.push_back(d);  // profile singularity crossing
      break;
    }
    case Kind::bump_sum: {
      for (const auto& b : bumps().bumps) {
        if (b.height <= 0.0 || b.radius <= 0.0) continue;
        const double d = dist(x, b.center);
        out.push_back(std::abs(d - b.radius));
        out.push_back(d + b.radius);
      }
      break;
    }
    case Kind::grid_samples:
      break;  // cell-level kinks are below quadrature resolution anyway
    case Kind::sum: {
      for (const auto& t : terms()) {
        const auto sub = t.radial_breakpoints(x);
        out.insert(out.end(), sub.begin(), sub.end());
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Density Density::power(double e) const {
  if (!(e > 0.0)) throw std::invalid_argument("density power: exponent must be positive");
  switch (kind()) {
    case Kind::radial_profile: {
      RadialProfile prof = radial();
      auto base = prof.value;
      prof.value = [base, e](double r) { return std::pow(base(r), e); };
      prof.label = label_ + "^" + std::to_string(e);
      return Density(dim_, std::move(prof));
    }
    case Kind::bump_sum: {
      const auto& bs = bumps().bumps;
      for (std::size_t i = 0; i < bs.size(); ++i)
        for (std::size_t j = i + 1; j < bs.size(); ++j) {
          const double gap = dist(bs[i].center, bs[j].center) - bs[i].radius - bs[j].radius;
          if (gap < -1e-12 * std::max(bs[i].radius, bs[j].radius))
            throw std::invalid_argument(
                "density power: bump supports overlap; pointwise power not a bump sum");
        }
      BumpSum out;
      out.bumps = bs;
      for (auto& b : out.bumps) b.height = std::pow(b.height, e);
      return Density(dim_, std::move(out));
    }
    case Kind::grid_samples: {
      GridSamples g = std::get<GridSamples>(body_);
      for (auto& v : g.values) v = std::pow(v, e);
      return Density(dim_, std::move(g));
    }
    case Kind::sum:
      throw std::invalid_argument("density power: apply powers before summing");
  }
  throw std::logic_error("density power: unknown kind");
}

Density Density::dilated(double lambda) const {
  if (!(lambda > 0.0)) throw std::invalid_argument("density dilated: lambda must be positive");
  switch (kind()) {
    case Kind::radial_profile: {
      RadialProfile prof = radial();
      auto base = prof.value;
      prof.value = [base, lambda](double r) { return base(r / lambda); };
      prof.support_radius *= lambda;
      return Density(dim_, std::move(prof));
    }
    case Kind::bump_sum: {
      BumpSum out = bumps();
      for (auto& b : out.bumps) {
        for (auto& c : b.center) c *= lambda;
        b.radius *= lambda;
      }
      return Density(dim_, std::move(out));
    }
    case Kind::grid_samples: {
      GridSamples g = std::get<GridSamples>(body_);
      for (auto& c : g.corner) c *= lambda;
      g.h *= lambda;
      return Density(dim_, std::move(g));
    }
    case Kind::sum: {
      std::vector<Density> out;
      for (const auto& t : terms()) out.push_back(t.dilated(lambda));
      return sum_of(std::move(out));
    }
  }
  throw std::logic_error("density dilated: unknown kind");
}

Density Density::times(double c) const {
  if (c < 0.0) throw std::invalid_argument("density times: factor must be nonnegative");
  switch (kind()) {
    case Kind::radial_profile: {
      RadialProfile prof = radial();
      auto base = prof.value;
      prof.value = [base, c](double r) { return c * base(r); };
      return Density(dim_, std::move(prof));
    }
    case Kind::bump_sum: {
      BumpSum out = bumps();
      for (auto& b : out.bumps) b.height *= c;
      return Density(dim_, std::move(out));
    }
    case Kind::grid_samples: {
      GridSamples g = std::get<GridSamples>(body_);
      for (auto& v : g.values) v *= c;
      return Density(dim_, std::move(g));
    }
    case Kind::sum: {
      std::vector<Density> out;
      for (const auto& t : terms()) out.push_back(t.times(c));
      return sum_of(std::move(out));
    }
  }
  throw std::logic_error("density times: unknown kind");
}

}  // namespace wolff
