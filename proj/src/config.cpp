#include "wolff/config.hpp"

#include <cmath>

#include "wolff/errors.hpp"

namespace wolff::cfg {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config: " + path + ": " + what);
}

const Json& need(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) fail(path, "missing key '" + key + "'");
  return j.at(key);
}

}  // namespace

double need_num(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number()) fail(path, "key '" + key + "' must be a number");
  return v.get<double>();
}

double num_or(const Json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError("config: key '" + key + "' must be a number");
  return j.at(key).get<double>();
}

int need_int(const Json& j, const std::string& key, const std::string& path) {
  const Json& v = need(j, key, path);
  if (!v.is_number_integer()) fail(path, "key '" + key + "' must be an integer");
  return v.get<int>();
}

int int_or(const Json& j, const std::string& key, int fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer())
    throw ConfigError("config: key '" + key + "' must be an integer");
  return j.at(key).get<int>();
}

std::string str_or(const Json& j, const std::string& key, const std::string& fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ConfigError("config: key '" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

Density density(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  const std::string kind = str_or(j, "kind", "");
  if (kind == "zero") {
    return Density::zero(need_int(j, "dim", path));
  }
  if (kind == "radial") {
    const int dim = need_int(j, "dim", path);
    const std::string profile = str_or(j, "profile", "constant");
    const double amp = num_or(j, "amplitude", 1.0);
    const double support = need_num(j, "support_radius", path);
    RadialProfile prof;
    prof.support_radius = support;
    prof.label = profile;
    if (profile == "constant") {
      prof.value = [amp](double) { return amp; };
    } else if (profile == "power") {
      const double s = need_num(j, "exponent", path);
      prof.value = [amp, s](double r) { return amp * std::pow(r, -s); };
    } else if (profile == "power_log") {
      const double s = need_num(j, "exponent", path);
      const double alpha = need_num(j, "log_exponent", path);
      if (!(support < 1.0)) fail(path, "power_log profiles need support_radius < 1");
      prof.value = [amp, s, alpha](double r) {
        if (r <= 0.0 || r >= 1.0) return 0.0;
        return amp * std::pow(r, -s) * std::pow(std::log(1.0 / r), -alpha);
      };
    } else {
      fail(path, "unknown profile '" + profile + "'");
    }
    return Density(dim, std::move(prof));
  }
  if (kind == "bumps") {
    const int dim = need_int(j, "dim", path);
    const Json& list = need(j, "bumps", path);
    if (!list.is_array()) fail(path, "'bumps' must be an array");
    BumpSum bumps;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string sub = path + ".bumps[" + std::to_string(i) + "]";
      const Json& b = list.at(i);
      Bump bump;
      const Json& c = need(b, "center", sub);
      if (!c.is_array() || static_cast<int>(c.size()) != dim)
        fail(sub, "'center' must be an array of length dim");
      for (const auto& v : c) bump.center.push_back(v.get<double>());
      bump.radius = need_num(b, "radius", sub);
      bump.height = need_num(b, "height", sub);
      bumps.bumps.push_back(std::move(bump));
    }
    return Density(dim, std::move(bumps));
  }
  if (kind == "grid") {
    const int dim = need_int(j, "dim", path);
    GridSamples g;
    const Json& corner = need(j, "corner", path);
    for (const auto& v : corner) g.corner.push_back(v.get<double>());
    g.h = need_num(j, "h", path);
    for (const auto& v : need(j, "shape", path)) g.shape.push_back(v.get<int>());
    for (const auto& v : need(j, "values", path)) g.values.push_back(v.get<double>());
    return Density(dim, std::move(g));
  }
  if (kind == "sum") {
    const Json& list = need(j, "terms", path);
    std::vector<Density> terms;
    for (std::size_t i = 0; i < list.size(); ++i)
      terms.push_back(density(list.at(i), path + ".terms[" + std::to_string(i) + "]"));
    return Density::sum_of(std::move(terms));
  }
  fail(path, "unknown density kind '" + kind + "'");
}

QuadratureSpec quadrature(const Json& j, const std::string& path) {
  QuadratureSpec spec;
  if (j.is_null()) return spec;
  spec.radial_nodes = int_or(j, "radial_nodes", spec.radial_nodes);
  spec.dyadic_depth = int_or(j, "dyadic_depth", spec.dyadic_depth);
  spec.abs_tol = num_or(j, "abs_tol", spec.abs_tol);
  spec.rel_tol = num_or(j, "rel_tol", spec.rel_tol);
  if (spec.dyadic_depth < 8) fail(path, "dyadic_depth must be >= 8");
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0)) fail(path, "tolerances must be positive");
  return spec;
}

RadialGrid radial_grid(const Json& j, const std::string& path) {
  RadialGrid grid;
  grid.R = need_num(j, "R", path);
  grid.n_nodes = int_or(j, "n_nodes", grid.n_nodes);
  const std::string spacing = str_or(j, "spacing", "uniform");
  if (spacing == "uniform") {
    grid.spacing = RadialGrid::Spacing::uniform;
  } else if (spacing == "log_refined") {
    grid.spacing = RadialGrid::Spacing::log_refined;
    grid.r_min = num_or(j, "r_min", 0.0);
  } else {
    fail(path, "spacing must be 'uniform' or 'log_refined'");
  }
  return grid;
}

StructureCoefficients coefficients(const Json& j, const std::string& path) {
  StructureCoefficients coeffs;
  coeffs.p = need_num(j, "p", path);
  coeffs.c0 = num_or(j, "c0", 1.0);
  coeffs.c1 = num_or(j, "c1", 1.0);
  const int dim = need_int(j, "dim", path);
  auto get = [&](const char* name) {
    if (j.contains(name)) return density(j.at(name), path + "." + name);
    return Density::zero(dim);
  };
  coeffs.f = get("f");
  coeffs.g = get("g");
  coeffs.f1 = get("f1");
  coeffs.g1 = get("g1");
  coeffs.f2 = get("f2");
  coeffs.g2 = get("g2");
  coeffs.validate();
  return coeffs;
}

VectorFieldSpec field(const Json& j, const std::string& path) {
  VectorFieldSpec spec;
  const std::string kind = str_or(j, "kind", "pure");
  if (kind == "pure") {
    spec.kind = VectorFieldSpec::Kind::pure_p_laplacian;
  } else if (kind == "tabulated") {
    spec.kind = VectorFieldSpec::Kind::user_tabulated;
    spec.tab_x0 = need_num(j, "tab_x0", path);
    spec.tab_x1 = need_num(j, "tab_x1", path);
    for (const auto& v : need(j, "weight_values", path))
      spec.tab_values.push_back(v.get<double>());
  } else {
    fail(path, "field kind must be 'pure' or 'tabulated'");
  }
  spec.p = need_num(j, "p", path);
  spec.c0 = num_or(j, "c0", 1.0);
  spec.c1 = num_or(j, "c1", 1.0);
  const double eps = need_num(j, "eps", path);
  return regularize(spec, eps);
}

SpaceTimeGrid spacetime(const Json& j, const std::string& path) {
  SpaceTimeGrid grid;
  const Json& g = need(j, "geometry", path);
  const std::string kind = str_or(g, "kind", "radial");
  if (kind == "radial") {
    grid.space.kind = Geometry1D::Kind::radial;
    grid.space.dim = need_int(g, "dim", path + ".geometry");
    grid.space.x_lo = 0.0;
  } else if (kind == "interval") {
    grid.space.kind = Geometry1D::Kind::interval;
    grid.space.dim = 1;
    grid.space.x_lo = need_num(g, "x_lo", path + ".geometry");
  } else {
    fail(path + ".geometry", "kind must be 'radial' or 'interval'");
  }
  grid.space.x_hi = need_num(g, "x_hi", path + ".geometry");
  grid.space.n_cells = need_int(g, "n_cells", path + ".geometry");

  const Json& t = need(j, "time", path);
  grid.time.t0 = need_num(t, "t0", path + ".time");
  grid.time.t1 = need_num(t, "t1", path + ".time");
  grid.time.dt0 = need_num(t, "dt0", path + ".time");
  grid.time.dt_min = num_or(t, "dt_min", 1e-12);
  grid.time.dt_max = num_or(t, "dt_max", grid.time.t1 - grid.time.t0);
  grid.time.growth = num_or(t, "growth", 1.2);
  grid.theta = num_or(j, "theta", 1.0);
  return grid;
}

ScalarFn named_profile(const Json& j, const Geometry1D& geom, const std::string& path) {
  if (j.is_null()) return {};
  if (j.is_string() && j.get<std::string>() == "zero")
    return [](double) { return 0.0; };
  if (!j.is_object()) fail(path, "expected 'zero' or an object");
  const std::string kind = str_or(j, "kind", "zero");
  if (kind == "zero") return [](double) { return 0.0; };
  if (kind == "constant") {
    const double v = need_num(j, "value", path);
    return [v](double) { return v; };
  }
  if (kind == "fourier") {
    const int mode = int_or(j, "mode", 1);
    const double amp = num_or(j, "amplitude", 1.0);
    const double lo = geom.x_lo;
    const double len = geom.x_hi - geom.x_lo;
    return [mode, amp, lo, len](double x) {
      return amp * std::sin(mode * 3.14159265358979323846 * (x - lo) / len);
    };
  }
  if (kind == "barenblatt") {
    // Source-type solution of u_t = (|u_x|^{p-2} u_x)_x on the line,
    // evaluated at t_ref; used as initial data for tracking runs.
    const double p = need_num(j, "p", path);
    const double C = need_num(j, "C", path);
    const double t_ref = num_or(j, "t_ref", 1.0);
    const double alpha = 1.0 / (2.0 * p - 2.0);  // N = 1
    const double kappa = (p - 2.0) / p * std::pow(alpha, 1.0 / (p - 1.0));
    const double expo = (p - 1.0) / (p - 2.0);
    return [=](double x) {
      const double xi = std::abs(x) * std::pow(t_ref, -alpha);
      const double w = C - kappa * std::pow(xi, p / (p - 1.0));
      return w > 0.0 ? std::pow(t_ref, -alpha) * std::pow(w, expo) : 0.0;
    };
  }
  fail(path, "unknown profile kind '" + kind + "'");
}

std::vector<Point> point_list(const Json& j, int dim, const std::string& path) {
  std::vector<Point> out;
  if (j.is_null()) return out;
  if (!j.is_array()) fail(path, "expected an array of points");
  for (std::size_t i = 0; i < j.size(); ++i) {
    const Json& p = j.at(i);
    if (!p.is_array() || static_cast<int>(p.size()) != dim)
      fail(path + "[" + std::to_string(i) + "]", "point has wrong dimension");
    Point pt;
    for (const auto& v : p) pt.push_back(v.get<double>());
    out.push_back(std::move(pt));
  }
  return out;
}

std::vector<double> radii_list(const Json& j, const std::string& path) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
  }
  if (j.is_object()) {
    const double r_max = need_num(j, "r_max", path);
    const double r_min = need_num(j, "r_min", path);
    const int count = need_int(j, "count", path);
    if (!(r_min > 0.0) || !(r_max > r_min) || count < 2)
      fail(path, "need 0 < r_min < r_max and count >= 2");
    const double q = std::log(r_min / r_max);
    for (int i = 0; i < count; ++i)
      out.push_back(r_max * std::exp(q * i / (count - 1.0)));
    return out;
  }
  fail(path, "expected an array of radii or {r_max, r_min, count}");
}

}  // namespace wolff::cfg
