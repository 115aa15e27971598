#pragma once

#include <string>

#include "wolff/elliptic.hpp"
#include "wolff/parabolic.hpp"
#include "wolff/report.hpp"
#include "wolff/wolff.hpp"

namespace wolff::cfg {

// All parsers throw ConfigError naming the offending key path.

Density density(const Json& j, const std::string& path = "density");
QuadratureSpec quadrature(const Json& j, const std::string& path = "quadrature");
RadialGrid radial_grid(const Json& j, const std::string& path = "grid");
StructureCoefficients coefficients(const Json& j, const std::string& path = "coefficients");
VectorFieldSpec field(const Json& j, const std::string& path = "field");
SpaceTimeGrid spacetime(const Json& j, const std::string& path);
ScalarFn named_profile(const Json& j, const Geometry1D& geom, const std::string& path);
std::vector<Point> point_list(const Json& j, int dim, const std::string& path);
std::vector<double> radii_list(const Json& j, const std::string& path);

double need_num(const Json& j, const std::string& key, const std::string& path);
double num_or(const Json& j, const std::string& key, double fallback);
int need_int(const Json& j, const std::string& key, const std::string& path);
int int_or(const Json& j, const std::string& key, int fallback);
std::string str_or(const Json& j, const std::string& key, const std::string& fallback);

}  // namespace wolff::cfg
