#include <cmath>
#include <random>

#include "wolff/elliptic.hpp"

namespace wolff {

namespace {

// Quartic bump on (-1, 1).
double eta(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  const double w = 1.0 - a * a;
  return w * w;
}

double eta_slope(double t) {
  const double a = std::abs(t);
  if (a >= 1.0) return 0.0;
  return -4.0 * t * (1.0 - a * a);
}

}  // namespace

std::vector<ThetaFunction> make_theta_family(int count, double R, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<ThetaFunction> family;
  family.reserve(count);

  int made = 0;
  while (made < count) {
    const int kind = made % 4;
    ThetaFunction theta;
    switch (kind) {
      case 0: {  // centered polynomial bump
        const int k = 1 + static_cast<int>(unit(rng) * 3.0);
        const double S = R * (0.85 + 0.1 * unit(rng));
        theta.kind = ThetaFunction::Kind::radial;
        theta.label = "poly_" + std::to_string(made);
        theta.support = S;
        theta.value = [S, k](double r) {
          const double t = r / S;
          return t < 1.0 ? std::pow(1.0 - t * t, k) : 0.0;
        };
        theta.slope = [S, k](double r) {
          const double t = r / S;
          if (t >= 1.0) return 0.0;
          return -2.0 * k * t / S * std::pow(1.0 - t * t, k - 1);
        };
        break;
      }
      case 1: {  // shifted radial bump
        const double w = R * (0.08 + 0.17 * unit(rng));
        const double c = unit(rng) * (0.95 * R - w);
        theta.kind = ThetaFunction::Kind::radial;
        theta.label = "shell_" + std::to_string(made);
        theta.support = c + w;
        theta.value = [c, w](double r) { return eta((r - c) / w); };
        theta.slope = [c, w](double r) { return eta_slope((r - c) / w) / w; };
        break;
      }
      case 2: {  // oscillatory profile vanishing at R
        const int m = 2 + static_cast<int>(unit(rng) * 4.0);
        const double phase = unit(rng) * 3.14159265358979;
        theta.kind = ThetaFunction::Kind::radial;
        theta.label = "osc_" + std::to_string(made);
        theta.support = R;
        theta.value = [m, phase, R](double r) {
          const double t = r / R;
          return std::sin(m * 3.14159265358979 * t + phase) * (1.0 - t * t);
        };
        theta.slope = [m, phase, R](double r) {
          const double t = r / R;
          const double pi = 3.14159265358979;
          return (m * pi / R) * std::cos(m * pi * t + phase) * (1.0 - t * t) -
                 (2.0 * t / R) * std::sin(m * pi * t + phase);
        };
        break;
      }
      default: {  // off-center bump
        const double d = R * (0.2 + 0.4 * unit(rng));
        const double w = std::min(R * (0.1 + 0.2 * unit(rng)), 0.95 * R - d);
        if (w <= 0.02 * R) continue;
        theta.kind = ThetaFunction::Kind::offcenter;
        theta.label = "offcenter_" + std::to_string(made);
        theta.support = w;
        theta.center_dist = d;
        theta.value = [w](double s) { return eta(s / w); };
        theta.slope = [w](double s) { return eta_slope(s / w) / w; };
        break;
      }
    }
    family.push_back(std::move(theta));
    ++made;
  }
  return family;
}

}  // namespace wolff
