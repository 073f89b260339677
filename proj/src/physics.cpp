// physics.cpp — geometry validation and coupling-constant formulas.
#include "dicke2q/physics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dicke2q/tolerances.hpp"

namespace dicke2q {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void validate(const Geometry& g) {
  require(std::isfinite(g.r12_over_lambda) && g.r12_over_lambda > 0.0,
          "Geometry: r12_over_lambda must be positive");
  require(std::isfinite(g.xi) && g.xi >= 0.0 && g.xi <= M_PI, "Geometry: xi must lie in [0, pi]");
  if (g.mode == OrientationMode::fixed_theta) {
    require(g.theta.has_value(), "Geometry: fixed_theta mode requires theta");
    require(std::isfinite(*g.theta), "Geometry: theta must be finite");
  } else {
    require(!g.theta.has_value(), "Geometry: theta is only meaningful in fixed_theta mode");
  }
}

void validate(const SystemParams& p) {
  require(std::isfinite(p.gamma) && p.gamma > 0.0, "SystemParams: gamma must be positive");
  require(std::isfinite(p.gamma12) && std::isfinite(p.omega12) && std::isfinite(p.phi) &&
              std::isfinite(p.omega0),
          "SystemParams: all rates must be finite");
  if (std::abs(p.gamma12) > p.gamma * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "SystemParams: |gamma12| = " << std::abs(p.gamma12) << " exceeds gamma = " << p.gamma
        << " (collective damping cannot exceed the single-emitter rate)";
    throw std::invalid_argument(msg.str());
  }
}

Couplings coupling_random_orientation(double k0r, double gamma) {
  require(std::isfinite(k0r) && k0r > 0.0, "coupling_random_orientation: k0r must be positive");
  require(std::isfinite(gamma) && gamma > 0.0,
          "coupling_random_orientation: gamma must be positive");
  const double x = k0r;
  return {gamma * std::sin(x) / x, -gamma * std::cos(x) / x};
}

Couplings coupling_fixed_theta(double k0r, double theta, double gamma) {
  require(std::isfinite(k0r) && k0r > 0.0, "coupling_fixed_theta: k0r must be positive");
  require(std::isfinite(theta), "coupling_fixed_theta: theta must be finite");
  require(std::isfinite(gamma) && gamma > 0.0, "coupling_fixed_theta: gamma must be positive");
  const double x = k0r;
  const double c2 = std::cos(theta) * std::cos(theta);
  const double sx = std::sin(x), cx = std::cos(x);
  const double perp = 1.0 - c2;        // transverse dipole weight
  const double axial = 1.0 - 3.0 * c2; // near-field weight (vanishes at the magic angle)
  Couplings out;
  out.omega12 = 1.5 * gamma * (axial * (sx / (x * x) + cx / (x * x * x)) - perp * sx / x);
  out.gamma12 = 1.5 * gamma * (perp * sx / x + axial * (cx / (x * x) - sx / (x * x * x)));
  return out;
}

double excitation_phase(const Geometry& g) {
  validate(g);
  return 2.0 * M_PI * g.r12_over_lambda * std::cos(g.xi);
}

double level_shift(const SystemParams& p) { return p.omega12 * std::cos(p.phi); }

SystemParams params_from_geometry(const Geometry& g, double gamma, double omega0) {
  validate(g);
  require(std::isfinite(gamma) && gamma > 0.0, "params_from_geometry: gamma must be positive");
  const double k0r = 2.0 * M_PI * g.r12_over_lambda;
  if (k0r < tol::min_k0r) {
    std::ostringstream msg;
    msg << "params_from_geometry: k0*r12 = " << k0r << " is below " << tol::min_k0r
        << "; emitters this close are outside the model's validity";
    throw std::invalid_argument(msg.str());
  }
  const Couplings c = (g.mode == OrientationMode::fixed_theta)
                          ? coupling_fixed_theta(k0r, *g.theta, gamma)
                          : coupling_random_orientation(k0r, gamma);
  SystemParams p;
  p.gamma = gamma;
  p.gamma12 = c.gamma12;
  p.omega12 = c.omega12;
  p.phi = excitation_phase(g);
  p.omega0 = omega0;
  validate(p);
  return p;
}

}  // namespace dicke2q
