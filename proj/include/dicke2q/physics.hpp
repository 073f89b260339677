// physics.hpp — emitter-pair geometry and the vacuum-mediated coupling constants.
//
// Two identical two-level emitters sit a distance r12 apart in a common vacuum.
// Their separation (in wavelengths) and the angle xi between the separation axis
// and the wavevector of the exciting pulse determine
//   * gamma12  — the collective (cross-emitter) damping rate,
//   * omega12  — the dipole-dipole level shift strength,
//   * phi      — the excitation phase k0 . (r1 - r2) imprinted by the pulse.
// All rates are in units of the single-emitter half-width gamma.
#pragma once

#include <optional>

namespace dicke2q {

enum class OrientationMode {
  random_orientation,  // dipole orientation averaged out (isotropic form)
  fixed_theta,         // dipoles at a fixed angle theta to the separation axis
};

struct Geometry {
  double r12_over_lambda = 0.125;  // emitter separation in units of the wavelength
  double xi = 0.0;                 // angle between pulse wavevector and separation axis, [0, pi]
  OrientationMode mode = OrientationMode::random_orientation;
  std::optional<double> theta;     // required iff mode == fixed_theta
};

struct Couplings {
  double gamma12 = 0.0;  // collective damping (|gamma12| <= gamma)
  double omega12 = 0.0;  // coherent dipole-dipole coupling
};

struct SystemParams {
  double gamma = 1.0;    // single-emitter damping rate (scale of all other rates)
  double gamma12 = 0.0;
  double omega12 = 0.0;
  double phi = 0.0;      // excitation phase k0 . (r1 - r2)
  double omega0 = 0.0;   // bare transition frequency (irrelevant to populations)
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const Geometry& g);
void validate(const SystemParams& p);

// Orientation-averaged couplings: gamma12 = gamma sin(k0r)/k0r,
// omega12 = -gamma cos(k0r)/k0r.  Requires k0r > 0.
Couplings coupling_random_orientation(double k0r, double gamma);

// Fixed-orientation couplings for dipoles at angle theta to the separation axis
// (the full retarded dipole-dipole form with 1/x, 1/x^2, 1/x^3 terms).
Couplings coupling_fixed_theta(double k0r, double theta, double gamma);

// phi = 2 pi (r12/lambda) cos(xi).
double excitation_phase(const Geometry& g);

// Effective shift of the symmetric/antisymmetric levels: +/- omega12 cos(phi).
double level_shift(const SystemParams& p);

// Compose geometry -> couplings + phase into a validated parameter set.
// Rejects k0r below tol::min_k0r (nearly coincident emitters).
SystemParams params_from_geometry(const Geometry& g, double gamma, double omega0 = 0.0);

}  // namespace dicke2q
