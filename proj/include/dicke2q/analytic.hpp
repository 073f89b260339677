// analytic.hpp — closed-form concurrence expressions used as oracles for the ODE
// integration: collective decay of the symmetric state with and without excitation
// phase, the phase-free mixed initial state, and the independent-atom limit.
#pragma once

#include "dicke2q/dynamics.hpp"
#include "dicke2q/physics.hpp"

namespace dicke2q {

// One-parameter family of initial states: doubly excited weight a/3, single-
// excitation weights b/3 and c/3 with coherence sqrt(bc) e^{i chi}/3, ground
// weight (1-a)/3.
struct MixedInitialSpec {
  double a = 0.6;
  double b = 1.0;
  double c = 1.0;
  double chi = 0.0;  // radians
};

// Requires a in [0,1], b >= 0, c >= 0 and the normalization (1+b+c)/3 = 1
// within 1e-12; throws std::invalid_argument naming the violated condition.
void validate(const MixedInitialSpec& spec);

// The density matrix described above, validated as a proper state.
BareState build_mixed_initial(const MixedInitialSpec& spec);

// exp(-2 (gamma + gamma12) t): concurrence of the symmetric Bell state under
// collective decay with zero excitation phase.
double symmetric_concurrence_nophase(double t, double gamma, double gamma12);

// exp(-2 gamma t) sqrt((cos(phi) cosh(2 gamma12 t) - sinh(2 gamma12 t))^2
//                      + sin^2(phi) cos^2(2 omega12 t)), clamped at 0.
// Exact for evolution of the symmetric Bell state at excitation phase phi
// (conformance-verified against the integrator to ~3e-12).
double symmetric_concurrence_phase(double t, const SystemParams& p);

// Reference closed form for the mixed initial state (b = c = 1 family) at zero
// excitation phase, kept exactly in its original form for conformance checks.
// Known defects, established by the ODE comparisons and documented in the README:
// a hyperbolic factor where a squared cosine belongs, and a sign error in the
// population term eta2.  As a consequence the expression deviates from the
// integrated dynamics immediately and leaves its real domain (returned as NaN —
// never masked by the clamp) at a parameter-dependent onset time.
// Throws near |gamma12| = gamma where its denominators vanish (use the ODE route),
// for b != 1 or c != 1, and for a nonzero excitation phase.
double mixed_concurrence_nophase(double t, const MixedInitialSpec& spec,
                                 const SystemParams& p);

// Same quantity with the two defects repaired: sin^2(chi) cos^2(2 omega12 t) in
// place of the hyperbolic factor, and the sign of the final eta2 term flipped.
// Matches the integrated dynamics to ~3e-11 over the conformance grid.
double mixed_concurrence_nophase_corrected(double t, const MixedInitialSpec& spec,
                                           const SystemParams& p);

// Independent-atom limit (gamma12 = omega12 = 0) of the mixed-state concurrence:
// (2/3) exp(-2 gamma t) (1 - sqrt(a (1 - a + 2 alpha^2 + alpha^4 a))) with
// alpha^2 = 1 - exp(-2 gamma t), clamped at 0.  Independent of chi.
double yu_eberly_limit(double t, double a, double gamma);

}  // namespace dicke2q
