// dynamics.hpp — density-matrix states, the two equivalent equations of motion for
// the dissipative emitter pair, and an adaptive Runge-Kutta integrator.
//
// Basis conventions (both carry the excitation phases imprinted by the pulse):
//   Dicke basis, index order (|e>, |s>, |a>, |g>): doubly excited, symmetric,
//     antisymmetric, ground.
//   Bare basis, index order (|ee>, |eg>, |ge>, |gg>).
// The two are related by the fixed real rotation returned by dicke_rotation().
#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "dicke2q/complexmat.hpp"
#include "dicke2q/physics.hpp"

namespace dicke2q {

// ---- states ----

struct DickeState {
  Matrix4 rho = Matrix4::Zero();
};

struct BareState {
  Matrix4 rho = Matrix4::Zero();
};

struct StateDefects {
  double trace = 0.0;        // |trace(rho) - 1|
  double hermiticity = 0.0;  // max-abs of rho - rho^dagger
  double min_eigenvalue = 0.0;
};

StateDefects measure_defects(const Matrix4& rho);

// Throw std::invalid_argument naming the violated invariant (Hermiticity within
// tol::state_hermitian, unit trace within tol::state_trace, eigenvalues above
// tol::state_min_eig).
void validate(const DickeState& s);
void validate(const BareState& s);

// ---- basis change ----

// Rows are <e|, <s|, <a|, <g| expressed in the bare basis.
const Matrix4& dicke_rotation();

DickeState to_dicke(const BareState& s);
BareState from_dicke(const DickeState& s);

// ---- equations of motion ----

// Elementwise form: the ten independent matrix-element equations of the
// master equation written in the Dicke basis, closed under Hermitian conjugation.
Matrix4 dicke_rhs(const DickeState& s, const SystemParams& p);

// Operator form: mechanically built from the lowering operators of the two
// emitters (with excitation phases +phi/2 and -phi/2) and the Lindblad-type
// dissipator with rates {gamma, gamma12}; no per-element transcription involved.
Matrix4 bare_liouvillian_rhs(const BareState& s, const SystemParams& p);

enum class RhsForm {
  dicke_elementwise,  // CLI name: eq11
  bare_liouvillian,   // CLI name: eq1
};

// ---- integration ----

struct IntegratorConfig {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double max_step = 0.01;   // in the same time unit as t_max (1/gamma when gamma == 1)
  double t_max = 6.0;
  double output_dt = 0.01;
  bool validate_states = true;  // in-flight invariant checks at 10x the state tolerances
};

struct DerivedSample {
  double ee = 0.0, ss = 0.0, aa = 0.0, gg = 0.0;  // Dicke populations
  double re_as = 0.0, im_as = 0.0;                // symmetric/antisymmetric coherence
  double abs_eg = 0.0;                            // two-photon coherence magnitude
  double concurrence = std::numeric_limits<double>::quiet_NaN();  // see attach_concurrence
};

struct Trajectory {
  std::vector<double> times;        // multiples of output_dt, starting at 0
  std::vector<DickeState> states;   // always reported in the Dicke basis
  std::vector<DerivedSample> derived;
};

// Integrate the chosen formulation from a validated initial state.  Adaptive
// Dormand-Prince 5(4) with PI step-size control; output samples are produced by
// the method's quartic continuous extension between accepted steps.  Throws
//   std::invalid_argument  on an invalid initial state or config,
//   std::runtime_error     on step-size underflow (message carries the last good
//                          time) or an in-flight invariant violation beyond 10x
//                          the state tolerances (message names invariant and time).
Trajectory integrate(const DickeState& initial, const SystemParams& p,
                     const IntegratorConfig& cfg, RhsForm form);

// Collective decay rates of the symmetric/antisymmetric channels:
// {2(gamma + gamma12 cos phi), 2(gamma - gamma12 cos phi)}.
std::pair<double, double> decay_rates(const SystemParams& p);

// ---- formulation cross-check ----

struct FormulationComparison {
  double max_deviation = 0.0;        // max-abs over all elements and sample times
  double first_divergence_time = std::numeric_limits<double>::quiet_NaN();
  int element_row = -1, element_col = -1;  // where the max deviation occurred
  double physical_sector_deviation = 0.0;  // populations, as-coherence, eg-coherence only
  StateDefects worst_bare_defects;   // invariant quality of the operator-form run
  bool agrees = false;               // max_deviation <= tolerance used by the caller
};

// Run both formulations from the same initial state and compare elementwise in the
// Dicke basis.  In-flight validation is disabled for the elementwise form (the
// comparison itself is the judge); the operator form is always defect-measured.
FormulationComparison compare_formulations(const DickeState& initial, const SystemParams& p,
                                           IntegratorConfig cfg, double tolerance);

}  // namespace dicke2q
