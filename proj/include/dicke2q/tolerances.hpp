// tolerances.hpp — shared numerical tolerances used by both the library and its tests.
#pragma once

namespace dicke2q::tol {

// ---- linear algebra ----
inline constexpr double eig_residual = 1e-9;      // |det(m - lambda*I)| <= eig_residual * ||m||^4
inline constexpr double hermitian_input = 1e-10;  // max-abs defect allowed for "Hermitian" inputs
inline constexpr double eig_trace_sum = 1e-10;    // sum of Hermitian eigenvalues vs trace

// ---- density-matrix state invariants ----
inline constexpr double state_hermitian = 1e-10;  // max-abs of rho - rho^dagger
inline constexpr double state_trace = 1e-10;      // |trace(rho) - 1|
inline constexpr double state_min_eig = -1e-8;    // eigenvalue floor for positivity
inline constexpr double invariant_failure_factor = 10.0;  // in-flight violation => hard failure

// ---- entanglement ----
inline constexpr double block_offdiag = 1e-9;     // max-abs allowed outside the X-pattern block
inline constexpr double eig_clamp = 1e-7;         // spin-flip spectrum: clamp window for tiny
                                                  // negative reals / imaginary parts

// ---- geometry and couplings ----
inline constexpr double min_k0r = 1e-6;           // reject nearly coincident emitters
inline constexpr double coupling_singularity = 1e-6;  // |gamma12 - gamma| < this * gamma is
                                                      // singular for the hyperbolic closed form

// ---- conformance ----
inline constexpr double analytic_agreement = 1e-6;  // closed form vs integrator
inline constexpr double zero_concurrence = 1e-6;    // "dead" threshold for event detection

}  // namespace dicke2q::tol
