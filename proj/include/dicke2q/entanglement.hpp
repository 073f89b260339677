// entanglement.hpp — pairwise entanglement measures for the two-emitter density
// matrix: the spin-flipped matrix, the concurrence via its eigenvalue definition,
// and closed forms for block ("X"-patterned) states in either basis.
#pragma once

#include <array>

#include "dicke2q/complexmat.hpp"
#include "dicke2q/dynamics.hpp"

namespace dicke2q {

// (sigma_y x sigma_y) conj(rho) (sigma_y x sigma_y), in the bare product basis.
Matrix4 spin_flip(const Matrix4& rho_bare);

// C = max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4)) with l_k the descending
// eigenvalues of rho * spin_flip(rho).  Eigenvalues must be real and nonnegative
// up to tol::eig_clamp; beyond that the input is rejected as not a density matrix.
double concurrence_general(const BareState& s);

// True when every element outside the block pattern (populations, the central
// single-excitation 2x2 block, and the corner coherence) is below `tolerance` in
// magnitude.  The pattern reads identically in the bare and Dicke bases.
bool is_block_form(const Matrix4& rho, double tolerance);

// Closed form for block states in the bare basis:
//   C1 = 2(|rho_23| - sqrt(rho_11 rho_44)),  C2 = 2(|rho_14| - sqrt(rho_22 rho_33)),
//   C  = max(0, C1, C2).
// Requires is_block_form within tol::block_offdiag.
double concurrence_block(const BareState& s);

// The same closed form rewritten in Dicke-basis elements:
//   C1 = sqrt((rho_ss - rho_aa)^2 + 4 Im(rho_as)^2) - 2 sqrt(rho_ee rho_gg)
//   C2 = 2|rho_eg| - sqrt((rho_ss + rho_aa)^2 - 4 Re(rho_as)^2)
// Requires is_block_form within tol::block_offdiag.
double concurrence_dicke(const DickeState& s);

struct ConcurrenceBreakdown {
  double c = 0.0;   // max(0, c1, c2)
  double c1 = 0.0;  // single-excitation channel
  double c2 = 0.0;  // two-photon-coherence channel
  std::array<double, 4> sqrt_eigenvalues{};  // descending, from the eigenvalue route
};

// Both channel values (Dicke closed form; block states only) together with the
// spin-flip eigenvalue spectrum of the same state for cross-validation.
ConcurrenceBreakdown concurrence_breakdown(const DickeState& s);

// Fill the concurrence field of every sample: closed form where the state is block,
// eigenvalue route otherwise.
void attach_concurrence(Trajectory& traj);

}  // namespace dicke2q
