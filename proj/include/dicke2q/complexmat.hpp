// complexmat.hpp — dense 4x4 complex linear algebra over Eigen: adjoints, products,
// norms, and validated eigenvalue routines for general and Hermitian matrices.
#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>

#include "dicke2q/tolerances.hpp"

namespace dicke2q {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;  // (i, j) indexes row i, column j
using Matrix2 = Eigen::Matrix2cd;

// ---- elementary operations ----

// Conjugate transpose. Throws std::invalid_argument on non-finite input.
Matrix4 hermitian_conjugate(const Matrix4& m);

// Matrix product a * b. Throws std::invalid_argument on non-finite input.
Matrix4 matmul(const Matrix4& a, const Matrix4& b);

Complex trace(const Matrix4& m);

// Largest entry magnitude (max-abs norm); the norm used in every tolerance bound here.
double max_abs(const Matrix4& m);

// max-abs of m - m^dagger.
double hermiticity_defect(const Matrix4& m);

bool is_finite(const Matrix4& m);

// ---- eigenvalues ----

// Eigenvalues of a general complex matrix, sorted by descending real part (ties by
// descending imaginary part).  Each returned root satisfies
// |det(m - lambda*I)| <= tol::eig_residual * max_abs(m)^4; a root that fails this
// bound, or a non-converged iteration, raises std::runtime_error naming the matrix
// norm and the offending residual.
std::array<Complex, 4> eigenvalues_general(const Matrix4& m);

// Eigenvalues of a Hermitian matrix, sorted descending.  Requires
// hermiticity_defect(m) < tol::hermitian_input (else std::invalid_argument).
// The eigenvalue sum reproduces trace(m) within tol::eig_trace_sum.
std::array<double, 4> eigenvalues_hermitian(const Matrix4& m);

// Smallest eigenvalue of a (nearly) Hermitian matrix; used for positivity checks.
// The input is symmetrised as (m + m^dagger) / 2 first.
double min_eigenvalue_hermitian(const Matrix4& m);

}  // namespace dicke2q
