// complexmat.cpp — Eigen-backed implementations of the 4x4 complex matrix layer.
#include "dicke2q/complexmat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dicke2q {

namespace {

void require_finite(const Matrix4& m, const char* who) {
  if (!is_finite(m)) {
    throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace

Matrix4 hermitian_conjugate(const Matrix4& m) {
  require_finite(m, "hermitian_conjugate");
  return m.adjoint();
}

Matrix4 matmul(const Matrix4& a, const Matrix4& b) {
  require_finite(a, "matmul");
  require_finite(b, "matmul");
  return a * b;
}

Complex trace(const Matrix4& m) { return m.trace(); }

double max_abs(const Matrix4& m) { return m.cwiseAbs().maxCoeff(); }

double hermiticity_defect(const Matrix4& m) { return max_abs(m - m.adjoint()); }

bool is_finite(const Matrix4& m) {
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Complex v = m(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
  }
  return true;
}

std::array<Complex, 4> eigenvalues_general(const Matrix4& m) {
  require_finite(m, "eigenvalues_general");
  Eigen::ComplexEigenSolver<Matrix4> solver(m, /*computeEigenvectors=*/false);
  const double norm = max_abs(m);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "eigenvalues_general: iteration did not converge (max-abs norm " << norm << ")";
    throw std::runtime_error(msg.str());
  }
  std::array<Complex, 4> eigs;
  for (int i = 0; i < 4; ++i) eigs[static_cast<size_t>(i)] = solver.eigenvalues()(i);

  // Validate every root against the characteristic polynomial.
  const double bound = tol::eig_residual * norm * norm * norm * norm;
  for (const Complex& lambda : eigs) {
    const double residual = std::abs((m - lambda * Matrix4::Identity()).determinant());
    if (residual > bound) {
      std::ostringstream msg;
      msg << "eigenvalues_general: root " << lambda << " has residual " << residual
          << " exceeding " << bound << " (max-abs norm " << norm << ")";
      throw std::runtime_error(msg.str());
    }
  }
  std::sort(eigs.begin(), eigs.end(), [](const Complex& a, const Complex& b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  return eigs;
}

std::array<double, 4> eigenvalues_hermitian(const Matrix4& m) {
  require_finite(m, "eigenvalues_hermitian");
  const double defect = hermiticity_defect(m);
  if (defect >= tol::hermitian_input) {
    std::ostringstream msg;
    msg << "eigenvalues_hermitian: input is not Hermitian (defect " << defect << ", allowed "
        << tol::hermitian_input << ")";
    throw std::invalid_argument(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(0.5 * (m + m.adjoint()),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues_hermitian: iteration did not converge");
  }
  std::array<double, 4> eigs;
  for (int i = 0; i < 4; ++i) eigs[static_cast<size_t>(i)] = solver.eigenvalues()(3 - i);

  const double sum = eigs[0] + eigs[1] + eigs[2] + eigs[3];
  const double tr = trace(m).real();
  if (std::abs(sum - tr) > tol::eig_trace_sum * std::max(1.0, std::abs(tr))) {
    std::ostringstream msg;
    msg << "eigenvalues_hermitian: eigenvalue sum " << sum << " does not reproduce trace " << tr;
    throw std::runtime_error(msg.str());
  }
  return eigs;
}

double min_eigenvalue_hermitian(const Matrix4& m) {
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(0.5 * (m + m.adjoint()),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("min_eigenvalue_hermitian: iteration did not converge");
  }
  return solver.eigenvalues()(0);
}

}  // namespace dicke2q
