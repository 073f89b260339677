#include "dicke2q/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dicke2q/tolerances.hpp"

namespace dicke2q {

namespace {

double sqrt_clamped(double x) { return std::sqrt(std::max(0.0, x)); }

[[noreturn]] void throw_not_block(double worst) {
  std::ostringstream msg;
  msg << "state is not of block form: off-block element of magnitude " << worst
      << " exceeds " << tol::block_offdiag;
  throw std::invalid_argument(msg.str());
}

double worst_off_block(const Matrix4& rho) {
  return std::max({std::abs(rho(0, 1)), std::abs(rho(0, 2)), std::abs(rho(1, 0)),
                   std::abs(rho(2, 0)), std::abs(rho(1, 3)), std::abs(rho(3, 1)),
                   std::abs(rho(2, 3)), std::abs(rho(3, 2))});
}

}  // namespace

Matrix4 spin_flip(const Matrix4& rho_bare) {
  Matrix4 yy = Matrix4::Zero();  // sigma_y x sigma_y is the signed antidiagonal
  yy(0, 3) = -1.0;
  yy(1, 2) = 1.0;
  yy(2, 1) = 1.0;
  yy(3, 0) = -1.0;
  return yy * rho_bare.conjugate() * yy;
}

double concurrence_general(const BareState& s) {
  const Matrix4 product = s.rho * spin_flip(s.rho);
  const std::array<Complex, 4> eigs = eigenvalues_general(product);

  double roots[4];
  for (int i = 0; i < 4; ++i) {
    const double re = eigs[i].real();
    const double im = eigs[i].imag();
    if (std::abs(im) > tol::eig_clamp || re < -tol::eig_clamp) {
      std::ostringstream msg;
      msg << "spin-flip spectrum is not that of a density matrix: eigenvalue (" << re
          << ", " << im << ") outside the real nonnegative axis by more than "
          << tol::eig_clamp;
      throw std::invalid_argument(msg.str());
    }
    roots[i] = std::sqrt(std::max(0.0, re));
  }
  std::sort(roots, roots + 4, std::greater<double>());
  return std::max(0.0, roots[0] - roots[1] - roots[2] - roots[3]);
}

bool is_block_form(const Matrix4& rho, double tolerance) {
  return worst_off_block(rho) <= tolerance;
}

double concurrence_block(const BareState& s) {
  const double worst = worst_off_block(s.rho);
  if (worst > tol::block_offdiag) throw_not_block(worst);
  const Matrix4& r = s.rho;
  const double c1 =
      2.0 * (std::abs(r(1, 2)) - sqrt_clamped(r(0, 0).real() * r(3, 3).real()));
  const double c2 =
      2.0 * (std::abs(r(0, 3)) - sqrt_clamped(r(1, 1).real() * r(2, 2).real()));
  return std::max({0.0, c1, c2});
}

namespace {

std::pair<double, double> dicke_channels(const Matrix4& r) {
  const double ss = r(1, 1).real();
  const double aa = r(2, 2).real();
  const double diff = ss - aa;
  const double im_as = r(2, 1).imag();
  const double re_as = r(2, 1).real();
  const double c1 = std::sqrt(diff * diff + 4.0 * im_as * im_as) -
                    2.0 * sqrt_clamped(r(0, 0).real() * r(3, 3).real());
  const double sum = ss + aa;
  const double c2 = 2.0 * std::abs(r(0, 3)) - sqrt_clamped(sum * sum - 4.0 * re_as * re_as);
  return {c1, c2};
}

}  // namespace

double concurrence_dicke(const DickeState& s) {
  const double worst = worst_off_block(s.rho);
  if (worst > tol::block_offdiag) throw_not_block(worst);
  const auto [c1, c2] = dicke_channels(s.rho);
  return std::max({0.0, c1, c2});
}

ConcurrenceBreakdown concurrence_breakdown(const DickeState& s) {
  const double worst = worst_off_block(s.rho);
  if (worst > tol::block_offdiag) throw_not_block(worst);
  ConcurrenceBreakdown out;
  std::tie(out.c1, out.c2) = dicke_channels(s.rho);
  out.c = std::max({0.0, out.c1, out.c2});

  const BareState bare = from_dicke(s);
  const std::array<Complex, 4> eigs = eigenvalues_general(bare.rho * spin_flip(bare.rho));
  for (int i = 0; i < 4; ++i) out.sqrt_eigenvalues[i] = sqrt_clamped(eigs[i].real());
  std::sort(out.sqrt_eigenvalues.begin(), out.sqrt_eigenvalues.end(),
            std::greater<double>());
  return out;
}

void attach_concurrence(Trajectory& traj) {
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const DickeState& s = traj.states[i];
    if (is_block_form(s.rho, tol::block_offdiag)) {
      traj.derived[i].concurrence = concurrence_dicke(s);
    } else {
      traj.derived[i].concurrence = concurrence_general(from_dicke(s));
    }
  }
}

}  // namespace dicke2q
