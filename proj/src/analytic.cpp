#include "dicke2q/analytic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dicke2q/tolerances.hpp"

namespace dicke2q {

namespace {

void require_nonnegative_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("time must be finite and nonnegative");
  }
}

// Shared preconditions of the two mixed-state closed forms.
void check_mixed_domain(const MixedInitialSpec& spec, const SystemParams& p) {
  validate(spec);
  validate(p);
  if (std::abs(spec.b - 1.0) > 1e-12 || std::abs(spec.c - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "mixed-state closed form requires b = c = 1; use the ODE route for general "
        "weights");
  }
  if (std::abs(p.phi) > 1e-12) {
    throw std::invalid_argument(
        "mixed-state closed form is valid only at zero excitation phase; use the ODE "
        "route");
  }
  if (std::abs(std::abs(p.gamma12) - p.gamma) < tol::coupling_singularity * p.gamma) {
    throw std::invalid_argument(
        "mixed-state closed form is singular at |gamma12| = gamma (vanishing "
        "denominators); use the ODE route");
  }
}

double eta1(double g, double k, double t) {
  const double denom = k * k - g * g;
  return (g * g + k * k) / denom * std::sinh(2.0 * k * t) +
         2.0 * g * k / denom * (std::exp(-2.0 * g * t) - std::cosh(2.0 * k * t));
}

// eta2_sign = -1 reproduces the reference expression exactly; +1 is the repaired
// population sum (doubly excited + symmetric + antisymmetric).
double eta2(double g, double k, double a, double chi, double t, double eta2_sign) {
  const double denom = k * k - g * g;
  return a / 3.0 * std::exp(-4.0 * g * t) +
         2.0 / 3.0 * std::exp(-2.0 * g * t) *
             (std::cosh(2.0 * k * t) - std::cos(chi) * std::sinh(2.0 * k * t) +
              a * (g * g + k * k) / denom *
                  (std::exp(-2.0 * g * t) - std::cosh(2.0 * k * t)) +
              eta2_sign * a * 2.0 * g * k / denom * std::sinh(2.0 * k * t));
}

double mixed_channel(double t, const MixedInitialSpec& spec, const SystemParams& p,
                     bool corrected) {
  const double g = p.gamma, k = p.gamma12, w = p.omega12;
  const double a = spec.a, chi = spec.chi;
  const double first =
      std::cos(chi) * std::cosh(2.0 * k * t) - std::sinh(2.0 * k * t) + a * eta1(g, k, t);
  const double sin2 = std::sin(chi) * std::sin(chi);
  const double cos_w = std::cos(2.0 * w * t);
  const double second = corrected ? sin2 * cos_w * cos_w : sin2 * std::cosh(2.0 * w * t);
  const double e2 = eta2(g, k, a, chi, t, corrected ? 1.0 : -1.0);
  const double c1 = 2.0 / 3.0 * std::exp(-2.0 * g * t) *
                    (std::sqrt(first * first + second) - std::sqrt(3.0 * a * (1.0 - e2)));
  if (std::isnan(c1)) return c1;  // out-of-domain result must stay visible
  return std::max(0.0, c1);
}

}  // namespace

void validate(const MixedInitialSpec& spec) {
  if (!std::isfinite(spec.a) || !std::isfinite(spec.b) || !std::isfinite(spec.c) ||
      !std::isfinite(spec.chi)) {
    throw std::invalid_argument("mixed initial spec contains non-finite values");
  }
  if (spec.a < 0.0 || spec.a > 1.0) {
    throw std::invalid_argument("mixed initial spec requires a in [0, 1]");
  }
  if (spec.b < 0.0 || spec.c < 0.0) {
    throw std::invalid_argument("mixed initial spec requires b >= 0 and c >= 0");
  }
  if (std::abs((1.0 + spec.b + spec.c) / 3.0 - 1.0) > 1e-12) {
    throw std::invalid_argument(
        "mixed initial spec violates the normalization (1 + b + c)/3 = 1");
  }
}

BareState build_mixed_initial(const MixedInitialSpec& spec) {
  validate(spec);
  BareState s;
  s.rho(0, 0) = spec.a / 3.0;
  s.rho(1, 1) = spec.b / 3.0;
  s.rho(2, 2) = spec.c / 3.0;
  s.rho(1, 2) = std::sqrt(spec.b * spec.c) * std::exp(Complex{0.0, 1.0} * spec.chi) / 3.0;
  s.rho(2, 1) = std::conj(s.rho(1, 2));
  s.rho(3, 3) = (1.0 - spec.a) / 3.0;
  validate(s);
  return s;
}

double symmetric_concurrence_nophase(double t, double gamma, double gamma12) {
  require_nonnegative_time(t);
  return std::max(0.0, std::exp(-2.0 * (gamma + gamma12) * t));
}

double symmetric_concurrence_phase(double t, const SystemParams& p) {
  require_nonnegative_time(t);
  validate(p);
  const double decay = std::cos(p.phi) * std::cosh(2.0 * p.gamma12 * t) -
                       std::sinh(2.0 * p.gamma12 * t);
  const double osc = std::sin(p.phi) * std::cos(2.0 * p.omega12 * t);
  return std::max(0.0, std::exp(-2.0 * p.gamma * t) *
                           std::sqrt(decay * decay + osc * osc));
}

double mixed_concurrence_nophase(double t, const MixedInitialSpec& spec,
                                 const SystemParams& p) {
  require_nonnegative_time(t);
  check_mixed_domain(spec, p);
  return mixed_channel(t, spec, p, /*corrected=*/false);
}

double mixed_concurrence_nophase_corrected(double t, const MixedInitialSpec& spec,
                                           const SystemParams& p) {
  require_nonnegative_time(t);
  check_mixed_domain(spec, p);
  return mixed_channel(t, spec, p, /*corrected=*/true);
}

double yu_eberly_limit(double t, double a, double gamma) {
  require_nonnegative_time(t);
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("independent-atom limit requires a in [0, 1]");
  }
  const double alpha2 = 1.0 - std::exp(-2.0 * gamma * t);
  const double inner = a * (1.0 - a + 2.0 * alpha2 + alpha2 * alpha2 * a);
  return std::max(0.0, 2.0 / 3.0 * std::exp(-2.0 * gamma * t) * (1.0 - std::sqrt(inner)));
}

}  // namespace dicke2q
