#include "dicke2q/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "dicke2q/tolerances.hpp"

namespace dicke2q {

namespace {

constexpr Complex kI{0.0, 1.0};

double min_eigenvalue_of_symmetrized(const Matrix4& m) {
  const Matrix4 sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

[[noreturn]] void throw_invariant(const char* name, double value, double bound, double time,
                                  bool in_flight) {
  std::ostringstream msg;
  msg << "state invariant violation (" << name << "): defect " << value
      << " exceeds bound " << bound;
  if (in_flight) {
    msg << " at t=" << time;
    throw std::runtime_error(msg.str());
  }
  throw std::invalid_argument(msg.str());
}

void check_state(const Matrix4& rho, double herm_tol, double trace_tol, double eig_floor,
                 double time, bool in_flight) {
  const StateDefects d = measure_defects(rho);
  if (!(d.hermiticity <= herm_tol)) {
    throw_invariant("Hermiticity", d.hermiticity, herm_tol, time, in_flight);
  }
  if (!(d.trace <= trace_tol)) {
    throw_invariant("trace", d.trace, trace_tol, time, in_flight);
  }
  if (!(d.min_eigenvalue >= eig_floor)) {
    throw_invariant("positivity", d.min_eigenvalue, eig_floor, time, in_flight);
  }
}

}  // namespace

StateDefects measure_defects(const Matrix4& rho) {
  StateDefects d;
  d.trace = std::abs(trace(rho) - Complex{1.0, 0.0});
  d.hermiticity = hermiticity_defect(rho);
  d.min_eigenvalue = min_eigenvalue_of_symmetrized(rho);
  return d;
}

void validate(const DickeState& s) {
  if (!is_finite(s.rho)) throw std::invalid_argument("state contains non-finite entries");
  check_state(s.rho, tol::state_hermitian, tol::state_trace, tol::state_min_eig,
              0.0, /*in_flight=*/false);
}

void validate(const BareState& s) {
  if (!is_finite(s.rho)) throw std::invalid_argument("state contains non-finite entries");
  check_state(s.rho, tol::state_hermitian, tol::state_trace, tol::state_min_eig,
              0.0, /*in_flight=*/false);
}

const Matrix4& dicke_rotation() {
  static const Matrix4 u = [] {
    const double r = 1.0 / std::sqrt(2.0);
    Matrix4 m = Matrix4::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = r;
    m(1, 2) = r;
    m(2, 1) = r;
    m(2, 2) = -r;
    m(3, 3) = 1.0;
    return m;
  }();
  return u;
}

DickeState to_dicke(const BareState& s) {
  const Matrix4& u = dicke_rotation();
  return DickeState{u * s.rho * u.adjoint()};
}

BareState from_dicke(const DickeState& s) {
  const Matrix4& u = dicke_rotation();
  return BareState{u.adjoint() * s.rho * u};
}

Matrix4 dicke_rhs(const DickeState& s, const SystemParams& p) {
  const Matrix4& r = s.rho;
  const double g = p.gamma;
  const double k = p.gamma12;
  const double w = p.omega12;
  const double c = std::cos(p.phi);
  const double sn = std::sin(p.phi);
  const double w0 = p.omega0;

  // i*sin(phi)*(gamma12 +/- i*omega12): the coupling between the symmetric and
  // antisymmetric channels that the excitation phase switches on.
  const Complex xp = kI * sn * Complex{k, w};   // i sin(phi) (gamma12 + i omega12)
  const Complex xm = kI * sn * Complex{k, -w};  // i sin(phi) (gamma12 - i omega12)

  const Complex ee = r(0, 0), es = r(0, 1), ea = r(0, 2), eg = r(0, 3);
  const Complex se = r(1, 0), ss = r(1, 1), sa = r(1, 2);
  const Complex ae = r(2, 0), as = r(2, 1), aa = r(2, 2);
  const Complex gs = r(3, 1), ga = r(3, 2);

  Matrix4 d;
  d(0, 0) = -4.0 * g * ee;
  d(0, 1) = -(3.0 * g + k * c + kI * (w0 - w * c)) * es + xm * ea;
  d(0, 2) = -(3.0 * g - k * c + kI * (w0 + w * c)) * ea + xp * es;
  d(0, 3) = -2.0 * (g + kI * w0) * eg;
  d(1, 1) = -2.0 * (g + k * c) * ss - xp * as + xm * sa + 2.0 * (g + k * c) * ee;
  d(2, 2) = -2.0 * (g - k * c) * aa - xm * as + xp * sa + 2.0 * (g - k * c) * ee;
  d(2, 1) = -2.0 * (g - kI * w * c) * as + xp * ss + xm * aa - 2.0 * kI * k * sn * ee;
  d(3, 1) = -(g + k * c - kI * (w0 + w * c)) * gs + xm * ga + 2.0 * (g + k * c) * se +
            2.0 * kI * k * sn * ae;
  d(3, 2) = -(g - k * c - kI * (w0 - w * c)) * ga - xm * gs - 2.0 * (g - k * c) * ae +
            2.0 * kI * k * sn * se;
  d(3, 3) = 2.0 * (g + k * c) * ss + 2.0 * (g - k * c) * aa +
            2.0 * kI * k * sn * (as - r(1, 2));

  // The remaining six elements follow from Hermiticity of the density matrix.
  d(1, 0) = std::conj(d(0, 1));
  d(2, 0) = std::conj(d(0, 2));
  d(3, 0) = std::conj(d(0, 3));
  d(1, 2) = std::conj(d(2, 1));
  d(1, 3) = std::conj(d(3, 1));
  d(2, 3) = std::conj(d(3, 2));
  return d;
}

Matrix4 bare_liouvillian_rhs(const BareState& s, const SystemParams& p) {
  const Complex phase1 = std::exp(kI * (0.5 * p.phi));
  const Complex phase2 = std::exp(-kI * (0.5 * p.phi));

  // Lowering operators in the bare basis (|ee>, |eg>, |ge>, |gg>); the pulse
  // imprints opposite half phases on the two emitters.
  Matrix4 s1 = Matrix4::Zero();
  s1(2, 0) = phase1;
  s1(3, 1) = phase1;
  Matrix4 s2 = Matrix4::Zero();
  s2(1, 0) = phase2;
  s2(3, 2) = phase2;
  const Matrix4 s1d = s1.adjoint();
  const Matrix4 s2d = s2.adjoint();

  Matrix4 h = Matrix4::Zero();  // free evolution plus dipole-dipole shift
  h(0, 0) = p.omega0;
  h(3, 3) = -p.omega0;
  h += p.omega12 * (s1d * s2 + s2d * s1);

  // A = sum_ij gamma_ij sigma_i^dag sigma_j; the dissipator is
  // -(A rho + rho A) + 2 sum_ij gamma_ij sigma_j rho sigma_i^dag.
  const Matrix4 a = p.gamma * (s1d * s1 + s2d * s2) + p.gamma12 * (s1d * s2 + s2d * s1);

  const Matrix4& r = s.rho;
  Matrix4 d = -kI * (h * r - r * h) - (a * r + r * a);
  d += 2.0 * p.gamma * (s1 * r * s1d + s2 * r * s2d);
  d += 2.0 * p.gamma12 * (s2 * r * s1d + s1 * r * s2d);
  return d;
}

std::pair<double, double> decay_rates(const SystemParams& p) {
  const double shift = p.gamma12 * std::cos(p.phi);
  return {2.0 * (p.gamma + shift), 2.0 * (p.gamma - shift)};
}

namespace {

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights, for the embedded error estimate.
constexpr double kE1 = kB1 - 5179.0 / 57600.0;
constexpr double kE3 = kB3 - 7571.0 / 16695.0;
constexpr double kE4 = kB4 - 393.0 / 640.0;
constexpr double kE5 = kB5 + 92097.0 / 339200.0;
constexpr double kE6 = kB6 - 187.0 / 2100.0;
constexpr double kE7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kAlpha = 0.7 / 5.0;  // PI controller: current-error exponent
constexpr double kBeta = 0.4 / 5.0;   // PI controller: previous-error exponent
constexpr double kShrinkMin = 0.2, kGrowMax = 5.0;

double scaled_error_norm(const Matrix4& err, const Matrix4& y0, const Matrix4& y1,
                         double abs_tol, double rel_tol) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double scale_re =
          abs_tol + rel_tol * std::max(std::abs(y0(i, j).real()), std::abs(y1(i, j).real()));
      const double scale_im =
          abs_tol + rel_tol * std::max(std::abs(y0(i, j).imag()), std::abs(y1(i, j).imag()));
      const double er = err(i, j).real() / scale_re;
      const double ei = err(i, j).imag() / scale_im;
      sum += er * er + ei * ei;
    }
  }
  return std::sqrt(sum / 32.0);
}

// Quartic continuous extension of the 5(4) pair: coefficients of theta^1..theta^4
// per stage (stage 2 does not contribute).  Locally fifth-order accurate, so dense
// samples carry the same accuracy as the accepted steps themselves.
constexpr double kP[7][4] = {
    {1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0},
    {0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0},
    {0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0},
    {0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0},
    {0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0}};

Matrix4 dense_interpolate(double theta, double h, const Matrix4& y0,
                          const Matrix4* const stages[7]) {
  const double t1 = theta;
  const double t2 = t1 * theta;
  const double t3 = t2 * theta;
  const double t4 = t3 * theta;
  Matrix4 sum = Matrix4::Zero();
  for (int s = 0; s < 7; ++s) {
    if (s == 1) continue;
    const double w = kP[s][0] * t1 + kP[s][1] * t2 + kP[s][2] * t3 + kP[s][3] * t4;
    sum += w * (*stages[s]);
  }
  return y0 + h * sum;
}

void validate_config(const IntegratorConfig& cfg) {
  const bool ok = std::isfinite(cfg.rel_tol) && cfg.rel_tol > 0.0 &&
                  std::isfinite(cfg.abs_tol) && cfg.abs_tol > 0.0 &&
                  std::isfinite(cfg.max_step) && cfg.max_step > 0.0 &&
                  std::isfinite(cfg.t_max) && cfg.t_max > 0.0 &&
                  std::isfinite(cfg.output_dt) && cfg.output_dt > 0.0;
  if (!ok) {
    throw std::invalid_argument(
        "integrator config requires positive finite rel_tol, abs_tol, max_step, t_max, "
        "output_dt");
  }
  if (cfg.t_max / cfg.output_dt > 5e6) {
    throw std::invalid_argument("integrator config requests more than 5e6 output samples");
  }
}

DerivedSample derive_sample(const Matrix4& rho) {
  DerivedSample d;
  d.ee = rho(0, 0).real();
  d.ss = rho(1, 1).real();
  d.aa = rho(2, 2).real();
  d.gg = rho(3, 3).real();
  d.re_as = rho(2, 1).real();
  d.im_as = rho(2, 1).imag();
  d.abs_eg = std::abs(rho(0, 3));
  return d;
}

}  // namespace

Trajectory integrate(const DickeState& initial, const SystemParams& p,
                     const IntegratorConfig& cfg, RhsForm form) {
  validate_config(cfg);
  validate(p);
  validate(initial);

  const bool bare = (form == RhsForm::bare_liouvillian);
  const Matrix4& u = dicke_rotation();

  std::function<Matrix4(const Matrix4&)> rhs;
  if (bare) {
    rhs = [&p](const Matrix4& m) { return bare_liouvillian_rhs(BareState{m}, p); };
  } else {
    rhs = [&p](const Matrix4& m) { return dicke_rhs(DickeState{m}, p); };
  }

  const std::size_t n_samples =
      static_cast<std::size_t>(std::floor(cfg.t_max / cfg.output_dt + 1e-9)) + 1;
  const double t_target = static_cast<double>(n_samples - 1) * cfg.output_dt;

  Trajectory traj;
  traj.times.reserve(n_samples);
  traj.states.reserve(n_samples);
  traj.derived.reserve(n_samples);

  auto emit = [&](double t_sample, const Matrix4& m) {
    const Matrix4 rho_dicke = bare ? Matrix4(u * m * u.adjoint()) : m;
    if (cfg.validate_states) {
      check_state(rho_dicke, tol::invariant_failure_factor * tol::state_hermitian,
                  tol::invariant_failure_factor * tol::state_trace,
                  tol::invariant_failure_factor * tol::state_min_eig, t_sample,
                  /*in_flight=*/true);
    }
    traj.times.push_back(t_sample);
    traj.states.push_back(DickeState{rho_dicke});
    traj.derived.push_back(derive_sample(rho_dicke));
  };

  Matrix4 y = bare ? from_dicke(initial).rho : initial.rho;
  Matrix4 f = rhs(y);
  emit(0.0, y);

  double t = 0.0;
  double h = std::min(cfg.max_step, cfg.output_dt);
  double err_prev = 1e-4;
  std::size_t next = 1;

  while (next < n_samples) {
    h = std::min({h, cfg.max_step, t_target - t});
    if (!(h > 1e-14 * std::max(std::abs(t), 1.0))) {
      std::ostringstream msg;
      msg << "integration step size underflow (h=" << h << "); last good time t=" << t;
      throw std::runtime_error(msg.str());
    }

    const Matrix4& k1 = f;
    const Matrix4 k2 = rhs(y + h * (kA21 * k1));
    const Matrix4 k3 = rhs(y + h * (kA31 * k1 + kA32 * k2));
    const Matrix4 k4 = rhs(y + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
    const Matrix4 k5 = rhs(y + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
    const Matrix4 k6 =
        rhs(y + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
    const Matrix4 y_new = y + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
    const Matrix4 k7 = rhs(y_new);  // first-same-as-last: reused as k1 when accepted

    const Matrix4 err_mat =
        h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7);
    if (!is_finite(y_new) || !is_finite(err_mat)) {
      std::ostringstream msg;
      msg << "non-finite state produced by the right-hand side; last good time t=" << t;
      throw std::runtime_error(msg.str());
    }
    const double err = scaled_error_norm(err_mat, y, y_new, cfg.abs_tol, cfg.rel_tol);

    if (err <= 1.0) {
      const double t_new = t + h;
      const Matrix4* const stages[7] = {&k1, &k2, &k3, &k4, &k5, &k6, &k7};
      while (next < n_samples) {
        const double ts = static_cast<double>(next) * cfg.output_dt;
        if (ts > t_new + 1e-12 * std::max(1.0, t_new)) break;
        const double theta = std::clamp((ts - t) / h, 0.0, 1.0);
        emit(ts, dense_interpolate(theta, h, y, stages));
        ++next;
      }
      t = t_new;
      y = y_new;
      f = k7;
      const double grow = kSafety * std::pow(std::max(err, 1e-10), -kAlpha) *
                          std::pow(err_prev, kBeta);
      h *= std::clamp(grow, kShrinkMin, kGrowMax);
      err_prev = std::max(err, 1e-4);
    } else {
      h *= std::clamp(kSafety * std::pow(err, -0.2), 0.1, 1.0);
    }
  }

  return traj;
}

FormulationComparison compare_formulations(const DickeState& initial, const SystemParams& p,
                                           IntegratorConfig cfg, double tolerance) {
  cfg.validate_states = false;  // the comparison itself judges the runs
  const Trajectory via_dicke = integrate(initial, p, cfg, RhsForm::dicke_elementwise);
  const Trajectory via_bare = integrate(initial, p, cfg, RhsForm::bare_liouvillian);

  FormulationComparison result;
  result.worst_bare_defects.min_eigenvalue = std::numeric_limits<double>::infinity();

  const std::size_t n = std::min(via_dicke.times.size(), via_bare.times.size());
  bool diverged = false;
  for (std::size_t idx = 0; idx < n; ++idx) {
    const Matrix4& a = via_dicke.states[idx].rho;
    const Matrix4& b = via_bare.states[idx].rho;
    double sample_max = 0.0;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        const double dev = std::abs(a(i, j) - b(i, j));
        sample_max = std::max(sample_max, dev);
        if (dev > result.max_deviation) {
          result.max_deviation = dev;
          result.element_row = i;
          result.element_col = j;
        }
      }
    }
    const double phys = std::max({std::abs(a(0, 0) - b(0, 0)), std::abs(a(1, 1) - b(1, 1)),
                                  std::abs(a(2, 2) - b(2, 2)), std::abs(a(3, 3) - b(3, 3)),
                                  std::abs(a(2, 1) - b(2, 1)), std::abs(a(1, 2) - b(1, 2)),
                                  std::abs(a(0, 3) - b(0, 3)), std::abs(a(3, 0) - b(3, 0))});
    result.physical_sector_deviation = std::max(result.physical_sector_deviation, phys);

    if (!diverged && sample_max > tolerance) {
      diverged = true;
      result.first_divergence_time = via_dicke.times[idx];
    }

    const StateDefects d = measure_defects(b);
    result.worst_bare_defects.trace = std::max(result.worst_bare_defects.trace, d.trace);
    result.worst_bare_defects.hermiticity =
        std::max(result.worst_bare_defects.hermiticity, d.hermiticity);
    result.worst_bare_defects.min_eigenvalue =
        std::min(result.worst_bare_defects.min_eigenvalue, d.min_eigenvalue);
  }
  result.agrees = result.max_deviation <= tolerance;
  return result;
}

}  // namespace dicke2q
