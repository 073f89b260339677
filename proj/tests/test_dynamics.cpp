#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>

#include "dicke2q/complexmat.hpp"
#include "dicke2q/dynamics.hpp"
#include "dicke2q/physics.hpp"
#include "test_support.hpp"

using namespace dicke2q;

namespace {

const Complex kI{0.0, 1.0};

SystemParams reference_params() {
  SystemParams p;
  p.gamma = 1.0;
  p.gamma12 = 0.6;
  p.omega12 = -0.5;
  p.phi = 0.7;
  p.omega0 = 0.0;
  return p;
}

DickeState pure_dicke(int idx) {
  DickeState s;
  s.rho(idx, idx) = 1.0;
  return s;
}

// Mixed bare-basis initial state: doubly excited weight a/3, a single-excitation
// block with coherence e^{i chi}, ground weight (1-a)/3.
BareState mixed_bare_initial(double a, double chi) {
  BareState s;
  s.rho(0, 0) = a / 3.0;
  s.rho(1, 1) = 1.0 / 3.0;
  s.rho(2, 2) = 1.0 / 3.0;
  s.rho(1, 2) = std::exp(kI * chi) / 3.0;
  s.rho(2, 1) = std::conj(s.rho(1, 2));
  s.rho(3, 3) = (1.0 - a) / 3.0;
  return s;
}

double max_abs_diff(const Matrix4& x, const Matrix4& y) { return max_abs(x - y); }

}  // namespace

TEST_SUITE("basis change") {
  TEST_CASE("rotation is unitary and involutive on the single-excitation block") {
    const Matrix4& u = dicke_rotation();
    CHECK(max_abs_diff(u * u.adjoint(), Matrix4::Identity()) < 1e-15);
    CHECK(max_abs_diff(u, u.adjoint()) < 1e-15);  // real symmetric rotation
  }

  TEST_CASE("round trip is exact to rounding") {
    testsup::ComplexNormal rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix4 m = rng.matrix();
      CHECK(max_abs_diff(from_dicke(to_dicke(BareState{m})).rho, m) < 1e-14);
      CHECK(max_abs_diff(to_dicke(from_dicke(DickeState{m})).rho, m) < 1e-14);
    }
  }

  TEST_CASE("symmetric Bell state maps to the symmetric population") {
    BareState bell;
    bell.rho(1, 1) = 0.5;
    bell.rho(2, 2) = 0.5;
    bell.rho(1, 2) = 0.5;
    bell.rho(2, 1) = 0.5;
    const DickeState d = to_dicke(bell);
    CHECK(std::abs(d.rho(1, 1) - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(d.rho(2, 2)) < 1e-15);
    CHECK(std::abs(d.rho(2, 1)) < 1e-15);
  }

  TEST_CASE("mixed initial state has the expected Dicke elements") {
    const DickeState d = to_dicke(mixed_bare_initial(0.6, M_PI / 2.0));
    CHECK(std::abs(d.rho(0, 0) - Complex{0.2, 0.0}) < 1e-15);
    CHECK(std::abs(d.rho(1, 1) - Complex{1.0 / 3.0, 0.0}) < 1e-15);
    CHECK(std::abs(d.rho(2, 2) - Complex{1.0 / 3.0, 0.0}) < 1e-15);
    CHECK(std::abs(d.rho(2, 1) - kI / 3.0) < 1e-15);
    CHECK(std::abs(d.rho(3, 3) - Complex{0.4 / 3.0, 0.0}) < 1e-15);

    const DickeState d0 = to_dicke(mixed_bare_initial(0.6, 0.0));
    CHECK(std::abs(d0.rho(1, 1) - Complex{2.0 / 3.0, 0.0}) < 1e-15);
    CHECK(std::abs(d0.rho(2, 2)) < 1e-15);
  }
}

TEST_SUITE("state validation") {
  TEST_CASE("defect measurement and accepted states") {
    DickeState ok = pure_dicke(3);
    CHECK_NOTHROW(validate(ok));
    const StateDefects d = measure_defects(ok.rho);
    CHECK(d.trace < 1e-15);
    CHECK(d.hermiticity < 1e-15);
    CHECK(d.min_eigenvalue == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("violations are named") {
    DickeState bad_trace;
    bad_trace.rho(0, 0) = 0.9;
    CHECK_THROWS_WITH_AS(validate(bad_trace), doctest::Contains("trace"),
                         std::invalid_argument);

    DickeState bad_herm = pure_dicke(0);
    bad_herm.rho(0, 1) = 0.1;  // no conjugate partner
    CHECK_THROWS_WITH_AS(validate(bad_herm), doctest::Contains("Hermiticity"),
                         std::invalid_argument);

    DickeState bad_pos;
    bad_pos.rho(0, 0) = 1.1;
    bad_pos.rho(1, 1) = 0.1;
    bad_pos.rho(2, 2) = -0.2;
    CHECK_THROWS_WITH_AS(validate(bad_pos), doctest::Contains("positivity"),
                         std::invalid_argument);
  }
}

TEST_SUITE("equations of motion") {
  TEST_CASE("elementwise form on the doubly excited state") {
    const SystemParams p = reference_params();
    const double c = std::cos(p.phi), sn = std::sin(p.phi);
    const Matrix4 d = dicke_rhs(pure_dicke(0), p);
    CHECK(std::abs(d(0, 0) - Complex{-4.0, 0.0}) < 1e-15);
    CHECK(std::abs(d(1, 1) - Complex{2.0 * (1.0 + 0.6 * c), 0.0}) < 1e-15);
    CHECK(std::abs(d(2, 2) - Complex{2.0 * (1.0 - 0.6 * c), 0.0}) < 1e-15);
    CHECK(std::abs(d(2, 1) - (-2.0 * kI * 0.6 * sn)) < 1e-15);
    CHECK(std::abs(d(3, 3)) < 1e-15);
    CHECK(std::abs(d(0, 3)) < 1e-15);
  }

  TEST_CASE("elementwise form on the symmetric state") {
    const SystemParams p = reference_params();
    const double c = std::cos(p.phi), sn = std::sin(p.phi);
    const Matrix4 d = dicke_rhs(pure_dicke(1), p);
    const double gp = 2.0 * (1.0 + 0.6 * c);
    CHECK(std::abs(d(1, 1) - Complex{-gp, 0.0}) < 1e-15);
    CHECK(std::abs(d(3, 3) - Complex{gp, 0.0}) < 1e-15);
    CHECK(std::abs(d(2, 1) - kI * sn * Complex{0.6, -0.5}) < 1e-15);
    CHECK(std::abs(d(1, 2) - std::conj(d(2, 1))) < 1e-15);
  }

  TEST_CASE("both forms conserve trace and Hermiticity for random states") {
    const SystemParams p = reference_params();
    testsup::ComplexNormal rng(77);
    for (int trial = 0; trial < 30; ++trial) {
      const Matrix4 rho = rng.density();
      const Matrix4 d1 = dicke_rhs(DickeState{rho}, p);
      const Matrix4 d2 = bare_liouvillian_rhs(BareState{rho}, p);
      CHECK(std::abs(trace(d1)) < 1e-14);
      CHECK(std::abs(trace(d2)) < 1e-14);
      CHECK(hermiticity_defect(d1) < 1e-14);
      CHECK(hermiticity_defect(d2) < 1e-14);
    }
  }

  TEST_CASE("the two forms differ only in the excited-coherence coupling term") {
    // On states with vanishing coherences between the doubly excited level and the
    // single-excitation pair, the forms agree exactly.  With such a coherence
    // switched on (and phi != 0), the difference is confined to that element and
    // equals 2i*gamma12*sin(phi) times the coherence.
    const SystemParams p = reference_params();
    const Matrix4& u = dicke_rotation();

    Matrix4 rho = Matrix4::Zero();
    rho(0, 0) = 0.4;
    rho(1, 1) = 0.3;
    rho(2, 2) = 0.2;
    rho(3, 3) = 0.1;
    rho(0, 1) = Complex{0.05, -0.02};  // excited<->symmetric coherence
    rho(1, 0) = std::conj(rho(0, 1));

    const Matrix4 d_elem = dicke_rhs(DickeState{rho}, p);
    const Matrix4 bare_d = bare_liouvillian_rhs(from_dicke(DickeState{rho}), p);
    const Matrix4 d_oper = u * bare_d * u.adjoint();
    const Matrix4 diff = d_elem - d_oper;

    const Complex expected = 2.0 * kI * p.gamma12 * std::sin(p.phi) * rho(0, 1);
    CHECK(std::abs(diff(0, 2) - expected) < 1e-15);
    CHECK(std::abs(diff(2, 0) - std::conj(expected)) < 1e-15);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if ((i == 0 && j == 2) || (i == 2 && j == 0)) continue;
        CAPTURE(i);
        CAPTURE(j);
        CHECK(std::abs(diff(i, j)) < 1e-15);
      }
    }
  }

  TEST_CASE("forms agree exactly when the phase vanishes") {
    SystemParams p = reference_params();
    p.phi = 0.0;
    const Matrix4& u = dicke_rotation();
    testsup::ComplexNormal rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix4 rho = rng.density();
      const Matrix4 d_elem = dicke_rhs(DickeState{rho}, p);
      const Matrix4 bare_d = bare_liouvillian_rhs(from_dicke(DickeState{rho}), p);
      CHECK(max_abs_diff(d_elem, u * bare_d * u.adjoint()) < 1e-14);
    }
  }

  TEST_CASE("collective decay rates") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.phi = 0.0;
    auto [plus, minus] = decay_rates(p);
    CHECK(plus == doctest::Approx(3.8).epsilon(1e-14));
    CHECK(minus == doctest::Approx(0.2).epsilon(1e-14));
    p.phi = M_PI / 2.0;
    std::tie(plus, minus) = decay_rates(p);
    CHECK(plus == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(minus == doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_SUITE("integration") {
  TEST_CASE("doubly excited population decays at four gamma") {
    SystemParams p = reference_params();
    IntegratorConfig cfg;
    cfg.t_max = 2.0;
    const Trajectory traj = integrate(pure_dicke(0), p, cfg, RhsForm::dicke_elementwise);
    REQUIRE(traj.times.size() == 201);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(2.0).epsilon(1e-12));
    for (std::size_t i = 0; i < traj.times.size(); i += 20) {
      const double expected = std::exp(-4.0 * traj.times[i]);
      CHECK(std::abs(traj.derived[i].ee - expected) < 1e-10);
    }
  }

  TEST_CASE("two-photon coherence rotates at twice the transition frequency") {
    SystemParams p = reference_params();
    p.omega0 = 3.0;
    DickeState init;
    init.rho(0, 0) = 0.5;
    init.rho(3, 3) = 0.5;
    init.rho(0, 3) = 0.5;
    init.rho(3, 0) = 0.5;
    IntegratorConfig cfg;
    cfg.t_max = 1.0;
    const Trajectory traj = integrate(init, p, cfg, RhsForm::dicke_elementwise);
    const std::size_t i = 50;  // t = 0.5
    const Complex expected = 0.5 * std::exp(-2.0 * (1.0 + kI * 3.0) * traj.times[i]);
    CHECK(std::abs(traj.states[i].rho(0, 3) - expected) < 1e-9);
    CHECK(std::abs(traj.derived[i].abs_eg - std::abs(expected)) < 1e-9);
  }

  TEST_CASE("symmetric state decays at the enhanced collective rate") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = 0.0;
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    cfg.max_step = 0.005;
    const Trajectory traj = integrate(pure_dicke(1), p, cfg, RhsForm::dicke_elementwise);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      worst = std::max(worst, std::abs(traj.derived[i].ss - std::exp(-3.8 * traj.times[i])));
      CHECK(std::abs(traj.derived[i].aa) < 1e-12);
      CHECK(std::abs(traj.derived[i].re_as) < 1e-12);
      CHECK(std::abs(traj.derived[i].im_as) < 1e-12);
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("antisymmetric state decays at the subradiant rate when phase-free") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = 0.0;
    IntegratorConfig cfg;
    cfg.t_max = 5.0;
    cfg.max_step = 0.005;
    const Trajectory traj = integrate(pure_dicke(2), p, cfg, RhsForm::dicke_elementwise);
    double worst = 0.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      worst = std::max(worst, std::abs(traj.derived[i].aa - std::exp(-0.2 * traj.times[i])));
      CHECK(std::abs(traj.derived[i].ss) < 1e-12);
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("transition frequency leaves populations and coherence magnitudes unchanged") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = M_PI / 4.0;
    const DickeState init = to_dicke(mixed_bare_initial(0.8, M_PI / 2.0));
    IntegratorConfig cfg;
    cfg.t_max = 4.0;

    SystemParams p_fast = p;
    p_fast.omega0 = 10.0;
    const Trajectory base = integrate(init, p, cfg, RhsForm::dicke_elementwise);
    const Trajectory fast = integrate(init, p_fast, cfg, RhsForm::dicke_elementwise);
    REQUIRE(base.times.size() == fast.times.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < base.times.size(); ++i) {
      worst = std::max({worst, std::abs(base.derived[i].ee - fast.derived[i].ee),
                        std::abs(base.derived[i].ss - fast.derived[i].ss),
                        std::abs(base.derived[i].aa - fast.derived[i].aa),
                        std::abs(base.derived[i].gg - fast.derived[i].gg),
                        std::abs(base.derived[i].re_as - fast.derived[i].re_as),
                        std::abs(base.derived[i].im_as - fast.derived[i].im_as),
                        std::abs(base.derived[i].abs_eg - fast.derived[i].abs_eg)});
    }
    CHECK(worst < 1e-8);
  }

  TEST_CASE("block structure is preserved by both forms") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = M_PI / 4.0;
    const DickeState init = to_dicke(mixed_bare_initial(0.8, M_PI / 2.0));
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    for (RhsForm form : {RhsForm::dicke_elementwise, RhsForm::bare_liouvillian}) {
      const Trajectory traj = integrate(init, p, cfg, form);
      double worst = 0.0;
      for (const DickeState& s : traj.states) {
        worst = std::max({worst, std::abs(s.rho(0, 1)), std::abs(s.rho(0, 2)),
                          std::abs(s.rho(3, 1)), std::abs(s.rho(3, 2))});
      }
      CHECK(worst < 1e-10);
    }
  }

  TEST_CASE("invariants hold along operator-form trajectories from random states") {
    SystemParams p = reference_params();
    testsup::ComplexNormal rng(911);
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    for (int trial = 0; trial < 3; ++trial) {
      const DickeState init{rng.density()};
      const Trajectory traj = integrate(init, p, cfg, RhsForm::bare_liouvillian);
      for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const StateDefects d = measure_defects(traj.states[i].rho);
        CHECK(d.trace < 1e-9);
        CHECK(d.hermiticity < 1e-9);
        CHECK(d.min_eigenvalue > -1e-7);
      }
    }
  }

  TEST_CASE("elementwise form loses positivity on general states and is caught in flight") {
    // With excited<->single-excitation coherences present and a nonzero phase, the
    // elementwise form is not of Lindblad type and can push an eigenvalue negative.
    // The in-flight monitor must name the invariant and the time; the operator form
    // keeps the same initial state positive throughout.
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = M_PI / 2.0;
    testsup::ComplexNormal rng(4242);
    const DickeState init{rng.density()};
    IntegratorConfig cfg;
    cfg.t_max = 6.0;
    CHECK_THROWS_WITH_AS(integrate(init, p, cfg, RhsForm::dicke_elementwise),
                         doctest::Contains("positivity"), std::runtime_error);
    CHECK_NOTHROW(integrate(init, p, cfg, RhsForm::bare_liouvillian));
    cfg.validate_states = false;
    const Trajectory traj = integrate(init, p, cfg, RhsForm::dicke_elementwise);
    CHECK(traj.times.size() == 601);  // unvalidated run completes
  }

  TEST_CASE("configuration validation") {
    const DickeState init = pure_dicke(3);
    const SystemParams p = reference_params();
    IntegratorConfig cfg;
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(integrate(init, p, cfg, RhsForm::dicke_elementwise),
                    std::invalid_argument);
    cfg = IntegratorConfig{};
    cfg.output_dt = 1e-9;
    CHECK_THROWS_WITH_AS(integrate(init, p, cfg, RhsForm::dicke_elementwise),
                         doctest::Contains("samples"), std::invalid_argument);
  }
}

TEST_SUITE("formulation comparison") {
  TEST_CASE("block states: the two formulations are numerically identical") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = M_PI / 4.0;
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    testsup::ComplexNormal rng(501);
    for (int trial = 0; trial < 5; ++trial) {
      const DickeState init = to_dicke(BareState{rng.block_density()});
      const FormulationComparison cmp = compare_formulations(init, p, cfg, 1e-8);
      CAPTURE(trial);
      CAPTURE(cmp.max_deviation);
      CHECK(cmp.agrees);
    }
  }

  TEST_CASE("full states with phase: a confined, reportable deviation") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = M_PI / 4.0;
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    testsup::ComplexNormal rng(502);
    const DickeState init{rng.density()};
    const FormulationComparison cmp = compare_formulations(init, p, cfg, 1e-7);

    CHECK_FALSE(cmp.agrees);
    CHECK(cmp.max_deviation > 1e-4);  // a real model difference, not integrator noise
    CHECK(std::isfinite(cmp.first_divergence_time));
    // Populations and the block coherences evolve identically in both forms.
    CHECK(cmp.physical_sector_deviation < 1e-8);
    // The operator form remains a proper quantum evolution throughout.
    CHECK(cmp.worst_bare_defects.trace < 1e-9);
    CHECK(cmp.worst_bare_defects.hermiticity < 1e-9);
    CHECK(cmp.worst_bare_defects.min_eigenvalue > -1e-7);
  }

  TEST_CASE("full states without phase: exact agreement") {
    SystemParams p;
    p.gamma = 1.0;
    p.gamma12 = 0.9;
    p.omega12 = -0.9;
    p.phi = 0.0;
    IntegratorConfig cfg;
    cfg.t_max = 3.0;
    testsup::ComplexNormal rng(503);
    for (int trial = 0; trial < 3; ++trial) {
      const DickeState init{rng.density()};
      const FormulationComparison cmp = compare_formulations(init, p, cfg, 1e-8);
      CAPTURE(cmp.max_deviation);
      CHECK(cmp.agrees);
    }
  }
}
