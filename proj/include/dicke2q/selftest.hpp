// selftest.hpp — the executable conformance catalog: every oracle pair in the
// library (closed-form vs eigenvalue concurrence, elementwise vs operator-form
// evolution, closed-form solutions vs the ODE) bound into one deterministic,
// machine-readable report.
//
// Outcomes are three-valued: "pass" (agreement within the check's bound),
// "discrepancy" (a transcribed reference expression disagrees with the ODE or
// with its independently constructed counterpart — a documented property of
// the reference material, not a defect of this library), and "fail" (reserved
// for agreements that are mathematically forced, where any violation is an
// implementation bug).
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dicke2q {

struct CheckResult {
  std::string name;
  std::string status;  // "pass" | "discrepancy" | "fail"
  double max_deviation = 0.0;
  std::string detail;
};

struct ConformanceReport {
  std::uint64_t seed = 1;
  std::vector<CheckResult> checks;  // fixed catalog order, every check exactly once
};

// Run the full nine-check catalog:
//   1. concurrence_block_vs_general      (1000 seeded random block states)
//   2. evolution_dicke_vs_bare           (50 seeded random full states)
//   3. symmetric_nophase_vs_ode
//   4. symmetric_phase_vs_ode            (phi in {pi/8, pi/4, 3pi/8})
//   5. mixed_nophase_vs_ode              (a in {0.2,0.6,0.8} x chi in {0,pi/4,pi/2})
//   6. independent_atom_limit_vs_ode
//   7. trajectory_invariants             (trace/Hermiticity/positivity bounds)
//   8. transition_frequency_invariance   (omega0 = 0 vs 10)
//   9. level_shift_zero                  (r12 = lambda/2, xi = pi/3)
// Deterministic for a given seed (all randomness flows from it).
ConformanceReport run_all(std::uint64_t seed);

// Stable-field-order JSON rendering of the report.
std::string report_json(const ConformanceReport& report);

}  // namespace dicke2q
