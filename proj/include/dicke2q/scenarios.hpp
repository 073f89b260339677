// scenarios.hpp — named simulation runs, entanglement-event detection, and
// deterministic table export (CSV + JSON summary).
//
// A ScenarioSpec bundles an initial state, an emitter-pair geometry, and
// integration controls.  Times are always reported as gamma*t (the rate set is
// normalized to gamma = 1 before integration, so `gamma` only documents the
// physical scale).  The figure() builder produces the standard multi-curve
// tables of this model family (concurrence or the Im rho_as coherence vs
// gamma*t for swept pulse angle, initial phase, or initial population);
// sweep() reduces whole trajectories to per-value summary rows.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <dicke2q/analytic.hpp>
#include <dicke2q/dynamics.hpp>
#include <dicke2q/physics.hpp>

namespace dicke2q {

enum class InitialKind {
  symmetric,       // rho_ss = 1 (single collective excitation, symmetric)
  doubly_excited,  // rho_ee = 1
  mixed,           // diagonal a,b,c,(3-a-b-c) / 3 with sqrt(bc) e^{i chi} coherence
};

struct ScenarioSpec {
  std::string name = "simulate";
  InitialKind initial = InitialKind::symmetric;
  MixedInitialSpec mixed{};  // consulted only when initial == InitialKind::mixed
  Geometry geometry{};       // r12/lambda and pulse angle xi
  double gamma = 1.0;        // physical decay rate; outputs are in units of 1/gamma
  double t_max = 6.0;        // in units of 1/gamma
  double output_dt = 0.01;   // in units of 1/gamma
  double rel_tol = 1e-9;
  RhsForm rhs_choice = RhsForm::dicke_elementwise;
};

// Throws std::invalid_argument naming the violated constraint.
void validate(const ScenarioSpec& spec);

// The initial density matrix of the scenario, in the Dicke basis.
DickeState initial_state(const ScenarioSpec& spec);

// Geometry resolved to a gamma-normalized parameter set (gamma = 1, omega0 = 0).
SystemParams scenario_params(const ScenarioSpec& spec);

// Integrate the scenario and attach per-sample concurrence.
// Errors propagate from validate()/integrate().
Trajectory run_scenario(const ScenarioSpec& spec);

// ---- sudden-death / revival detection ----

struct EntanglementEvents {
  std::vector<double> death_times;      // entries ascending
  std::vector<double> revival_times;    // entries ascending
  std::vector<double> revival_amplitudes;  // local max after each revival, in (0, 1]
};

// Scan the attached concurrence for dead intervals: maximal runs of at least
// two consecutive samples with c <= zero_threshold.  A run entered from above
// yields a death event; a run that ends before the trajectory does yields a
// revival event plus the largest sampled concurrence before the next dead run.
// Boundary times are refined by bisection of the concurrence of the linearly
// interpolated state to output_dt/128 resolution.  A dead run starting at
// t = 0 yields no death event (nothing was lost) but may yield a revival.
// Requires >= 3 samples with concurrence attached; empty events are fine.
EntanglementEvents detect_events(const Trajectory& traj, double zero_threshold = 1e-6);

// ---- table artifacts ----

struct TableColumn {
  std::string label;
  std::vector<std::pair<std::string, std::string>> parameters;  // per-curve resolved values
  std::vector<double> values;
  std::optional<EntanglementEvents> events;  // present for concurrence columns
};

struct Table {
  std::string name;
  std::string quantity;  // "concurrence", "im_rho_as", "trajectory", "event_summary"
  std::vector<std::pair<std::string, std::string>> parameters;  // shared resolved values
  std::string axis_label = "gamma_t";
  std::vector<double> axis;
  std::vector<TableColumn> columns;  // all values.size() == axis.size()
};

// CSV rendering: '#' comment lines with the resolved parameter set (shared,
// then per-curve), a header row "<axis>,<label>,...", then numeric rows with
// 12 significant digits.  Byte-deterministic for identical tables.
std::string to_csv(const Table& table);

// FNV-1a 64-bit hash (used to checksum the CSV rendering).
std::uint64_t fnv1a64(std::string_view bytes);

// JSON summary: name/quantity/axis, parameters, per-column min/max/final and
// events, and the FNV-1a checksum of the CSV rendering.  Deterministic.
std::string summary_json(const Table& table);

// Full-data JSON: the summary plus the axis and every column's values.
std::string data_json(const Table& table);

enum class TableFormat { csv, json };

// Write the table under `path` (any trailing .csv/.json is stripped first):
//   csv  -> <base>.csv (data) and <base>.json (summary)
//   json -> <base>.json (summary + data)
// Throws std::runtime_error if a file cannot be opened.
void write_outputs(const Table& table, const std::string& path, TableFormat format);

// ---- standard tables ----

// One run, all derived columns (populations, coherences, concurrence) plus
// detected events on the concurrence column.
Table scenario_table(const ScenarioSpec& spec);

// The standard multi-curve tables, n in 3..8.  `base` supplies geometry
// (r12), integration controls, and rhs choice; each figure fixes its own
// initial state and curve family:
//   3: symmetric state, concurrence for xi in {0, pi/3, pi/2}
//   4: symmetric state, Im rho_as for a single xi (default 0)
//   5: mixed b = c = 1, concurrence for chi in {0, pi/4, pi/2}; a defaults
//      to 0.6, xi to pi/2 (no excitation phase)
//   6: mixed b = c = 1, chi = pi/2, concurrence for a in {0.2, 0.5, 0.8};
//      xi defaults to pi/2
//   7: mixed b = c = 1, chi = pi/2, concurrence for xi in {pi/2, 0}; a must
//      be supplied (no canonical value exists)
//   8: as 7 but Im rho_as
// `a` / `xi` apply only where the figure leaves them free; supplying one a
// figure fixes (or omitting a required one) throws std::invalid_argument.
Table figure(int n, const ScenarioSpec& base,
             std::optional<double> a = std::nullopt,
             std::optional<double> xi = std::nullopt);

enum class SweepAxis { xi, chi, a, r12 };

// One run per value of the swept parameter, reduced to summary columns:
// min_concurrence, death_time, revival_time, revival_amplitude (first event
// each; NaN when the trajectory has none).  chi/a sweeps require the mixed
// initial state.  Values must be non-empty and within the parameter's domain.
Table sweep(SweepAxis axis, const std::vector<double>& values, const ScenarioSpec& base);

}  // namespace dicke2q
