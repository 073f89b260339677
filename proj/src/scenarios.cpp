#include <dicke2q/scenarios.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include <dicke2q/entanglement.hpp>
#include <dicke2q/tolerances.hpp>

namespace dicke2q {

namespace {

using ordered_json = nlohmann::ordered_json;
using Params = std::vector<std::pair<std::string, std::string>>;

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string initial_name(InitialKind kind) {
  switch (kind) {
    case InitialKind::symmetric: return "symmetric";
    case InitialKind::doubly_excited: return "excited";
    case InitialKind::mixed: return "mixed";
  }
  throw std::invalid_argument("unknown initial-state kind");
}

std::string rhs_name(RhsForm form) {
  return form == RhsForm::dicke_elementwise ? "eq11" : "eq1";
}

// Shared resolved parameters of a run.  Fields listed in `skip` are owned by
// per-curve labels (or by the sweep axis) and are omitted here.
Params resolved_parameters(const ScenarioSpec& spec, const std::vector<std::string>& skip = {}) {
  auto skipped = [&](const std::string& key) {
    return std::find(skip.begin(), skip.end(), key) != skip.end();
  };
  Params out;
  auto put = [&](const std::string& key, const std::string& value) {
    if (!skipped(key)) out.emplace_back(key, value);
  };
  put("initial", initial_name(spec.initial));
  if (spec.initial == InitialKind::mixed) {
    put("a", fmt(spec.mixed.a));
    put("b", fmt(spec.mixed.b));
    put("c", fmt(spec.mixed.c));
    put("chi", fmt(spec.mixed.chi));
  }
  put("r12_over_lambda", fmt(spec.geometry.r12_over_lambda));
  if (!skipped("xi") && !skipped("r12_over_lambda")) {
    SystemParams p = params_from_geometry(spec.geometry, 1.0);
    put("xi", fmt(spec.geometry.xi));
    put("phi", fmt(p.phi));
    put("gamma12_over_gamma", fmt(p.gamma12));
    put("omega12_over_gamma", fmt(p.omega12));
  } else if (!skipped("r12_over_lambda")) {
    // xi varies per curve: phi varies with it, but the couplings are shared.
    Couplings c = coupling_random_orientation(2.0 * kPi * spec.geometry.r12_over_lambda, 1.0);
    put("gamma12_over_gamma", fmt(c.gamma12));
    put("omega12_over_gamma", fmt(c.omega12));
  } else {
    // r12 varies per row: only the pulse angle is shared.
    put("xi", fmt(spec.geometry.xi));
  }
  put("gamma", fmt(spec.gamma));
  put("t_max", fmt(spec.t_max));
  put("output_dt", fmt(spec.output_dt));
  put("rel_tol", fmt(spec.rel_tol));
  put("rhs", rhs_name(spec.rhs_choice));
  return out;
}

double concurrence_of(const DickeState& s) {
  BareState bare = from_dicke(s);
  if (is_block_form(bare.rho, tol::block_offdiag)) return concurrence_dicke(s);
  return concurrence_general(bare);
}

double interpolated_concurrence(const Trajectory& traj, std::size_t i, double theta) {
  DickeState mid;
  mid.rho = (1.0 - theta) * traj.states[i].rho + theta * traj.states[i + 1].rho;
  return concurrence_of(mid);
}

// Bisect the alive/dead boundary inside [times[i], times[i+1]] down to a
// resolution of (times[i+1] - times[i]) / 128.
double refine_crossing(const Trajectory& traj, std::size_t i, double threshold,
                       bool entering_dead) {
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 7; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const bool dead = interpolated_concurrence(traj, i, mid) <= threshold;
    if (dead == entering_dead) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double theta = 0.5 * (lo + hi);
  return traj.times[i] + theta * (traj.times[i + 1] - traj.times[i]);
}

void require_no_csv_specials(const std::string& text, const char* what) {
  if (text.find(',') != std::string::npos || text.find('\n') != std::string::npos) {
    throw std::invalid_argument(std::string(what) + " must not contain ',' or newline: " + text);
  }
}

std::optional<double> finite_min(const std::vector<double>& v) {
  std::optional<double> m;
  for (double x : v) {
    if (std::isfinite(x) && (!m || x < *m)) m = x;
  }
  return m;
}

std::optional<double> finite_max(const std::vector<double>& v) {
  std::optional<double> m;
  for (double x : v) {
    if (std::isfinite(x) && (!m || x > *m)) m = x;
  }
  return m;
}

void check_table(const Table& table) {
  require_no_csv_specials(table.axis_label, "axis label");
  for (const auto& col : table.columns) {
    require_no_csv_specials(col.label, "column label");
    if (col.values.size() != table.axis.size()) {
      throw std::invalid_argument("column '" + col.label + "' length does not match the axis");
    }
  }
}

ordered_json events_json(const EntanglementEvents& ev) {
  ordered_json j;
  j["death_times"] = ev.death_times;
  j["revival_times"] = ev.revival_times;
  j["revival_amplitudes"] = ev.revival_amplitudes;
  return j;
}

ordered_json summary_object(const Table& table) {
  check_table(table);
  ordered_json j;
  j["table"] = table.name;
  j["quantity"] = table.quantity;
  j["axis"] = table.axis_label;
  j["samples"] = table.axis.size();
  ordered_json params = ordered_json::object();
  for (const auto& [key, value] : table.parameters) params[key] = value;
  j["parameters"] = params;
  ordered_json cols = ordered_json::array();
  for (const auto& col : table.columns) {
    ordered_json c;
    c["label"] = col.label;
    if (!col.parameters.empty()) {
      ordered_json cp = ordered_json::object();
      for (const auto& [key, value] : col.parameters) cp[key] = value;
      c["parameters"] = cp;
    }
    auto mn = finite_min(col.values);
    auto mx = finite_max(col.values);
    c["min"] = mn ? ordered_json(*mn) : ordered_json(nullptr);
    c["max"] = mx ? ordered_json(*mx) : ordered_json(nullptr);
    c["final"] = col.values.empty() || !std::isfinite(col.values.back())
                     ? ordered_json(nullptr)
                     : ordered_json(col.values.back());
    if (col.events) c["events"] = events_json(*col.events);
    cols.push_back(std::move(c));
  }
  j["columns"] = std::move(cols);
  char hex[32];
  std::snprintf(hex, sizeof hex, "0x%016llx",
                static_cast<unsigned long long>(fnv1a64(to_csv(table))));
  j["checksum"] = {{"algorithm", "fnv1a64"}, {"csv", hex}};
  return j;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << content;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + path);
}

// Per-curve geometry parameters for figures whose curves differ in xi.
Params xi_curve_parameters(const ScenarioSpec& spec) {
  SystemParams p = params_from_geometry(spec.geometry, 1.0);
  return {{"xi", fmt(spec.geometry.xi)}, {"phi", fmt(p.phi)}};
}

std::vector<double> extract_column(const Trajectory& traj, const std::string& quantity) {
  std::vector<double> out;
  out.reserve(traj.derived.size());
  for (const auto& d : traj.derived) {
    out.push_back(quantity == "im_rho_as" ? d.im_as : d.concurrence);
  }
  return out;
}

}  // namespace

void validate(const ScenarioSpec& spec) {
  if (spec.name.empty()) throw std::invalid_argument("scenario name must be non-empty");
  validate(spec.geometry);
  if (!std::isfinite(spec.gamma) || spec.gamma <= 0.0) {
    throw std::invalid_argument("scenario gamma must be positive and finite");
  }
  if (!std::isfinite(spec.t_max) || spec.t_max <= 0.0) {
    throw std::invalid_argument("scenario t_max must be positive and finite");
  }
  if (!std::isfinite(spec.output_dt) || spec.output_dt <= 0.0) {
    throw std::invalid_argument("scenario output_dt must be positive and finite");
  }
  if (!std::isfinite(spec.rel_tol) || spec.rel_tol <= 0.0) {
    throw std::invalid_argument("scenario rel_tol must be positive and finite");
  }
  if (spec.initial == InitialKind::mixed) validate(spec.mixed);
}

DickeState initial_state(const ScenarioSpec& spec) {
  validate(spec);
  DickeState s;
  switch (spec.initial) {
    case InitialKind::symmetric:
      s.rho(1, 1) = 1.0;
      break;
    case InitialKind::doubly_excited:
      s.rho(0, 0) = 1.0;
      break;
    case InitialKind::mixed:
      s = to_dicke(build_mixed_initial(spec.mixed));
      break;
  }
  return s;
}

SystemParams scenario_params(const ScenarioSpec& spec) {
  validate(spec);
  // All rates scale linearly with gamma, so integrating with gamma = 1 and
  // reporting times as gamma*t covers every physical gamma.
  return params_from_geometry(spec.geometry, 1.0, 0.0);
}

Trajectory run_scenario(const ScenarioSpec& spec) {
  const SystemParams p = scenario_params(spec);
  IntegratorConfig cfg;
  cfg.rel_tol = spec.rel_tol;
  cfg.t_max = spec.t_max;
  cfg.output_dt = spec.output_dt;
  Trajectory traj = integrate(initial_state(spec), p, cfg, spec.rhs_choice);
  attach_concurrence(traj);
  return traj;
}

EntanglementEvents detect_events(const Trajectory& traj, double zero_threshold) {
  const std::size_t n = traj.times.size();
  if (n < 3) throw std::invalid_argument("event detection needs at least 3 samples");
  if (traj.states.size() != n || traj.derived.size() != n) {
    throw std::invalid_argument("trajectory fields have inconsistent lengths");
  }
  std::vector<char> dead(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double c = traj.derived[i].concurrence;
    if (!std::isfinite(c)) {
      throw std::invalid_argument("event detection requires concurrence attached at every sample");
    }
    dead[i] = c <= zero_threshold;
  }

  EntanglementEvents ev;
  std::size_t i = 0;
  while (i < n) {
    if (!dead[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && dead[j + 1]) ++j;  // maximal dead run [i, j]
    if (j > i) {                           // a single dipped sample is not a dead interval
      if (i > 0) {
        ev.death_times.push_back(refine_crossing(traj, i - 1, zero_threshold, true));
      }
      if (j + 1 < n) {
        ev.revival_times.push_back(refine_crossing(traj, j, zero_threshold, false));
        double amplitude = 0.0;
        for (std::size_t k = j + 1; k < n; ++k) {
          if (dead[k] && k + 1 < n && dead[k + 1]) break;  // next dead run starts
          amplitude = std::max(amplitude, traj.derived[k].concurrence);
        }
        ev.revival_amplitudes.push_back(amplitude);
      }
    }
    i = j + 1;
  }
  return ev;
}

std::string to_csv(const Table& table) {
  check_table(table);
  std::string out;
  out += "# table = " + table.name + "\n";
  out += "# quantity = " + table.quantity + "\n";
  for (const auto& [key, value] : table.parameters) {
    out += "# " + key + " = " + value + "\n";
  }
  for (const auto& col : table.columns) {
    if (col.parameters.empty()) continue;
    out += "# curve " + col.label + ":";
    bool first = true;
    for (const auto& [key, value] : col.parameters) {
      out += first ? " " : ", ";
      out += key + " = " + value;
      first = false;
    }
    out += "\n";
  }
  out += table.axis_label;
  for (const auto& col : table.columns) out += "," + col.label;
  out += "\n";
  for (std::size_t row = 0; row < table.axis.size(); ++row) {
    out += fmt(table.axis[row]);
    for (const auto& col : table.columns) out += "," + fmt(col.values[row]);
    out += "\n";
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string summary_json(const Table& table) {
  return summary_object(table).dump(2) + "\n";
}

std::string data_json(const Table& table) {
  ordered_json j = summary_object(table);
  ordered_json data;
  data[table.axis_label] = table.axis;
  ordered_json cols = ordered_json::object();
  for (const auto& col : table.columns) cols[col.label] = col.values;
  data["columns"] = std::move(cols);
  j["data"] = std::move(data);
  return j.dump(2) + "\n";
}

void write_outputs(const Table& table, const std::string& path, TableFormat format) {
  if (path.empty()) throw std::invalid_argument("output path must be non-empty");
  std::string base = path;
  for (std::string_view ext : {std::string_view(".csv"), std::string_view(".json")}) {
    if (base.size() > ext.size() && base.ends_with(ext)) {
      base.resize(base.size() - ext.size());
      break;
    }
  }
  if (format == TableFormat::csv) {
    write_file(base + ".csv", to_csv(table));
    write_file(base + ".json", summary_json(table));
  } else {
    write_file(base + ".json", data_json(table));
  }
}

Table scenario_table(const ScenarioSpec& spec) {
  Trajectory traj = run_scenario(spec);
  Table t;
  t.name = spec.name;
  t.quantity = "trajectory";
  t.parameters = resolved_parameters(spec);
  t.axis = traj.times;
  const std::size_t n = traj.times.size();
  auto add = [&](const std::string& label, auto field) {
    TableColumn col;
    col.label = label;
    col.values.reserve(n);
    for (const auto& d : traj.derived) col.values.push_back(field(d));
    t.columns.push_back(std::move(col));
  };
  add("ee", [](const DerivedSample& d) { return d.ee; });
  add("ss", [](const DerivedSample& d) { return d.ss; });
  add("aa", [](const DerivedSample& d) { return d.aa; });
  add("gg", [](const DerivedSample& d) { return d.gg; });
  add("re_rho_as", [](const DerivedSample& d) { return d.re_as; });
  add("im_rho_as", [](const DerivedSample& d) { return d.im_as; });
  add("abs_rho_eg", [](const DerivedSample& d) { return d.abs_eg; });
  add("concurrence", [](const DerivedSample& d) { return d.concurrence; });
  t.columns.back().events = detect_events(traj);
  return t;
}

Table figure(int n, const ScenarioSpec& base, std::optional<double> a, std::optional<double> xi) {
  if (n < 3 || n > 8) throw std::invalid_argument("figure number must be in 3..8");
  const bool fixed_xi_family = n == 3 || n == 7 || n == 8;
  if (xi && fixed_xi_family) {
    throw std::invalid_argument("figure " + std::to_string(n) + " fixes its xi curve family");
  }
  if (a && (n == 3 || n == 4 || n == 6)) {
    throw std::invalid_argument("figure " + std::to_string(n) +
                                " does not take an initial-population parameter a");
  }
  if (!a && (n == 7 || n == 8)) {
    throw std::invalid_argument("figure " + std::to_string(n) +
                                " requires an explicit initial-population a");
  }

  Table t;
  t.name = "figure" + std::to_string(n);
  t.quantity = (n == 4 || n == 8) ? "im_rho_as" : "concurrence";

  ScenarioSpec spec = base;
  spec.name = t.name;
  if (n <= 4) {
    spec.initial = InitialKind::symmetric;
  } else {
    spec.initial = InitialKind::mixed;
    spec.mixed.b = 1.0;
    spec.mixed.c = 1.0;
  }

  struct Curve {
    std::string label;
    Params parameters;
    ScenarioSpec spec;
  };
  std::vector<Curve> curves;
  std::vector<std::string> shared_skip;

  auto add_xi_curve = [&](double xi_value) {
    ScenarioSpec s = spec;
    s.geometry.xi = xi_value;
    curves.push_back({"xi=" + fmt(xi_value), xi_curve_parameters(s), std::move(s)});
  };

  switch (n) {
    case 3:
      for (double v : {0.0, kPi / 3.0, kPi / 2.0}) add_xi_curve(v);
      shared_skip = {"xi"};
      break;
    case 4:
      spec.geometry.xi = xi.value_or(0.0);
      curves.push_back({"im_rho_as", {}, spec});
      break;
    case 5: {
      spec.mixed.a = a.value_or(0.6);
      spec.geometry.xi = xi.value_or(kPi / 2.0);
      for (double v : {0.0, kPi / 4.0, kPi / 2.0}) {
        ScenarioSpec s = spec;
        s.mixed.chi = v;
        curves.push_back({"chi=" + fmt(v), {{"chi", fmt(v)}}, std::move(s)});
      }
      shared_skip = {"chi"};
      break;
    }
    case 6: {
      spec.mixed.chi = kPi / 2.0;
      spec.geometry.xi = xi.value_or(kPi / 2.0);
      for (double v : {0.2, 0.5, 0.8}) {
        ScenarioSpec s = spec;
        s.mixed.a = v;
        curves.push_back({"a=" + fmt(v), {{"a", fmt(v)}}, std::move(s)});
      }
      shared_skip = {"a"};
      break;
    }
    case 7:
    case 8:
      spec.mixed.a = *a;
      spec.mixed.chi = kPi / 2.0;
      for (double v : {kPi / 2.0, 0.0}) add_xi_curve(v);
      shared_skip = {"xi"};
      break;
  }

  t.parameters = resolved_parameters(curves.front().spec, shared_skip);
  for (auto& curve : curves) {
    Trajectory traj = run_scenario(curve.spec);
    if (t.axis.empty()) t.axis = traj.times;
    TableColumn col;
    col.label = curve.label;
    col.parameters = curve.parameters;
    col.values = extract_column(traj, t.quantity);
    if (t.quantity == "concurrence") col.events = detect_events(traj);
    t.columns.push_back(std::move(col));
  }
  return t;
}

Table sweep(SweepAxis axis, const std::vector<double>& values, const ScenarioSpec& base) {
  if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
  const bool needs_mixed = axis == SweepAxis::chi || axis == SweepAxis::a;
  if (needs_mixed && base.initial != InitialKind::mixed) {
    throw std::invalid_argument("sweep over chi or a requires the mixed initial state");
  }

  std::string label;
  switch (axis) {
    case SweepAxis::xi: label = "xi"; break;
    case SweepAxis::chi: label = "chi"; break;
    case SweepAxis::a: label = "a"; break;
    case SweepAxis::r12: label = "r12_over_lambda"; break;
  }

  Table t;
  t.name = "sweep_" + (axis == SweepAxis::r12 ? std::string("r12") : label);
  t.quantity = "event_summary";
  t.axis_label = label;
  t.axis = values;
  t.parameters = resolved_parameters(base, {label});

  TableColumn min_c{"min_concurrence", {}, {}, std::nullopt};
  TableColumn death{"death_time", {}, {}, std::nullopt};
  TableColumn revival{"revival_time", {}, {}, std::nullopt};
  TableColumn amplitude{"revival_amplitude", {}, {}, std::nullopt};
  const double nan = std::numeric_limits<double>::quiet_NaN();

  for (double v : values) {
    ScenarioSpec spec = base;
    switch (axis) {
      case SweepAxis::xi: spec.geometry.xi = v; break;
      case SweepAxis::chi: spec.mixed.chi = v; break;
      case SweepAxis::a: spec.mixed.a = v; break;
      case SweepAxis::r12: spec.geometry.r12_over_lambda = v; break;
    }
    spec.name = t.name;
    Trajectory traj = run_scenario(spec);
    EntanglementEvents ev = detect_events(traj);
    double mc = traj.derived.front().concurrence;
    for (const auto& d : traj.derived) mc = std::min(mc, d.concurrence);
    min_c.values.push_back(mc);
    death.values.push_back(ev.death_times.empty() ? nan : ev.death_times.front());
    revival.values.push_back(ev.revival_times.empty() ? nan : ev.revival_times.front());
    amplitude.values.push_back(ev.revival_amplitudes.empty() ? nan : ev.revival_amplitudes.front());
  }

  t.columns = {std::move(min_c), std::move(death), std::move(revival), std::move(amplitude)};
  return t;
}

}  // namespace dicke2q
