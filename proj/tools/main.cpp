// main.cpp — command-line front end for the two-emitter entanglement simulator.
//
// Subcommands
//   simulate        one run, all derived columns vs gamma*t
//   figure <n>      the standard multi-curve tables (n in 3..8)
//   sweep           per-value event summaries over xi, chi, a, or r12
//   check-analytic  closed-form concurrence vs the integrated ODE
//   selftest        the full conformance catalog as a JSON report
//
// Exit codes: 0 success; 2 usage or configuration error; 3 numerical failure;
// 4 check-analytic found a discrepancy and --allow-discrepancy was not given.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <dicke2q/analytic.hpp>
#include <dicke2q/scenarios.hpp>
#include <dicke2q/selftest.hpp>

namespace {

using namespace dicke2q;

constexpr double kPi = std::numbers::pi;
constexpr double kAnalyticTolerance = 1e-6;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Angles are plain radians, or degrees with a "deg:" prefix.
double parse_angle(const std::string& text) {
  const bool degrees = text.rfind("deg:", 0) == 0;
  const std::string number = degrees ? text.substr(4) : text;
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(number, &consumed);
  } catch (const std::exception&) {
    consumed = std::string::npos;
  }
  if (consumed != number.size() || number.empty()) {
    throw std::invalid_argument("angle '" + text +
                                "' is not a number in radians or 'deg:<degrees>'");
  }
  return degrees ? value * kPi / 180.0 : value;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item =
        text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t consumed = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &consumed);
    } catch (const std::exception&) {
      consumed = std::string::npos;
    }
    if (consumed != item.size() || item.empty()) {
      throw std::invalid_argument("value list entry '" + item + "' is not a number");
    }
    out.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw std::invalid_argument("the value list is empty");
  return out;
}

// Flat "key = value" config files: each pair becomes an ordinary --key=value
// token spliced in where --config stood, except for keys the command line
// already sets, so explicit flags always win.  Runs before CLI11 parsing.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::optional<std::size_t> insert_at;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    std::string given;
    if (arg == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
      given = args[++i];
    } else if (arg.rfind("--config=", 0) == 0) {
      given = arg.substr(std::string("--config=").size());
    } else {
      out.push_back(arg);
      continue;
    }
    if (insert_at) throw std::invalid_argument("--config may be given only once");
    insert_at = out.size();
    path = given;
  }
  if (!insert_at) return out;

  std::unordered_set<std::string> taken;  // keys that must not come from the file
  for (const std::string& arg : out) {
    if (arg.rfind("--", 0) != 0) continue;
    taken.insert(arg.substr(2, arg.find('=') - 2));
  }

  std::ifstream file(path);
  if (!file.good()) throw std::invalid_argument("cannot read config file '" + path + "'");
  const auto trim = [](const std::string& s) {
    const char* space = " \t\r";
    const std::size_t first = s.find_first_not_of(space);
    if (first == std::string::npos) return std::string();
    return s.substr(first, s.find_last_not_of(space) - first + 1);
  };
  std::vector<std::string> synthesized;
  std::unordered_set<std::string> seen;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    const std::string key = eq == std::string::npos ? std::string() : trim(line.substr(0, eq));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  " is not 'key = value': '" + line + "'");
    }
    if (key == "config") {
      throw std::invalid_argument("config files cannot include other config files");
    }
    if (!seen.insert(key).second) {
      throw std::invalid_argument("config file repeats key '" + key + "'");
    }
    if (taken.count(key)) continue;
    synthesized.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  out.insert(out.begin() + static_cast<std::ptrdiff_t>(*insert_at), synthesized.begin(),
             synthesized.end());
  return out;
}

struct CommonOptions {
  double r12 = 0.125;
  std::string xi_text = "deg:90";
  double gamma = 1.0;
  std::string initial = "symmetric";
  double a = 0.6;
  double b = 1.0;
  double c = 1.0;
  double chi = 0.0;
  double tmax = 6.0;
  double dt_out = 0.01;
  double rtol = 1e-9;
  std::string rhs = "eq11";
  std::string out;
  std::string format = "csv";
  std::string config;  // consumed before parsing; registered only for --help
};

// Option handles needed later for explicit-use checks.
struct OptionHandles {
  CLI::Option* xi = nullptr;
  CLI::Option* a = nullptr;
  CLI::Option* initial = nullptr;
};

OptionHandles add_geometry_and_run_options(CLI::App* cmd, CommonOptions& o,
                                           bool with_initial_state) {
  OptionHandles handles;
  cmd->add_option("--config", o.config,
                  "flat key = value file ('#' comments); explicit flags take precedence");
  cmd->add_option("--r12", o.r12, "emitter separation in wavelengths")
      ->capture_default_str();
  handles.xi = cmd->add_option("--xi", o.xi_text,
                               "pulse angle: radians or deg:<degrees> "
                               "(deg:90 = perpendicular, no excitation phase)")
                   ->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "single-emitter decay rate (sets the time unit)")
      ->capture_default_str();
  if (with_initial_state) {
    handles.initial = cmd->add_option("--initial", o.initial, "initial state")
                          ->check(CLI::IsMember({"symmetric", "excited", "mixed"}))
                          ->capture_default_str();
    handles.a = cmd->add_option("--a", o.a, "mixed state: excited-state population weight")
                    ->capture_default_str();
    cmd->add_option("--b", o.b, "mixed state: symmetric weight")->capture_default_str();
    cmd->add_option("--c", o.c, "mixed state: antisymmetric weight")->capture_default_str();
    cmd->add_option("--chi", o.chi, "mixed state: initial coherence phase (radians)")
        ->capture_default_str();
  } else {
    handles.a = cmd->add_option("--a", o.a, "initial excited-state population weight");
  }
  cmd->add_option("--tmax", o.tmax, "integration horizon in units of 1/gamma")
      ->capture_default_str();
  cmd->add_option("--dt-out", o.dt_out, "output sample spacing in units of 1/gamma")
      ->capture_default_str();
  cmd->add_option("--rtol", o.rtol, "integrator relative tolerance")->capture_default_str();
  cmd->add_option("--rhs", o.rhs, "equations of motion: eq11 (elementwise) or eq1 (operator)")
      ->check(CLI::IsMember({"eq11", "eq1"}))
      ->capture_default_str();
  return handles;
}

void add_output_options(CLI::App* cmd, CommonOptions& o, bool with_format = true) {
  cmd->add_option("--out", o.out, "output path (omit to print to stdout)");
  if (with_format) {
    cmd->add_option("--format", o.format, "csv (plus a JSON summary) or json (single file)")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
}

ScenarioSpec build_spec(const CommonOptions& o, const std::string& name) {
  ScenarioSpec spec;
  spec.name = name;
  if (o.initial == "symmetric") {
    spec.initial = InitialKind::symmetric;
  } else if (o.initial == "excited") {
    spec.initial = InitialKind::doubly_excited;
  } else {
    spec.initial = InitialKind::mixed;
  }
  spec.mixed.a = o.a;
  spec.mixed.b = o.b;
  spec.mixed.c = o.c;
  spec.mixed.chi = o.chi;
  spec.geometry.r12_over_lambda = o.r12;
  spec.geometry.xi = parse_angle(o.xi_text);
  spec.gamma = o.gamma;
  spec.t_max = o.tmax;
  spec.output_dt = o.dt_out;
  spec.rel_tol = o.rtol;
  spec.rhs_choice = o.rhs == "eq11" ? RhsForm::dicke_elementwise : RhsForm::bare_liouvillian;
  return spec;
}

TableFormat table_format(const CommonOptions& o) {
  return o.format == "csv" ? TableFormat::csv : TableFormat::json;
}

void emit_table(const Table& table, const CommonOptions& o) {
  if (o.out.empty()) {
    std::cout << (table_format(o) == TableFormat::csv ? to_csv(table) : data_json(table));
  } else {
    write_outputs(table, o.out, table_format(o));
  }
}

void emit_text(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + out);
  f << text;
  f.flush();
  if (!f) throw std::runtime_error("write failed: " + out);
}

int run_check_analytic(const CommonOptions& o, bool allow_discrepancy) {
  ScenarioSpec spec = build_spec(o, "check-analytic");
  if (spec.initial == InitialKind::doubly_excited) {
    throw std::invalid_argument(
        "no closed-form concurrence reference exists for the doubly excited initial state");
  }
  const bool mixed = spec.initial == InitialKind::mixed;
  const SystemParams p = scenario_params(spec);

  // Fail on an out-of-domain request (e.g. the mixed form with a nonzero
  // excitation phase) before paying for the integration.
  if (mixed) {
    (void)mixed_concurrence_nophase(0.0, spec.mixed, p);
  } else {
    (void)symmetric_concurrence_phase(0.0, p);
  }

  const Trajectory traj = run_scenario(spec);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  double worst = 0.0, corrected_worst = 0.0;
  double first_exceed = nan, nan_onset = nan;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    const double ode = traj.derived[i].concurrence;
    const double ref = mixed ? mixed_concurrence_nophase(t, spec.mixed, p)
                             : symmetric_concurrence_phase(t, p);
    if (std::isnan(ref)) {
      if (std::isnan(nan_onset)) nan_onset = t;
    } else {
      const double delta = std::abs(ref - ode);
      worst = std::max(worst, delta);
      if (delta > kAnalyticTolerance && std::isnan(first_exceed)) first_exceed = t;
    }
    if (mixed) {
      corrected_worst = std::max(
          corrected_worst, std::abs(mixed_concurrence_nophase_corrected(t, spec.mixed, p) - ode));
    }
  }
  const bool agrees = worst < kAnalyticTolerance && std::isnan(nan_onset);

  nlohmann::ordered_json j;
  j["formula"] = mixed ? "mixed_nophase" : "symmetric_phase";
  nlohmann::ordered_json params;
  params["initial"] = o.initial;
  if (mixed) {
    params["a"] = fmt(spec.mixed.a);
    params["b"] = fmt(spec.mixed.b);
    params["c"] = fmt(spec.mixed.c);
    params["chi"] = fmt(spec.mixed.chi);
  }
  params["r12_over_lambda"] = fmt(spec.geometry.r12_over_lambda);
  params["xi"] = fmt(spec.geometry.xi);
  params["phi"] = fmt(p.phi);
  params["gamma12_over_gamma"] = fmt(p.gamma12);
  params["omega12_over_gamma"] = fmt(p.omega12);
  params["t_max"] = fmt(spec.t_max);
  params["output_dt"] = fmt(spec.output_dt);
  params["rhs"] = o.rhs;
  j["parameters"] = std::move(params);
  j["tolerance"] = kAnalyticTolerance;
  j["max_deviation"] = worst;
  j["first_divergence_time"] =
      std::isnan(first_exceed) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(first_exceed);
  j["nan_onset_time"] =
      std::isnan(nan_onset) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(nan_onset);
  if (mixed) j["corrected_variant_max_deviation"] = corrected_worst;
  j["agrees"] = agrees;
  emit_text(j.dump(2) + "\n", o.out);

  if (agrees || allow_discrepancy) return 0;
  std::cerr << "check-analytic: the closed form deviates from the ODE beyond " << kAnalyticTolerance
            << " (max " << worst << "); pass --allow-discrepancy to accept\n";
  return 4;
}

int run_cli(int argc, char** argv) {
  CLI::App app{
      "dissipative dynamics and entanglement of two dipole-coupled emitters "
      "in a common vacuum"};
  app.name("dicke2q");
  app.require_subcommand(1);

  CommonOptions sim_opts;
  CLI::App* sim = app.add_subcommand("simulate", "integrate one scenario and export every column");
  add_geometry_and_run_options(sim, sim_opts, true);
  add_output_options(sim, sim_opts);

  CommonOptions fig_opts;
  int figure_number = 0;
  CLI::App* fig = app.add_subcommand("figure", "build one of the standard tables (3..8)");
  fig->add_option("n", figure_number, "figure number")->required()->check(CLI::Range(3, 8));
  OptionHandles fig_handles = add_geometry_and_run_options(fig, fig_opts, false);
  add_output_options(fig, fig_opts);

  CommonOptions sweep_opts;
  std::string sweep_axis_text;
  std::string sweep_values_text;
  CLI::App* swp = app.add_subcommand("sweep", "summarize runs across one swept parameter");
  swp->add_option("--axis", sweep_axis_text, "swept parameter")
      ->required()
      ->check(CLI::IsMember({"xi", "chi", "a", "r12"}));
  swp->add_option("--values", sweep_values_text, "comma-separated values (xi in radians)")
      ->required();
  OptionHandles sweep_handles = add_geometry_and_run_options(swp, sweep_opts, true);
  add_output_options(swp, sweep_opts);

  CommonOptions check_opts;
  bool allow_discrepancy = false;
  CLI::App* chk = app.add_subcommand(
      "check-analytic", "compare the closed-form concurrence against the integrated ODE");
  add_geometry_and_run_options(chk, check_opts, true);
  add_output_options(chk, check_opts, false);
  chk->add_flag("--allow-discrepancy", allow_discrepancy,
                "exit 0 even when the closed form disagrees");

  std::uint64_t seed = 1;
  std::string selftest_out;
  CLI::App* self = app.add_subcommand("selftest", "run the conformance catalog");
  self->add_option("--seed", seed, "seed for random-state generation")->capture_default_str();
  self->add_option("--out", selftest_out, "output path (omit to print to stdout)");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    args = expand_config(args);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(sim)) {
      emit_table(scenario_table(build_spec(sim_opts, "simulate")), sim_opts);
      return 0;
    }
    if (app.got_subcommand(fig)) {
      ScenarioSpec base = build_spec(fig_opts, "figure");
      std::optional<double> a;
      if (fig_handles.a->count() > 0) a = fig_opts.a;
      std::optional<double> xi;
      if (fig_handles.xi->count() > 0) xi = parse_angle(fig_opts.xi_text);
      emit_table(figure(figure_number, base, a, xi), fig_opts);
      return 0;
    }
    if (app.got_subcommand(swp)) {
      SweepAxis axis = SweepAxis::xi;
      if (sweep_axis_text == "chi") axis = SweepAxis::chi;
      if (sweep_axis_text == "a") axis = SweepAxis::a;
      if (sweep_axis_text == "r12") axis = SweepAxis::r12;
      if (axis == SweepAxis::chi || axis == SweepAxis::a) {
        if (sweep_handles.initial->count() > 0 && sweep_opts.initial != "mixed") {
          throw std::invalid_argument("sweeping " + sweep_axis_text +
                                      " requires the mixed initial state");
        }
        sweep_opts.initial = "mixed";
      }
      emit_table(sweep(axis, parse_values(sweep_values_text), build_spec(sweep_opts, "sweep")),
                 sweep_opts);
      return 0;
    }
    if (app.got_subcommand(chk)) {
      return run_check_analytic(check_opts, allow_discrepancy);
    }
    if (app.got_subcommand(self)) {
      emit_text(report_json(run_all(seed)), selftest_out);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run_cli(argc, argv); }
