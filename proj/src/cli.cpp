#include "swinglab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <ostream>

#include "swinglab/errors.hpp"
#include "swinglab/io.hpp"
#include "swinglab/simulator.hpp"

namespace swinglab::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// JSON has no infinity; such values are written as strings.
json number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json to_json(const StabilityVerdict& v) {
  json j;
  j["outcome"] = to_string(v.outcome);
  j["instability_swing_index"] = v.instability_swing_index ? json(*v.instability_swing_index) : json(nullptr);
  j["classification"] = to_string(v.classification);
  j["delta_uep_rad"] = v.delta_uep;
  j["max_delta_rad"] = number(v.max_delta);
  return j;
}

json to_json(const CycleEnergyReport& c) {
  return json{{"cycle_index", c.cycle_index},
              {"t_a_s", c.t_a},
              {"t_b_s", c.t_b},
              {"t_c_s", c.t_c},
              {"delta_a_rad", c.delta_a},
              {"delta_b_rad", c.delta_b},
              {"delta_c_rad", c.delta_c},
              {"dv_total_pu", c.dv_total},
              {"dv_w_pu", c.dv_w},
              {"dv_sg_pu", c.dv_sg},
              {"dv_d_pu", c.dv_d},
              {"mvt_1_pu", c.mvt_1},
              {"mvt_2_pu", c.mvt_2},
              {"mode_change_inside", c.mode_change_inside}};
}

json to_json(const SwingSegment& s) {
  return json{{"index", s.index},
              {"t_start_s", s.t_start},
              {"t_end_s", s.t_end},
              {"direction", to_string(s.direction)},
              {"delta_extreme_rad", s.delta_extreme},
              {"v_at_end_pu", s.v_at_end}};
}

json cycles_json(const TraceAnalysis& a) {
  json arr = json::array();
  for (const CycleEnergyReport& c : a.cycles) arr.push_back(to_json(c));
  return arr;
}

json summary_json(const Trace& trace, const TraceAnalysis& a) {
  json j;
  j["scenario"] = trace.scenario.name;
  j["status"] = to_string(trace.status);
  j["verdict"] = to_json(a.verdict);
  j["instability_swing_index"] = j["verdict"]["instability_swing_index"];
  j["equilibrium"] = {{"delta_s_rad", trace.equilibrium.delta_s},
                      {"delta_uep_rad", trace.equilibrium.delta_uep},
                      {"p_w_ss_pu", trace.equilibrium.p_w_ss},
                      {"v_crit_pu", trace.equilibrium.v_crit}};
  j["energy_reference"] = {{"amp_pu", trace.reference.amp},
                           {"p_m_pu", trace.reference.p_m},
                           {"omega_g_rad_per_s", trace.reference.omega_g},
                           {"t_j_s", trace.reference.t_j},
                           {"d_pu", trace.reference.d}};
  j["max_v_pu"] = a.max_v;
  json swings = json::array();
  for (const SwingSegment& s : a.swings) swings.push_back(to_json(s));
  j["swings"] = swings;
  j["cycles"] = cycles_json(a);
  json events = json::array();
  for (const TraceEvent& e : trace.events) events.push_back({{"t_s", e.t}, {"kind", to_string(e.kind)}});
  j["events"] = events;
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

Scenario resolve_scenario(const RunConfig& config) {
  if (config.scenario_path.has_value() == config.builtin.has_value()) {
    throw InvalidScenario("give exactly one of a scenario file or a builtin case");
  }
  Scenario s = config.scenario_path ? load_scenario(*config.scenario_path) : builtin_case(*config.builtin);
  if (config.dt) s.dt_s = *config.dt;
  if (config.t_end) s.t_end_s = *config.t_end;
  s.validate();
  return s;
}

int exit_code(const StabilityVerdict& v) {
  return v.outcome == Outcome::Stable ? kExitStable : kExitUnstable;
}

// Events are not stored in trace.csv; rebuild them from the scenario timing
// and the mode column.
std::vector<TraceEvent> rebuild_events(const Scenario& s, std::span<const TraceSample> samples) {
  std::vector<TraceEvent> events;
  if (samples.empty()) return events;
  const double t0 = samples.front().t;
  const double t1 = samples.back().t;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double t = samples[k].t;
    if (s.fault.enabled && t == s.fault.t_on_s) events.push_back({t, EventKind::FaultOn});
    if (s.fault.enabled && t == s.fault.t_clear_s) events.push_back({t, EventKind::FaultCleared});
    if (k > 0 && samples[k].mode != samples[k - 1].mode) {
      const IbrMode m = samples[k].mode;
      events.push_back({t, m == IbrMode::Lvrt       ? EventKind::LvrtEntry
                           : m == IbrMode::Recovery ? EventKind::RecoveryStart
                                                    : EventKind::RecoveryComplete});
    }
  }
  if (std::abs(samples.back().delta) > kDivergenceAngle) events.push_back({t1, EventKind::Diverged});
  (void)t0;
  return events;
}

}  // namespace

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Scenario scenario = resolve_scenario(config);
    fs::create_directories(config.output_dir);
    save_scenario(config.output_dir / "scenario.txt", scenario);

    Trace trace;
    std::string failure;
    try {
      trace = run_simulation(scenario);
    } catch (const SimulationAborted& e) {
      trace = e.partial();
      failure = e.what();
    }

    if (config.emit_trace) {
      std::ofstream f(config.output_dir / "trace.csv", std::ios::binary);
      write_trace_csv(f, trace.samples);
    }
    if (config.emit_phase) {
      std::ofstream f(config.output_dir / "phase.csv", std::ios::binary);
      write_phase_csv(f, trace.samples);
    }
    if (trace.samples.size() < 2) {
      err << "error: " << (failure.empty() ? "simulation produced no samples" : failure) << '\n';
      return kExitError;
    }

    const TraceAnalysis analysis = analyze_trace(trace);
    json summary = summary_json(trace, analysis);
    if (!failure.empty()) summary["failure"] = failure;
    write_text(config.output_dir / "summary.json", summary.dump(2) + "\n");

    out << scenario.name << ": " << to_string(analysis.verdict.outcome);
    if (analysis.verdict.instability_swing_index) {
      out << " (swing " << *analysis.verdict.instability_swing_index << ", "
          << to_string(analysis.verdict.classification) << ")";
    }
    out << '\n';
    if (!failure.empty()) {
      err << "error: " << failure << " (partial outputs kept in " << config.output_dir.string() << ")\n";
      return kExitError;
    }
    return exit_code(analysis.verdict);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const Scenario base = resolve_scenario(config.base);
    for (const AxisRange& a : config.axes) {
      if (a.values.empty()) throw InvalidScenario("axis " + std::string(to_string(a.axis)) + " is empty");
    }
    const StabilityMap map = sweep(base, config.axes, config.threads);
    fs::create_directories(config.base.output_dir);
    {
      std::ofstream f(config.base.output_dir / "map.csv", std::ios::binary);
      write_map_csv(f, map);
    }
    json j;
    j["base"] = base.name;
    json axes = json::array();
    for (const AxisRange& a : map.axes) {
      json values = json::array();
      for (double v : a.values) values.push_back(number(v));
      axes.push_back({{"name", to_string(a.axis)}, {"values", values}});
    }
    j["axes"] = axes;
    json cells = json::array();
    std::size_t failed = 0;
    for (const MapCell& c : map.cells) {
      json coords = json::array();
      for (double x : c.coords) coords.push_back(number(x));
      json cell = {{"coords", coords},
                   {"outcome", to_string(c.outcome)},
                   {"swing_index", c.swing_index ? json(*c.swing_index) : json(nullptr)},
                   {"classification", to_string(c.classification)},
                   {"max_v_pu", number(c.max_v)}};
      if (c.outcome == CellOutcome::Failed) {
        cell["failure"] = c.failure;
        ++failed;
      }
      cells.push_back(cell);
    }
    j["cells"] = cells;
    write_text(config.base.output_dir / "map.json", j.dump(2) + "\n");
    out << map.cells.size() << " cells";
    if (failed) out << " (" << failed << " failed)";
    out << '\n';
    return kExitStable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_analyze(const AnalyzeConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::ifstream in(config.trace_path, std::ios::binary);
    if (!in) throw ParseError("cannot open trace file '" + config.trace_path.string() + "'");
    std::vector<TraceSample> samples = read_trace_csv(in);

    Scenario scenario;
    if (config.builtin) {
      scenario = builtin_case(*config.builtin);
    } else {
      const fs::path path = config.scenario_path.value_or(config.trace_path.parent_path() / "scenario.txt");
      scenario = load_scenario(path);
    }
    const PreparedScenario prep = prepare_scenario(scenario);

    Trace trace;
    trace.scenario = scenario;
    trace.equilibrium = prep.equilibrium;
    trace.reference = prep.reference;
    trace.events = rebuild_events(scenario, samples);
    trace.samples = std::move(samples);
    if (!trace.samples.empty() && std::abs(trace.samples.back().delta) > kDivergenceAngle) {
      trace.status = RunStatus::Diverged;
    }

    const TraceAnalysis analysis = analyze_trace(trace);
    fs::create_directories(config.output_dir);
    write_text(config.output_dir / "cycles.json", cycles_json(analysis).dump(2) + "\n");
    write_text(config.output_dir / "verdict.json", to_json(analysis.verdict).dump(2) + "\n");
    out << to_json(analysis.verdict).dump() << '\n';
    return exit_code(analysis.verdict);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

int cmd_list_cases(std::ostream& out) {
  for (const CaseId& id : all_cases()) {
    out << "case " << id.number << " variant " << id.variant << ": " << describe_case(id) << '\n';
  }
  return kExitStable;
}

AxisRange parse_axis(SweepAxis axis, std::string_view spec) {
  AxisRange range{axis, {}};
  if (spec.find(':') != std::string_view::npos) {
    const auto a = spec.find(':');
    const auto b = spec.find(':', a + 1);
    if (b == std::string_view::npos) throw InvalidScenario("axis range must be lo:hi:step");
    range.values = make_grid(parse_double(spec.substr(0, a)), parse_double(spec.substr(a + 1, b - a - 1)),
                             parse_double(spec.substr(b + 1)));
    return range;
  }
  std::size_t pos = 0;
  while (pos <= spec.size()) {
    const auto comma = spec.find(',', pos);
    const std::string_view item = spec.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (!item.empty()) range.values.push_back(parse_double(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (range.values.empty()) throw InvalidScenario("axis " + std::string(to_string(axis)) + " is empty");
  return range;
}

unsigned threads_from_env() {
  const char* env = std::getenv("SWINGLAB_THREADS");
  if (env == nullptr) return 1;
  try {
    const double n = parse_double(env);
    if (n >= 1.0 && n <= 1024.0) return static_cast<unsigned>(n);
  } catch (const ParseError&) {
  }
  return 1;
}

int main(int argc, char** argv) {
  CLI::App app{"Transient stability of an SG next to a grid-following IBR"};
  app.require_subcommand(1);

  RunConfig run;
  int case_number = 0;
  int variant = 0;
  std::string scenario_path;
  bool no_trace = false;
  bool no_phase = false;
  double dt = 0.0;
  double t_end = 0.0;

  const auto add_source = [&](CLI::App* sub) {
    auto* c = sub->add_option("--case", case_number, "Builtin study case (1-7)");
    sub->add_option("--variant", variant, "Which of the two compared settings (0 or 1)");
    auto* s = sub->add_option("--scenario", scenario_path, "Scenario file");
    c->excludes(s);
    sub->add_option("--dt", dt, "Integration step override, s");
    sub->add_option("--t-end", t_end, "End time override, s");
    sub->add_option("--out", run.output_dir, "Output directory");
  };

  auto* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  add_source(run_cmd);
  run_cmd->add_flag("--no-trace", no_trace, "Skip trace.csv");
  run_cmd->add_flag("--no-phase", no_phase, "Skip phase.csv");

  auto* sweep_cmd = app.add_subcommand("sweep", "Stability map over parameter grids");
  add_source(sweep_cmd);
  std::string sigma_spec, rate_spec, rf_spec, d_spec;
  sweep_cmd->add_option("--sigma", sigma_spec, "LVRT active current, lo:hi:step or list");
  sweep_cmd->add_option("--rate", rate_spec, "Recovery rate, lo:hi:step or list (inf allowed)");
  sweep_cmd->add_option("--rf", rf_spec, "Fault resistance in ohm, lo:hi:step or list");
  sweep_cmd->add_option("--damping", d_spec, "SG damping, lo:hi:step or list");
  unsigned threads = 0;
  sweep_cmd->add_option("--threads", threads, "Worker threads (default: SWINGLAB_THREADS or 1)");

  auto* analyze_cmd = app.add_subcommand("analyze", "Energy ledger and verdict of a stored trace");
  AnalyzeConfig analyze;
  std::string trace_path;
  analyze_cmd->add_option("trace", trace_path, "trace.csv")->required();
  auto* ac = analyze_cmd->add_option("--case", case_number, "Builtin case that produced the trace");
  analyze_cmd->add_option("--variant", variant, "Case variant");
  auto* as = analyze_cmd->add_option("--scenario", scenario_path, "Scenario file that produced the trace");
  ac->excludes(as);
  analyze_cmd->add_option("--out", analyze.output_dir, "Output directory");

  auto* list_cmd = app.add_subcommand("list-cases", "Print the builtin study cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitStable : kExitError;
  }

  const auto fill_source = [&](CLI::App* sub, RunConfig& cfg) {
    if (sub->count("--case")) cfg.builtin = CaseId{case_number, variant};
    if (sub->count("--scenario")) cfg.scenario_path = scenario_path;
    if (sub->count("--dt")) cfg.dt = dt;
    if (sub->count("--t-end")) cfg.t_end = t_end;
  };

  if (run_cmd->parsed()) {
    fill_source(run_cmd, run);
    run.emit_trace = !no_trace;
    run.emit_phase = !no_phase;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (sweep_cmd->parsed()) {
    SweepConfig cfg;
    fill_source(sweep_cmd, run);
    cfg.base = run;
    try {
      if (sweep_cmd->count("--sigma")) cfg.axes.push_back(parse_axis(SweepAxis::Sigma, sigma_spec));
      if (sweep_cmd->count("--rate")) cfg.axes.push_back(parse_axis(SweepAxis::RecoveryRate, rate_spec));
      if (sweep_cmd->count("--rf")) cfg.axes.push_back(parse_axis(SweepAxis::FaultResistance, rf_spec));
      if (sweep_cmd->count("--damping")) cfg.axes.push_back(parse_axis(SweepAxis::Damping, d_spec));
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kExitError;
    }
    cfg.threads = sweep_cmd->count("--threads") ? threads : threads_from_env();
    return cmd_sweep(cfg, std::cout, std::cerr);
  }
  if (analyze_cmd->parsed()) {
    analyze.trace_path = trace_path;
    if (analyze_cmd->count("--case")) analyze.builtin = CaseId{case_number, variant};
    if (analyze_cmd->count("--scenario")) analyze.scenario_path = scenario_path;
    return cmd_analyze(analyze, std::cout, std::cerr);
  }
  if (list_cmd->parsed()) return cmd_list_cases(std::cout);
  return kExitError;
}

}  // namespace swinglab::cli
