// Acceptance suite: one PASS/FAIL line per criterion. With no arguments all
// criteria run; `--criterion N` runs one. Exit status is non-zero if any
// selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/nodal.hpp"
#include "swinglab/energy_analysis.hpp"
#include "swinglab/io.hpp"
#include "swinglab/network.hpp"
#include "swinglab/scenario_lab.hpp"
#include "swinglab/simulator.hpp"

using namespace swinglab;

namespace {

// Tolerances.
constexpr double kPowerResidual = 1e-8;         // |P_E(delta_s) - P_M|
constexpr double kQuiescentDrift = 1e-9;        // rad over 10 s
constexpr double kEquilibriumBudget = 5.0;      // s for the whole equilibrium suite
constexpr double kEnergyDrift = 1e-5;           // pu over 10 s, D = 0, frozen IBR
constexpr double kMinOrder = 3.5;
constexpr double kIdentityRms = 1e-3;           // relative to peak |dV/dt|
constexpr double kKronTolerance = 1e-10;
constexpr double kLedgerTolerance = 1e-4;       // pu per cycle
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Trace run(CaseId id) { return run_simulation(builtin_case(id)); }

std::size_t index_at(const Trace& t, double time) {
  for (std::size_t k = 0; k < t.samples.size(); ++k)
    if (t.samples[k].t >= time) return k;
  return t.samples.size() - 1;
}

// ---------------------------------------------------------------------------

Result equilibrium_suite() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_residual = 0.0;
  double worst_drift = 0.0;
  for (int n = 1; n <= 7; ++n) {
    Scenario s = builtin_case({n, 0});
    const PreparedScenario prep = prepare_scenario(s);
    const InterfaceSolution sol = solve_interface(
        prep.healthy, prep.equilibrium.delta_s, prep.sg.e_s_mag,
        [&](double u, double) { return normal_currents(u, prep.ibr); }, prep.u_pcc0);
    worst_residual = std::max(worst_residual, std::abs(sol.p_e - prep.sg.p_m));

    s.fault.enabled = false;
    const Trace t = run_simulation(s);
    for (const TraceSample& x : t.samples)
      worst_drift = std::max(worst_drift, std::abs(x.delta - prep.equilibrium.delta_s));
  }
  const double elapsed = seconds_since(t0);
  return {worst_residual < kPowerResidual && worst_drift < kQuiescentDrift && elapsed < kEquilibriumBudget,
          fmt("max |P_E - P_M| = %.2e, max drift = %.2e rad, %.2f s", worst_residual, worst_drift, elapsed)};
}

Result energy_conservation() {
  Scenario s = builtin_case({1, 0});
  s.fault.enabled = false;
  s.sg.d_pu = 0.0;
  const PreparedScenario prep = prepare_scenario(s);
  RunOptions opts;
  opts.freeze_ibr = true;
  opts.initial_state = RotorState{prep.initial.delta + 0.5, 0.0};

  const Trace t = run_simulation(s, opts);
  double drift = 0.0;
  for (const TraceSample& x : t.samples) drift = std::max(drift, std::abs(x.v - t.samples.front().v));

  // Max error against a fine reference over a 2 s window, halving the step.
  const auto trajectory = [&](double dt) {
    Scenario h = s;
    h.dt_s = dt;
    h.t_end_s = 2.0;
    return run_simulation(h, opts).samples;
  };
  const auto ref = trajectory(5e-4);
  const auto error = [&](double dt) {
    const auto coarse = trajectory(dt);
    const std::size_t stride = static_cast<std::size_t>(std::lround(dt / 5e-4));
    double worst = 0.0;
    for (std::size_t k = 0; k < coarse.size(); ++k)
      worst = std::max(worst, std::abs(coarse[k].delta - ref[k * stride].delta));
    return worst;
  };
  const double e8 = error(8e-3), e4 = error(4e-3), e2 = error(2e-3);
  const double order = std::min(std::log2(e8 / e4), std::log2(e4 / e2));
  return {drift <= kEnergyDrift && order >= kMinOrder,
          fmt("V(0) = %.4f, max |V - V(0)| = %.2e pu, order = %.2f", t.samples.front().v, drift, order)};
}

Result rate_identity() {
  double worst = 0.0;
  std::string worst_case;
  for (const CaseId id : all_cases()) {
    const Trace t = run(id);
    std::vector<double> jumps;
    for (const TraceEvent& e : t.events) jumps.push_back(e.t);
    const auto is_jump = [&](double x) { return std::find(jumps.begin(), jumps.end(), x) != jumps.end(); };

    double sq = 0.0, peak = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 1; k + 1 < t.samples.size(); ++k) {
      const TraceSample& l = t.samples[k - 1];
      const TraceSample& m = t.samples[k];
      const TraceSample& r = t.samples[k + 1];
      if (is_jump(l.t) || is_jump(m.t) || is_jump(r.t)) continue;
      const double fd = (r.v - l.v) / (r.t - l.t);
      const double model = energy_rate_terms(m, t.reference).sum();
      sq += (fd - model) * (fd - model);
      peak = std::max(peak, std::abs(model));
      ++n;
    }
    const double rel = std::sqrt(sq / static_cast<double>(n)) / peak;
    if (rel > worst) {
      worst = rel;
      worst_case = fmt("case %d/%d", id.number, id.variant);
    }
  }
  return {worst < kIdentityRms, fmt("worst RMS / peak = %.2e (%s)", worst, worst_case.c_str())};
}

Result kron_oracle() {
  const RawNetworkParams raw;
  const Complex e = std::polar(1.1, 0.7);
  const Complex i_w = std::polar(0.65, 0.2);
  double worst = 0.0;
  for (double r_f : {0.0, 5.0, 25.0}) {
    for (double lambda : {0.1, 0.5, 0.9}) {
      FaultSpec f;
      f.r_f_ohm = r_f;
      f.lambda = lambda;
      const ReducedNetwork net = faulted_equivalent(raw, f);
      const Complex ours = solve_pcc_voltage(net, Phasor(e), Phasor(i_w)).value();
      const Complex ref =
          oracle::faulted_pcc_voltage(raw.y_s, raw.y_g, r_f / raw.z_base_ohm, lambda, e, raw.u_g.value(), i_w);
      worst = std::max(worst, std::abs(ours - ref));
    }
  }
  return {worst < kKronTolerance, fmt("max |U_pcc - U_nodal| = %.2e over 9 fault cases", worst)};
}

// First increasing swing that starts after the given one.
std::optional<SwingSegment> next_increasing(const std::vector<SwingSegment>& swings, std::size_t from) {
  for (std::size_t i = from + 1; i < swings.size(); ++i)
    if (swings[i].direction == SwingDirection::AngleIncreasing) return swings[i];
  return std::nullopt;
}

Result damping_sign() {
  const Scenario c1 = builtin_case({1, 0});
  const double t_on = c1.fault.t_on_s, t_clear = c1.fault.t_clear_s;
  const auto fault_sign = [&](const Trace& t) {
    bool pos = true, neg = true;
    for (const TraceSample& x : t.samples) {
      if (x.t <= t_on || x.t > t_clear) continue;
      pos = pos && x.d_omega > 0.0;
      neg = neg && x.d_omega < 0.0;
    }
    return pos ? 1 : neg ? -1 : 0;
  };

  const Trace a05 = run({1, 0}), a07 = run({1, 1});
  const double v05 = a05.samples[index_at(a05, t_clear)].v;
  const double v07 = a07.samples[index_at(a07, t_clear)].v;
  const bool case1 = fault_sign(a05) > 0 && fault_sign(a07) > 0 && v05 < v07;

  const Trace b0 = run({2, 0}), b1 = run({2, 1});
  const double w0 = b0.samples[index_at(b0, t_clear)].v;
  const double w1 = b1.samples[index_at(b1, t_clear)].v;
  const auto peak = [](const Trace& t) {
    const auto swings = segment_swings(t.samples);
    const auto inc = next_increasing(swings, 0);
    return inc ? inc->delta_extreme : std::numeric_limits<double>::quiet_NaN();
  };
  const double p0 = peak(b0), p1 = peak(b1);
  const bool case2 = fault_sign(b0) < 0 && fault_sign(b1) < 0 && std::abs(w0) > std::abs(w1) && p0 > p1;

  return {case1 && case2,
          fmt("case 1: V(t_clear) %.5f (sigma 0.5) vs %.5f (0.7); case 2: |V(t_clear)| %.5f (sigma 0) vs %.5f "
              "(0.1), next peak %.4f vs %.4f rad",
              v05, v07, std::abs(w0), std::abs(w1), p0, p1)};
}

struct RecoveryCycle {
  bool found = false;
  double delta_b = 0.0;
  double v_c = 0.0;
  CycleEnergyReport report;
};

// Cycle A -> B -> C where A..B is the first angle-decreasing swing in
// progress after clearing (clipped to start at clearing) and B..C the
// following increasing swing.
RecoveryCycle recovery_cycle(const Trace& t) {
  const double t_clear = t.scenario.fault.t_clear_s;
  const auto swings = segment_swings(t.samples);
  for (std::size_t i = 0; i + 1 < swings.size(); ++i) {
    if (swings[i].direction != SwingDirection::AngleDecreasing || swings[i].t_end <= t_clear) continue;
    SwingSegment down = swings[i];
    if (down.t_start < t_clear) {
      down.first = index_at(t, t_clear);
      down.t_start = t.samples[down.first].t;
    }
    const RecoveryCycle out{true, swings[i].delta_extreme, t.samples[swings[i + 1].last].v,
                            cycle_energy_report(t.samples, t.reference, down, swings[i + 1], t.events)};
    return out;
  }
  return {};
}

Result recovery_effect() {
  bool all = true;
  std::string detail;
  for (int n : {5, 6, 7}) {
    const Trace inf = run({n, 0});
    const Trace fin = run({n, 1});
    const RecoveryCycle ci = recovery_cycle(inf);
    const RecoveryCycle cf = recovery_cycle(fin);
    bool ok = ci.found && cf.found;
    if (ok) {
      const double led_f = std::abs(cf.report.dv_total - (cf.report.dv_w - cf.report.dv_d));
      const double led_i = std::abs(ci.report.dv_total - (ci.report.dv_w - ci.report.dv_d));
      const bool lower_b = cf.delta_b < ci.delta_b;
      const bool larger_v = cf.v_c > ci.v_c;
      const bool mvt = cf.report.mvt_1 < cf.report.mvt_2 && cf.report.mvt_2 <= 0.0;
      const bool ledger = led_f < kLedgerTolerance && led_i < kLedgerTolerance;
      ok = lower_b && larger_v && mvt && ledger;
      detail += fmt("\n    case %d: B %.4f vs B' %.4f [%s], V(C) %.5f vs %.5f [%s], mvt %.4f < %.4f <= 0 [%s], "
                    "ledger %.1e/%.1e [%s]",
                    n, cf.delta_b, ci.delta_b, lower_b ? "ok" : "no", cf.v_c, ci.v_c, larger_v ? "ok" : "no",
                    cf.report.mvt_1, cf.report.mvt_2, mvt ? "ok" : "no", led_f, led_i, ledger ? "ok" : "no");
    } else {
      detail += fmt("\n    case %d: no recovery cycle found", n);
    }
    all = all && ok;
  }
  return {all, detail};
}

struct Neighborhood {
  Scenario base;
  std::vector<AxisRange> axes;
  StabilityMap map;
};

Neighborhood sweep_neighborhood(double damping) {
  Neighborhood nb;
  nb.base = builtin_case({7, 1});
  nb.base.sg.d_pu = damping;
  nb.axes = {{SweepAxis::Sigma, make_grid(0.1, 0.3, 0.05)},
             {SweepAxis::RecoveryRate, make_grid(0.2, 0.6, 0.05)}};
  nb.map = sweep(nb.base, nb.axes, 0);
  return nb;
}

// Cells that are multi-swing unstable while the rate = inf run differs.
std::vector<MapCell> multi_swing_cells(const Neighborhood& nb) {
  std::vector<MapCell> out;
  for (const MapCell& c : nb.map.cells) {
    if (c.outcome != CellOutcome::Unstable || c.swing_index.value_or(0) < 2) continue;
    Scenario s = nb.base;
    apply_axis(s, SweepAxis::Sigma, c.coords[0]);
    apply_axis(s, SweepAxis::RecoveryRate, kInf);
    const MapCell step = evaluate_cell(s);
    if (step.outcome != c.outcome || step.swing_index != c.swing_index) out.push_back(c);
  }
  return out;
}

std::optional<Neighborhood> g_nominal;

const Neighborhood& nominal() {
  if (!g_nominal) g_nominal = sweep_neighborhood(builtin_case({7, 1}).sg.d_pu);
  return *g_nominal;
}

std::string summarize(const Neighborhood& nb) {
  int stable = 0, unstable = 0, failed = 0;
  for (const MapCell& c : nb.map.cells) {
    stable += c.outcome == CellOutcome::Stable;
    unstable += c.outcome == CellOutcome::Unstable;
    failed += c.outcome == CellOutcome::Failed;
  }
  return fmt("%zu cells at D = %g: %d stable, %d unstable, %d failed", nb.map.cells.size(), nb.base.sg.d_pu,
             stable, unstable, failed);
}

Result multi_swing() {
  const Neighborhood& nb = nominal();
  const auto hits = multi_swing_cells(nb);
  std::string detail = summarize(nb);
  if (!hits.empty()) {
    detail += fmt("; e.g. sigma %.2f, rate %.2f unstable at swing %d", hits[0].coords[0], hits[0].coords[1],
                  *hits[0].swing_index);
  }
  // Reference only, not part of the verdict: the same neighborhood without damping.
  const Neighborhood undamped = sweep_neighborhood(0.0);
  const auto extra = multi_swing_cells(undamped);
  detail += fmt("\n    (not counted) %s, %zu multi-swing cells", summarize(undamped).c_str(), extra.size());
  if (!extra.empty()) {
    detail += fmt(", e.g. sigma %.2f, rate %.2f at swing %d", extra[0].coords[0], extra[0].coords[1],
                  *extra[0].swing_index);
  }
  return {!hits.empty(), detail};
}

Result damping_rescue() {
  const Neighborhood& nb = nominal();
  const auto hits = multi_swing_cells(nb);
  const auto rescue = [&](const Scenario& base, const MapCell& c, std::string& detail) {
    Scenario s = base;
    apply_axis(s, SweepAxis::Sigma, c.coords[0]);
    apply_axis(s, SweepAxis::RecoveryRate, c.coords[1]);
    const auto th = find_stabilizing_damping(s, s.sg.d_pu, std::max(4.0 * s.sg.d_pu, 40.0));
    detail += th ? fmt("\n    sigma %.2f, rate %.2f: D* in (%.3f, %.3f]", c.coords[0], c.coords[1],
                       th->d_unstable, th->d_stable)
                 : fmt("\n    sigma %.2f, rate %.2f: no stabilizing D found", c.coords[0], c.coords[1]);
    return th.has_value();
  };

  std::string detail;
  if (hits.empty()) {
    detail = "no unstable cell from criterion 7 to rescue";
    const Neighborhood undamped = sweep_neighborhood(0.0);
    const auto extra = multi_swing_cells(undamped);
    if (!extra.empty()) {
      detail += "\n    (not counted) undamped neighborhood:";
      rescue(undamped.base, extra.front(), detail);
    }
    return {false, detail};
  }
  bool all = true;
  for (const MapCell& c : hits) all = rescue(nb.base, c, detail) && all;
  return {all, detail};
}

Result determinism_round_trip() {
  bool ok = true;
  std::string detail;

  const Scenario s = builtin_case({7, 1});
  std::ostringstream a, b;
  const Trace t1 = run_simulation(s);
  write_trace_csv(a, t1.samples);
  write_trace_csv(b, run_simulation(s).samples);
  const bool identical = a.str() == b.str();
  ok = ok && identical;
  detail += fmt("repeat run byte-identical: %s", identical ? "yes" : "no");

  bool scenarios = true;
  for (const CaseId id : all_cases()) scenarios = scenarios && parse_scenario(format_scenario(builtin_case(id))) == builtin_case(id);
  ok = ok && scenarios;
  detail += fmt("; scenario round trip: %s", scenarios ? "exact" : "differs");

  double worst = 0.0;
  bool verdicts = true, samples = true;
  for (const CaseId id : all_cases()) {
    const Trace t = run(id);
    std::stringstream csv;
    write_trace_csv(csv, t.samples);
    Trace back = t;
    back.samples = read_trace_csv(csv);
    samples = samples && back.samples == t.samples;
    const TraceAnalysis x = analyze_trace(t);
    const TraceAnalysis y = analyze_trace(back);
    verdicts = verdicts && x.verdict.outcome == y.verdict.outcome &&
               x.verdict.instability_swing_index == y.verdict.instability_swing_index &&
               x.verdict.classification == y.verdict.classification && x.cycles.size() == y.cycles.size();
    for (std::size_t i = 0; i < std::min(x.cycles.size(), y.cycles.size()); ++i) {
      for (auto f : {&CycleEnergyReport::dv_total, &CycleEnergyReport::dv_w, &CycleEnergyReport::dv_sg,
                     &CycleEnergyReport::dv_d, &CycleEnergyReport::mvt_1, &CycleEnergyReport::mvt_2})
        worst = std::max(worst, std::abs(x.cycles[i].*f - y.cycles[i].*f));
    }
  }
  ok = ok && samples && verdicts && worst <= 1e-12;
  detail += fmt("; trace csv: samples %s, verdicts %s, ledger diff %.1e", samples ? "exact" : "differ",
                verdicts ? "equal" : "differ", worst);
  return {ok, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"equilibrium suite", equilibrium_suite},
      {"energy conservation", energy_conservation},
      {"energy-rate identity", rate_identity},
      {"Kron oracle", kron_oracle},
      {"damping-sign direction", damping_sign},
      {"recovery-effect direction", recovery_effect},
      {"multi-swing existence", multi_swing},
      {"damping rescue", damping_rescue},
      {"determinism and round trip", determinism_round_trip},
  };

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty())
    for (int i = 1; i <= static_cast<int>(criteria.size()); ++i) selected.push_back(i);

  const auto t0 = std::chrono::steady_clock::now();
  int failures = 0;
  for (int n : selected) {
    if (n < 1 || n > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    const auto& [name, fn] = criteria[n - 1];
    Result r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failures += !r.pass;
    std::printf("criterion %d (%s): %s  %s\n", n, name, r.pass ? "PASS" : "FAIL", r.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed in %.1f s\n", static_cast<int>(selected.size()) - failures,
              selected.size(), seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
