#include "swinglab/simulator.hpp"

#include <cmath>

#include "swinglab/energy_analysis.hpp"

namespace swinglab {

namespace {

// Steps shorter than this fraction of dt are folded into the previous step.
constexpr double kStepSlack = 1e-9;

std::size_t step_count(double span, double dt) {
  return static_cast<std::size_t>(std::ceil(span / dt - kStepSlack));
}

EventKind transition_event(IbrMode to) {
  switch (to) {
    case IbrMode::Lvrt:
      return EventKind::LvrtEntry;
    case IbrMode::Recovery:
      return EventKind::RecoveryStart;
    case IbrMode::Normal:
      break;
  }
  return EventKind::RecoveryComplete;
}

}  // namespace

std::vector<Segment> event_schedule(const Scenario& scenario) {
  scenario.validate();
  const ReducedNetwork healthy = reduce_network(scenario.network);
  if (!scenario.fault.enabled) return {Segment{0.0, scenario.t_end_s, NetworkPhase::PreFault, healthy}};

  const FaultSpec& fault = scenario.fault;
  std::vector<Segment> out;
  if (fault.t_on_s > 0.0) out.push_back({0.0, fault.t_on_s, NetworkPhase::PreFault, healthy});
  out.push_back({fault.t_on_s, fault.t_clear_s, NetworkPhase::FaultOn,
                 faulted_equivalent(scenario.network, fault)});
  out.push_back({fault.t_clear_s, scenario.t_end_s, NetworkPhase::PostFault,
                 post_fault_network(scenario.network, fault)});
  return out;
}

PreparedScenario prepare_scenario(const Scenario& scenario) {
  scenario.validate();
  PreparedScenario prep;
  SgParams seed;
  seed.t_j = scenario.sg.t_j_s;
  seed.d = scenario.sg.d_pu;
  seed.x_d_prime = scenario.sg.x_d_prime_pu;

  const SteadyState steady = initialize_steady_state(
      Dispatch{scenario.sg.dispatch_mw, scenario.ibr.dispatch_mw}, scenario.network, seed);
  prep.sg = steady.sg;
  prep.ibr = scenario.ibr_params();
  if (steady.i_d0 > prep.ibr.i_max) {
    throw InvalidScenario("ibr dispatch needs more than i_max at nominal voltage");
  }
  prep.initial = steady.rotor;
  prep.i_d0 = steady.i_d0;
  prep.u_pcc0 = steady.u_pcc;
  prep.healthy = reduce_network(scenario.network);
  prep.equilibrium = find_equilibria(prep.sg, prep.healthy, prep.ibr, steady.rotor.delta);
  prep.reference = make_energy_reference(prep.sg, prep.healthy, prep.equilibrium);
  return prep;
}

InterfaceSolution solve_at(const StepEnvironment& env, double t, const RotorState& rotor,
                           Phasor& warm_start) {
  InterfaceSolution sol;
  if (env.frozen_offset) {
    const double lock = rotor.delta - *env.frozen_offset;
    const double i_mag = env.frozen_i_d;
    sol = solve_interface(
        *env.network, rotor.delta, env.sg->e_s_mag,
        [lock, i_mag](double, double theta) {
          return CurrentCommand{i_mag * std::cos(lock - theta), -i_mag * std::sin(lock - theta)};
        },
        warm_start);
  } else {
    const IbrState& ctrl = env.controller;
    const IbrParams& ibr = *env.ibr;
    sol = solve_interface(
        *env.network, rotor.delta, env.sg->e_s_mag,
        [&ctrl, &ibr, t](double u_mag, double) { return command_currents(ctrl, u_mag, t, ibr); },
        warm_start);
  }
  warm_start = sol.u_pcc;
  return sol;
}

RotorState rk4_step(const RotorState& state, double t, double dt, const StepEnvironment& env,
                    Phasor& warm_start) {
  const auto f = [&](const RotorState& s, double ts) {
    const InterfaceSolution sol = solve_at(env, ts, s, warm_start);
    return swing_rhs(s, sol.p_e, *env.sg);
  };
  const auto shifted = [](const RotorState& s, const RotorDerivative& k, double h) {
    return RotorState{s.delta + h * k.d_delta_dt, s.d_omega + h * k.d_domega_dt};
  };

  const double half = 0.5 * dt;
  const RotorDerivative k1 = f(state, t);
  const RotorDerivative k2 = f(shifted(state, k1, half), t + half);
  const RotorDerivative k3 = f(shifted(state, k2, half), t + half);
  const RotorDerivative k4 = f(shifted(state, k3, dt), t + dt);
  return RotorState{
      state.delta + dt / 6.0 * (k1.d_delta_dt + 2.0 * k2.d_delta_dt + 2.0 * k3.d_delta_dt + k4.d_delta_dt),
      state.d_omega + dt / 6.0 * (k1.d_domega_dt + 2.0 * k2.d_domega_dt + 2.0 * k3.d_domega_dt + k4.d_domega_dt),
  };
}

Trace run_simulation(const Scenario& scenario, const RunOptions& options) {
  const PreparedScenario prep = prepare_scenario(scenario);
  const std::vector<Segment> schedule = event_schedule(scenario);

  Trace trace;
  trace.scenario = scenario;
  trace.equilibrium = prep.equilibrium;
  trace.reference = prep.reference;
  trace.samples.reserve(step_count(scenario.t_end_s, scenario.dt_s) + 2);

  RotorState rotor = options.initial_state.value_or(prep.initial);
  IbrState ctrl;
  ctrl.mode = IbrMode::Normal;
  ctrl.i_d = prep.i_d0;
  ctrl.i_d_target = prep.i_d0;
  Phasor warm = prep.u_pcc0;

  StepEnvironment env;
  env.sg = &prep.sg;
  env.ibr = &prep.ibr;
  if (options.freeze_ibr) {
    env.frozen_offset = prep.equilibrium.delta_s - prep.u_pcc0.angle();
    env.frozen_i_d = prep.i_d0;
  }

  const double dt = scenario.dt_s;
  const FaultSpec& fault = scenario.fault;
  try {
    for (std::size_t s = 0; s < schedule.size(); ++s) {
      const Segment& seg = schedule[s];
      const bool last_segment = s + 1 == schedule.size();
      if (seg.phase == NetworkPhase::FaultOn) trace.events.push_back({seg.t_start, EventKind::FaultOn});
      if (seg.phase == NetworkPhase::PostFault) {
        trace.events.push_back({seg.t_start, EventKind::FaultCleared});
      }
      env.network = &seg.network;

      const std::size_t n = step_count(seg.t_end - seg.t_start, dt);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == n && !last_segment) break;  // the next segment owns its start sample
        const double t = i == n ? seg.t_end : seg.t_start + static_cast<double>(i) * dt;

        env.controller = ctrl;
        InterfaceSolution sol = solve_at(env, t, rotor, warm);
        if (!options.freeze_ibr) {
          const bool cleared = fault.enabled && t >= fault.t_clear_s;
          const IbrState next = mode_transition(ctrl, sol.u_pcc.magnitude(), cleared, t, prep.ibr);
          if (next.mode != ctrl.mode) {
            trace.events.push_back({t, transition_event(next.mode)});
            ctrl = next;
            env.controller = ctrl;
            sol = solve_at(env, t, rotor, warm);
          } else {
            ctrl = next;
          }
        }
        ctrl.i_d = sol.i_d;
        ctrl.i_q = sol.i_q;
        env.controller = ctrl;

        trace.samples.push_back(TraceSample{
            .t = t,
            .delta = rotor.delta,
            .d_omega = rotor.d_omega,
            .p_e = sol.p_e,
            .p_sg = sol.p_sg,
            .p_w = sol.p_w,
            .i_d = sol.i_d,
            .i_q = sol.i_q,
            .u_pcc_mag = sol.u_pcc.magnitude(),
            .u_pcc_ang = sol.u_pcc.angle(),
            .mode = ctrl.mode,
            .v = 0.0,
        });

        if (std::abs(rotor.delta) > kDivergenceAngle) {
          trace.events.push_back({t, EventKind::Diverged});
          trace.status = RunStatus::Diverged;
          annotate_energy(trace.samples, trace.reference);
          return trace;
        }
        if (i == n) break;
        const double h = i + 1 == n ? seg.t_end - t : dt;
        rotor = rk4_step(rotor, t, h, env, warm);
      }
    }
  } catch (const NoConvergence& e) {
    trace.status = RunStatus::Aborted;
    annotate_energy(trace.samples, trace.reference);
    throw SimulationAborted(e, std::move(trace));
  }
  annotate_energy(trace.samples, trace.reference);
  return trace;
}

}  // namespace swinglab
