#pragma once

#include <optional>
#include <vector>

#include "swinglab/energy_reference.hpp"
#include "swinglab/errors.hpp"
#include "swinglab/ibr_control.hpp"
#include "swinglab/machine.hpp"
#include "swinglab/network.hpp"
#include "swinglab/scenario.hpp"
#include "swinglab/trace.hpp"

namespace swinglab {

enum class NetworkPhase { PreFault, FaultOn, PostFault };

struct Segment {
  double t_start = 0.0;
  double t_end = 0.0;
  NetworkPhase phase = NetworkPhase::PreFault;
  ReducedNetwork network;
};

/// Splits [0, t_end] at the fault instants. Throws InvalidScenario.
std::vector<Segment> event_schedule(const Scenario& scenario);

/// Everything derived from a scenario before integration starts.
struct PreparedScenario {
  SgParams sg;
  IbrParams ibr;
  RotorState initial;
  double i_d0 = 0.0;
  Phasor u_pcc0;
  ReducedNetwork healthy;
  EquilibriumPair equilibrium;
  EnergyReference reference;
};

/// Steady-state initialization plus equilibrium and energy reference.
PreparedScenario prepare_scenario(const Scenario& scenario);

struct RunOptions {
  /// Pin the IBR current to its steady projection on the rotor d axis, so
  /// the coupling power stays at its equilibrium value.
  bool freeze_ibr = false;
  /// Start from this rotor state instead of the equilibrium.
  std::optional<RotorState> initial_state;
};

/// Everything an RK4 step holds constant: network, parameters and the
/// controller state (the mode only changes between steps).
struct StepEnvironment {
  const ReducedNetwork* network = nullptr;
  const SgParams* sg = nullptr;
  const IbrParams* ibr = nullptr;
  IbrState controller;
  /// Rotor-frame lock of the IBR current when frozen; nullopt otherwise.
  std::optional<double> frozen_offset;
  double frozen_i_d = 0.0;
};

/// Interface solve at one (t, rotor) point. `warm_start` is read and updated.
InterfaceSolution solve_at(const StepEnvironment& env, double t, const RotorState& rotor,
                           Phasor& warm_start);

/// One classical RK4 update of (delta, d_omega). Throws NoConvergence.
RotorState rk4_step(const RotorState& state, double t, double dt, const StepEnvironment& env,
                    Phasor& warm_start);

/// Thrown when the interface solve fails mid-run. Carries the trace so far.
class SimulationAborted : public NoConvergence {
 public:
  SimulationAborted(const NoConvergence& cause, Trace partial)
      : NoConvergence(cause), partial_(std::move(partial)) {}

  const Trace& partial() const noexcept { return partial_; }

 private:
  Trace partial_;
};

/// Fixed-step RK4 across the event schedule. Stops early once |delta| > 4 pi.
Trace run_simulation(const Scenario& scenario, const RunOptions& options = {});

}  // namespace swinglab
