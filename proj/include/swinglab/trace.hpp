#pragma once

#include <string_view>
#include <vector>

#include "swinglab/energy_reference.hpp"
#include "swinglab/ibr_control.hpp"
#include "swinglab/machine.hpp"
#include "swinglab/scenario.hpp"

namespace swinglab {

/// Solved system quantities at one instant. Values are right-continuous:
/// a sample taken at an event instant reflects the post-event network and
/// controller mode.
struct TraceSample {
  double t = 0.0;
  double delta = 0.0;
  double d_omega = 0.0;
  double p_e = 0.0;
  double p_sg = 0.0;
  double p_w = 0.0;
  double i_d = 0.0;
  double i_q = 0.0;
  double u_pcc_mag = 0.0;
  double u_pcc_ang = 0.0;
  IbrMode mode = IbrMode::Normal;
  double v = 0.0;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

enum class EventKind { FaultOn, FaultCleared, LvrtEntry, RecoveryStart, RecoveryComplete, Diverged };

std::string_view to_string(EventKind kind);

struct TraceEvent {
  double t = 0.0;
  EventKind kind = EventKind::FaultOn;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

enum class RunStatus { Completed, Diverged, Aborted };

std::string_view to_string(RunStatus status);

struct Trace {
  std::vector<TraceSample> samples;
  Scenario scenario;
  std::vector<TraceEvent> events;
  RunStatus status = RunStatus::Completed;
  EquilibriumPair equilibrium;
  EnergyReference reference;
};

}  // namespace swinglab
