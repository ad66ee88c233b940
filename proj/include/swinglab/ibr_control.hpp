#pragma once

#include <limits>
#include <string_view>

#include "swinglab/phasor.hpp"

namespace swinglab {

/// Grid-following IBR controller modes.
enum class IbrMode { Normal, Lvrt, Recovery };

std::string_view to_string(IbrMode mode);
/// Throws ParseError on unknown names.
IbrMode parse_ibr_mode(std::string_view text);

/// Quasi-static control settings. Currents are on the system per-unit base.
struct IbrParams {
  /// Active current command held during LVRT (absolute pu, capped by i_max).
  double sigma = 0.5;
  /// Post-fault active current ramp, pu/s. Infinity means a step.
  double recovery_rate = std::numeric_limits<double>::infinity();
  double k_q = 2.0;
  double u_enter = 0.9;
  double u_exit = 0.9;
  double i_max = 1.2;
  /// Steady active power set point, pu.
  double p_dispatch = 0.0;

  /// Throws InvalidScenario when a field is out of range.
  void validate() const;

  friend bool operator==(const IbrParams&, const IbrParams&) = default;
};

/// Active (d) and reactive (q) current command in the PLL frame.
struct CurrentCommand {
  double i_d = 0.0;
  double i_q = 0.0;
};

struct IbrState {
  IbrMode mode = IbrMode::Normal;
  double i_d = 0.0;
  double i_q = 0.0;
  double t_mode_entry = 0.0;
  double i_d_at_clear = 0.0;
  double i_d_target = 0.0;
};

/// Steady unity-power-factor law: constant active power, no reactive current.
CurrentCommand normal_currents(double u_mag, const IbrParams& params);

/// Reactive-priority LVRT law: droop reactive current, active current held at
/// sigma under the converter ceiling.
CurrentCommand lvrt_currents(double u_mag, const IbrParams& params);

/// Ramp recovery of the active current from its value at clearing toward
/// `state.i_d_target`; reactive current is withdrawn.
CurrentCommand recovery_currents(double t_since_clear, const IbrState& state,
                                 const IbrParams& params);

/// Current command of the active mode at time `t` and PCC magnitude `u_mag`.
/// In Recovery the ramp target tracks the live Normal-mode current so the
/// hand-over to Normal is continuous.
CurrentCommand command_currents(const IbrState& state, double u_mag, double t,
                                const IbrParams& params);

/// Evaluates at most one mode change. Normal -> Lvrt on a voltage dip,
/// Lvrt -> Recovery once the fault is cleared and the voltage is back above
/// u_exit, Recovery -> Normal once the ramp reaches its target.
IbrState mode_transition(const IbrState& state, double u_mag, bool fault_cleared,
                         double t, const IbrParams& params);

/// Output current phasor: magnitude hypot(i_d, i_q) lagging the PCC angle
/// `theta` by atan2(i_q, i_d), so P = |U| i_d and Q = |U| i_q.
Phasor current_phasor(double i_d, double i_q, double theta);

}  // namespace swinglab
