#include "swinglab/ibr_control.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swinglab/errors.hpp"

namespace swinglab {

std::string_view to_string(IbrMode mode) {
  switch (mode) {
    case IbrMode::Normal:
      return "Normal";
    case IbrMode::Lvrt:
      return "Lvrt";
    case IbrMode::Recovery:
      return "Recovery";
  }
  return "?";
}

IbrMode parse_ibr_mode(std::string_view text) {
  if (text == "Normal") return IbrMode::Normal;
  if (text == "Lvrt") return IbrMode::Lvrt;
  if (text == "Recovery") return IbrMode::Recovery;
  throw ParseError("unknown controller mode '" + std::string(text) + "'");
}

void IbrParams::validate() const {
  if (!(i_max > 0.0) || !std::isfinite(i_max)) throw InvalidScenario("ibr: i_max must be positive");
  if (!(sigma >= 0.0 && sigma <= i_max)) throw InvalidScenario("ibr: sigma must lie in [0, i_max]");
  if (!(recovery_rate > 0.0)) throw InvalidScenario("ibr: recovery rate must be positive or inf");
  if (!(k_q >= 0.0) || !std::isfinite(k_q)) throw InvalidScenario("ibr: k_q must be non-negative");
  if (!(u_exit > 0.0 && u_exit <= u_enter && u_enter < 1.0)) {
    throw InvalidScenario("ibr: thresholds must satisfy 0 < u_exit <= u_enter < 1");
  }
  if (!(p_dispatch >= 0.0) || !std::isfinite(p_dispatch)) {
    throw InvalidScenario("ibr: dispatch must be non-negative");
  }
}

CurrentCommand normal_currents(double u_mag, const IbrParams& params) {
  if (params.p_dispatch == 0.0) return {};
  const double i_d = u_mag > 0.0 ? params.p_dispatch / u_mag : params.i_max;
  return {std::min(i_d, params.i_max), 0.0};
}

CurrentCommand lvrt_currents(double u_mag, const IbrParams& params) {
  const double i_q = std::clamp(params.k_q * (params.u_enter - u_mag), 0.0, params.i_max);
  const double headroom = std::sqrt(std::max(0.0, params.i_max * params.i_max - i_q * i_q));
  return {std::min(params.sigma, headroom), i_q};
}

CurrentCommand recovery_currents(double t_since_clear, const IbrState& state,
                                 const IbrParams& params) {
  if (std::isinf(params.recovery_rate)) return {state.i_d_target, 0.0};
  const double ramp = state.i_d_at_clear + params.recovery_rate * std::max(0.0, t_since_clear);
  return {std::min(ramp, state.i_d_target), 0.0};
}

CurrentCommand command_currents(const IbrState& state, double u_mag, double t,
                                const IbrParams& params) {
  switch (state.mode) {
    case IbrMode::Normal:
      return normal_currents(u_mag, params);
    case IbrMode::Lvrt:
      return lvrt_currents(u_mag, params);
    case IbrMode::Recovery: {
      IbrState live = state;
      live.i_d_target = normal_currents(u_mag, params).i_d;
      return recovery_currents(t - state.t_mode_entry, live, params);
    }
  }
  return {};
}

IbrState mode_transition(const IbrState& state, double u_mag, bool fault_cleared, double t,
                         const IbrParams& params) {
  IbrState next = state;
  switch (state.mode) {
    case IbrMode::Normal:
      if (u_mag < params.u_enter) {
        next.mode = IbrMode::Lvrt;
        next.t_mode_entry = t;
      }
      break;
    case IbrMode::Lvrt:
      if (fault_cleared && u_mag >= params.u_exit) {
        next.mode = IbrMode::Recovery;
        next.t_mode_entry = t;
        next.i_d_at_clear = state.i_d;
        next.i_d_target = normal_currents(u_mag, params).i_d;
        next.i_q = 0.0;
      }
      break;
    case IbrMode::Recovery: {
      const double target = normal_currents(u_mag, params).i_d;
      next.i_d_target = target;
      const bool done = std::isinf(params.recovery_rate) ||
                        state.i_d_at_clear + params.recovery_rate * (t - state.t_mode_entry) >= target;
      if (done) {
        next.mode = IbrMode::Normal;
        next.t_mode_entry = t;
      }
      break;
    }
  }
  return next;
}

Phasor current_phasor(double i_d, double i_q, double theta) {
  if (i_d == 0.0 && i_q == 0.0) return Phasor{};
  // (i_d - j i_q) rotated into the grid frame by the PLL angle.
  return Phasor(Complex(i_d, -i_q) * std::polar(1.0, theta));
}

}  // namespace swinglab
