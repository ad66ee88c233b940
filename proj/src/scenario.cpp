#include "swinglab/scenario.hpp"

#include <cmath>

#include "swinglab/errors.hpp"

namespace swinglab {

IbrParams Scenario::ibr_params() const {
  return IbrParams{
      .sigma = ibr.sigma_pu,
      .recovery_rate = ibr.recovery_rate_pu_per_s,
      .k_q = ibr.k_q,
      .u_enter = ibr.u_enter_pu,
      .u_exit = ibr.u_exit_pu,
      .i_max = ibr.i_max_pu,
      .p_dispatch = ibr.dispatch_mw / network.s_base_mva,
  };
}

void Scenario::validate() const {
  network.validate();
  if (!(sg.t_j_s > 0.0) || !std::isfinite(sg.t_j_s)) throw InvalidScenario("sg.t_j_s must be positive");
  if (!(sg.d_pu >= 0.0) || !std::isfinite(sg.d_pu)) throw InvalidScenario("sg.d_pu must be non-negative");
  if (!std::isfinite(sg.dispatch_mw)) throw InvalidScenario("sg.dispatch_mw must be finite");
  ibr_params().validate();
  if (fault.enabled) fault.validate();
  if (!(dt_s > 0.0) || !std::isfinite(dt_s)) throw InvalidScenario("sim.dt_s must be positive");
  if (!(t_end_s > 0.0) || !std::isfinite(t_end_s)) throw InvalidScenario("sim.t_end_s must be positive");
  if (fault.enabled && !(t_end_s > fault.t_clear_s)) {
    throw InvalidScenario("sim.t_end_s must be later than fault.t_clear_s");
  }
}

}  // namespace swinglab
