#pragma once

#include <numbers>

#include "swinglab/ibr_control.hpp"
#include "swinglab/network.hpp"
#include "swinglab/phasor.hpp"

namespace swinglab {

/// Classical SG: constant EMF behind transient reactance.
struct SgParams {
  double t_j = 8.0;
  double d = 10.0;
  double p_m = 0.0;
  double e_s_mag = 1.0;
  /// Already folded into the SG branch admittance; informational.
  double x_d_prime = 0.15;
  double omega_g = 2.0 * std::numbers::pi * 50.0;

  void validate() const;
};

struct RotorState {
  double delta = 0.0;
  double d_omega = 0.0;
};

struct RotorDerivative {
  double d_delta_dt = 0.0;
  double d_domega_dt = 0.0;
};

struct EquilibriumPair {
  double delta_s = 0.0;
  double delta_uep = std::numbers::pi;
  double p_w_ss = 0.0;
  /// Potential energy at the UEP with the coupling power frozen at p_w_ss.
  double v_crit = 0.0;
};

/// Electrical power split P_E = P_sg - P_w.
struct PowerSplit {
  double p_e = 0.0;
  double p_sg = 0.0;
  double p_w = 0.0;
};

/// P_sg is the SG output with no IBR injection, Re(E conj(y_sg (E - U_g_eff)));
/// P_w = Re(E conj(alpha I_w)) is the share of the IBR current that the SG
/// sees. For lossless branches these reduce to E U |y_sg| sin(delta - phi)
/// and alpha E |I_w| cos(delta - phi_w).
PowerSplit electrical_power(double delta, const ReducedNetwork& net, double e_s_mag, Phasor i_w);

RotorDerivative swing_rhs(const RotorState& state, double p_e, const SgParams& params);

/// Stable equilibrium with the coupling power solved self-consistently under
/// the steady unity-power-factor law. `seed` starts the iteration (use the
/// power-flow angle when known). Throws InfeasibleDispatch.
EquilibriumPair find_equilibria(const SgParams& params, const ReducedNetwork& net,
                                const IbrParams& ibr, double seed = 0.0);

struct Dispatch {
  double p_sg_mw = 0.0;
  double p_ibr_mw = 0.0;
};

struct SteadyState {
  SgParams sg;
  RotorState rotor;
  double i_d0 = 0.0;
  /// PCC voltage of the solved power flow (|U| = 1).
  Phasor u_pcc;
};

/// Power flow with |U_pcc| = 1, both sources at the given MW and the IBR at
/// unity power factor. `seed` supplies t_j, d and x_d_prime; p_m and e_s_mag
/// are overwritten.
SteadyState initialize_steady_state(const Dispatch& dispatch, const RawNetworkParams& raw,
                                    const SgParams& seed);

}  // namespace swinglab
