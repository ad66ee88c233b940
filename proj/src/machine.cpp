#include "swinglab/machine.hpp"

#include <cmath>
#include <numbers>

#include "swinglab/errors.hpp"

namespace swinglab {

void SgParams::validate() const {
  if (!(t_j > 0.0) || !std::isfinite(t_j)) throw InvalidScenario("sg: t_j must be positive");
  if (!(d >= 0.0) || !std::isfinite(d)) throw InvalidScenario("sg: damping must be non-negative");
  if (!(e_s_mag > 0.0) || !std::isfinite(e_s_mag)) throw InvalidScenario("sg: |E_s| must be positive");
  if (!(omega_g > 0.0)) throw InvalidScenario("sg: omega_g must be positive");
}

PowerSplit electrical_power(double delta, const ReducedNetwork& net, double e_s_mag, Phasor i_w) {
  const Complex e = std::polar(e_s_mag, delta);
  const double p_sg = (e * std::conj(net.y_sg * (e - net.u_g_eff.value()))).real();
  const double p_w = (e * std::conj(net.alpha * i_w.value())).real();
  return {p_sg - p_w, p_sg, p_w};
}

RotorDerivative swing_rhs(const RotorState& state, double p_e, const SgParams& params) {
  return {params.omega_g * state.d_omega,
          (params.p_m - p_e - params.d * state.d_omega) / params.t_j};
}

EquilibriumPair find_equilibria(const SgParams& params, const ReducedNetwork& net,
                                const IbrParams& ibr, double seed) {
  constexpr double kTolerance = 1e-10;
  constexpr double kRelaxation = 0.7;
  constexpr int kMaxIterations = 500;

  const double amp = params.e_s_mag * net.u_g_eff.magnitude() * std::abs(net.y_sg);
  const InterfaceControl control = [&ibr](double u_mag, double) {
    return normal_currents(u_mag, ibr);
  };

  double delta = seed;
  Phasor warm;
  double step = 0.0;
  for (int it = 0; it < kMaxIterations; ++it) {
    const InterfaceSolution sol = solve_interface(net, delta, params.e_s_mag, control, warm);
    warm = sol.u_pcc;
    // p_sg - amp sin(delta) vanishes for a lossless network at zero grid angle;
    // it keeps the fixed point exact otherwise.
    const double ratio = (params.p_m + sol.p_w - (sol.p_sg - amp * std::sin(delta))) / amp;
    if (std::abs(ratio) > 1.0) {
      throw InfeasibleDispatch("no stable equilibrium: |P_M + P_w| exceeds E U |Y_sg|");
    }
    const double next = std::asin(ratio);
    step = next - delta;
    if (std::abs(step) < kTolerance) {
      delta = next;
      const InterfaceSolution fin = solve_interface(net, delta, params.e_s_mag, control, warm);
      const double p_total = params.p_m + fin.p_w;
      const double uep = std::numbers::pi - delta;
      const double v_crit =
          -amp * (std::cos(uep) - std::cos(delta)) - p_total * (uep - delta);
      return EquilibriumPair{delta, uep, fin.p_w, v_crit};
    }
    delta += kRelaxation * step;
  }
  throw NoConvergence("equilibrium iteration did not converge", kMaxIterations, std::abs(step));
}

SteadyState initialize_steady_state(const Dispatch& dispatch, const RawNetworkParams& raw,
                                    const SgParams& seed) {
  raw.validate();
  const double p_sg = dispatch.p_sg_mw / raw.s_base_mva;
  const double p_ibr = dispatch.p_ibr_mw / raw.s_base_mva;
  const double i_d0 = p_ibr;  // |U_pcc| = 1

  // Power into the grid branch from U = 1∠theta is G - |U_g||Y_g| cos(x - psi)
  // with x = theta - angle(U_g); it rises monotonically for x in [psi, psi + pi].
  const Complex y_g = raw.y_g;
  const double u_g_mag = raw.u_g.magnitude();
  const double psi = std::arg(y_g);
  const auto grid_power = [&](double theta) {
    const Complex u = std::polar(1.0, theta);
    return (u * std::conj((u - raw.u_g.value()) * y_g)).real();
  };
  const double target = p_sg + p_ibr;
  const double p_lo = y_g.real() - u_g_mag * std::abs(y_g);
  const double p_hi = y_g.real() + u_g_mag * std::abs(y_g);
  if (target < p_lo || target > p_hi) {
    throw InfeasibleDispatch("dispatch exceeds the transfer limit of the grid branch");
  }

  double lo = raw.u_g.angle() + psi;
  double hi = lo + std::numbers::pi;
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (grid_power(mid) < target ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);
  if (std::abs(grid_power(theta) - target) > 1e-10) {
    throw NoConvergence("steady-state power flow did not converge", 200,
                        std::abs(grid_power(theta) - target));
  }

  const Complex u = std::polar(1.0, theta);
  const Complex i_grid = (u - raw.u_g.value()) * y_g;
  const Complex i_s = i_grid - std::polar(i_d0, theta);
  const Complex e = u + i_s / raw.y_s;

  SteadyState out;
  out.sg = seed;
  out.sg.e_s_mag = std::abs(e);
  out.sg.p_m = (e * std::conj(i_s)).real();
  out.sg.omega_g = 2.0 * std::numbers::pi * raw.f_g_hz;
  out.sg.validate();
  out.rotor = RotorState{std::arg(e), 0.0};
  out.i_d0 = i_d0;
  out.u_pcc = Phasor(u);
  return out;
}

}  // namespace swinglab
