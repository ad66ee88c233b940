#include "swinglab/network.hpp"

#include <cmath>
#include <limits>

#include "swinglab/errors.hpp"
#include "swinglab/machine.hpp"

namespace swinglab {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

void RawNetworkParams::validate() const {
  if (!finite(y_s) || !finite(y_g) || !finite(y_w) || !finite(u_g.value())) {
    throw InvalidScenario("network admittances and source voltage must be finite");
  }
  if (std::abs(y_s) <= 0.0) throw InvalidScenario("network: |y_s| must be positive");
  if (std::abs(y_g) <= 0.0) throw InvalidScenario("network: |y_g| must be positive");
  if (std::abs(y_s + y_g) < kDegenerate) throw DegenerateNetwork("network: y_s + y_g vanishes");
  if (!(f_g_hz > 0.0)) throw InvalidScenario("network: f_g must be positive");
  if (!(s_base_mva > 0.0)) throw InvalidScenario("network: S_base must be positive");
  if (!(z_base_ohm > 0.0)) throw InvalidScenario("network: Z_base must be positive");
}

void FaultSpec::validate() const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidScenario("fault: lambda must lie in [0, 1]");
  if (!(r_f_ohm >= 0.0)) throw InvalidScenario("fault: r_f must be non-negative");
  if (!(t_on_s >= 0.0) || !std::isfinite(t_on_s)) throw InvalidScenario("fault: t_on must be >= 0");
  if (!(t_clear_s > t_on_s) || !std::isfinite(t_clear_s)) {
    throw InvalidScenario("fault: t_clear must be later than t_on");
  }
}

ReducedNetwork make_reduced_network(Admittance y_s, Admittance y_g_eff, Phasor u_g_eff) {
  const Admittance y_sum = y_s + y_g_eff;
  if (std::abs(y_sum) < kDegenerate) throw DegenerateNetwork("reduced network: y_s + y_g vanishes");
  return ReducedNetwork{
      .y_s = y_s,
      .y_g_eff = y_g_eff,
      .y_sum = y_sum,
      .y_sg = y_s * y_g_eff / y_sum,
      .alpha = y_s / y_sum,
      .u_g_eff = u_g_eff,
  };
}

ReducedNetwork reduce_network(const RawNetworkParams& raw) {
  if (std::abs(raw.y_s + raw.y_g) < kDegenerate) {
    throw DegenerateNetwork("network: y_s + y_g vanishes");
  }
  return make_reduced_network(raw.y_s, raw.y_g, raw.u_g);
}

ReducedNetwork faulted_equivalent(const RawNetworkParams& raw, const FaultSpec& fault) {
  fault.validate();
  if (fault.r_f_ohm == 0.0 && fault.lambda == 0.0) {
    throw DegenerateFault("bolted fault at the PCC collapses the network");
  }

  // Healthy circuit in parallel with the faulted one split at the fault node:
  //   PCC --y_a-- F --y_b-- grid,  F --y_f-- ground.
  const Admittance half = raw.y_g / 2.0;
  const double r_pu = ohm_to_pu(raw, fault.r_f_ohm);
  const Admittance y_f = r_pu == 0.0 ? Admittance(kInf) : Admittance(1.0 / r_pu);

  // Eliminating F leaves a PCC-grid transfer branch and a PCC shunt.
  Admittance transfer;
  Admittance shunt;
  if (fault.lambda == 0.0) {
    transfer = half;
    shunt = y_f;
  } else if (fault.lambda == 1.0) {
    // Fault sits on the infinite bus and cannot move the PCC.
    transfer = half;
    shunt = 0.0;
  } else {
    const Admittance y_a = half / fault.lambda;
    const Admittance y_b = half / (1.0 - fault.lambda);
    if (r_pu == 0.0) {
      transfer = 0.0;
      shunt = y_a;
    } else {
      const Admittance s = y_a + y_b + y_f;
      if (std::abs(s) < kDegenerate) throw DegenerateNetwork("fault node admittance vanishes");
      transfer = y_a * y_b / s;
      shunt = y_a * y_f / s;
    }
  }

  // y_g_eff (U - U_g_eff) = (half + transfer)(U - U_g) + shunt U
  const Admittance y_g_eff = half + transfer + shunt;
  if (std::abs(y_g_eff) < kDegenerate) throw DegenerateNetwork("faulted grid branch vanishes");
  const Phasor u_g_eff(raw.u_g.value() * (half + transfer) / y_g_eff);
  return make_reduced_network(raw.y_s, y_g_eff, u_g_eff);
}

ReducedNetwork post_fault_network(const RawNetworkParams& raw, const FaultSpec& fault) {
  if (fault.post_fault_topology == PostFaultTopology::TripCircuit) {
    return make_reduced_network(raw.y_s, raw.y_g / 2.0, raw.u_g);
  }
  return reduce_network(raw);
}

Phasor solve_pcc_voltage(const ReducedNetwork& net, Phasor e_s, Phasor i_w) {
  if (std::abs(net.y_sum) < kDegenerate) throw DegenerateNetwork("reduced network: y_sum vanishes");
  return Phasor((e_s.value() * net.y_s + net.u_g_eff.value() * net.y_g_eff + i_w.value()) /
                net.y_sum);
}

InterfaceSolution solve_interface(const ReducedNetwork& net, double delta, double e_s_mag,
                                  const InterfaceControl& control, Phasor initial_guess,
                                  const InterfaceOptions& options) {
  const Phasor e_s = Phasor::from_polar(e_s_mag, delta);
  Complex u = initial_guess.value() != Complex{}
                  ? initial_guess.value()
                  : solve_pcc_voltage(net, e_s, Phasor{}).value();

  double residual = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iterations; ++it) {
    const Phasor u_ph(u);
    const double theta = u_ph.angle();
    const CurrentCommand cmd = control(u_ph.magnitude(), theta);
    const Phasor i_w = current_phasor(cmd.i_d, cmd.i_q, theta);
    const Complex mapped = solve_pcc_voltage(net, e_s, i_w).value();
    residual = std::abs(mapped - u);
    if (!std::isfinite(residual)) break;
    if (residual < options.tolerance) {
      const PowerSplit power = electrical_power(delta, net, e_s_mag, i_w);
      return InterfaceSolution{
          .u_pcc = u_ph,
          .i_w = i_w,
          .theta = theta,
          .i_d = cmd.i_d,
          .i_q = cmd.i_q,
          .p_e = power.p_e,
          .p_sg = power.p_sg,
          .p_w = power.p_w,
          .iterations = it,
          .residual = residual,
      };
    }
    u += options.relaxation * (mapped - u);
  }
  throw NoConvergence("PCC interface solve did not converge", options.max_iterations, residual);
}

}  // namespace swinglab
