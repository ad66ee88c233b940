#pragma once

#include <functional>

#include "swinglab/ibr_control.hpp"
#include "swinglab/phasor.hpp"

namespace swinglab {

/// SG branch, grid branch (both circuits together) and infinite bus, with the
/// per-unit bases needed to convert ohmic quantities.
struct RawNetworkParams {
  Admittance y_s{0.0, -2.18};
  Admittance y_g{0.0, -1.08};
  /// IBR branch admittance. Carried for completeness; the IBR current is
  /// injected directly at the PCC.
  Admittance y_w{0.0, -10.0};
  Phasor u_g{1.0, 0.0};
  double f_g_hz = 50.0;
  double s_base_mva = 1000.0;
  double z_base_ohm = 52.9;

  void validate() const;

  friend bool operator==(const RawNetworkParams&, const RawNetworkParams&) = default;
};

enum class PostFaultTopology { RestoreFull, TripCircuit };

/// Three-phase fault on one of the two parallel grid circuits, at fraction
/// `lambda` of the line length measured from the PCC.
struct FaultSpec {
  bool enabled = true;
  double r_f_ohm = 0.0;
  double lambda = 0.5;
  double t_on_s = 0.5;
  double t_clear_s = 0.7;
  PostFaultTopology post_fault_topology = PostFaultTopology::RestoreFull;

  void validate() const;

  friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

/// Two-admittance equivalent seen from the PCC: SG branch `y_s` to the
/// internal EMF and `y_g_eff` to the Thevenin source `u_g_eff`.
struct ReducedNetwork {
  Admittance y_s;
  Admittance y_g_eff;
  Admittance y_sum;
  /// y_s * y_g_eff / y_sum
  Admittance y_sg;
  /// y_s / y_sum; real for lossless branches.
  Complex alpha;
  Phasor u_g_eff;
};

/// Healthy reduction. Throws DegenerateNetwork if |y_s + y_g| < 1e-12.
ReducedNetwork reduce_network(const RawNetworkParams& raw);

/// Builds the reduction from an arbitrary grid-side equivalent.
ReducedNetwork make_reduced_network(Admittance y_s, Admittance y_g_eff, Phasor u_g_eff);

/// Fault-on equivalent. The fault node between the two halves of the faulted
/// circuit is Kron-eliminated and the remaining PCC shunt and PCC-grid
/// transfer branch are folded into (y_g_eff, u_g_eff).
ReducedNetwork faulted_equivalent(const RawNetworkParams& raw, const FaultSpec& fault);

/// Network after clearing: the healthy one, or a single circuit if the
/// faulted circuit is tripped.
ReducedNetwork post_fault_network(const RawNetworkParams& raw, const FaultSpec& fault);

/// PCC nodal solution U = (E y_s + U_g y_g + I_w) / (y_s + y_g).
Phasor solve_pcc_voltage(const ReducedNetwork& net, Phasor e_s, Phasor i_w);

/// Controller closure used by the interface solve: (|U_pcc|, theta) -> (i_d, i_q).
using InterfaceControl = std::function<CurrentCommand(double u_mag, double theta)>;

struct InterfaceOptions {
  double relaxation = 0.7;
  double tolerance = 1e-10;
  int max_iterations = 50;
};

struct InterfaceSolution {
  Phasor u_pcc;
  Phasor i_w;
  /// PCC voltage angle, i.e. the quasi-static PLL output.
  double theta = 0.0;
  double i_d = 0.0;
  double i_q = 0.0;
  double p_e = 0.0;
  double p_sg = 0.0;
  double p_w = 0.0;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped fixed point of U = solve_pcc_voltage(net, E, I_w(control(|U|, angle U))).
/// `initial_guess`, when nonzero, seeds the iteration; otherwise it starts
/// from the no-injection voltage. Throws NoConvergence.
InterfaceSolution solve_interface(const ReducedNetwork& net, double delta, double e_s_mag,
                                  const InterfaceControl& control,
                                  Phasor initial_guess = {},
                                  const InterfaceOptions& options = {});

/// Ohmic fault resistance to per-unit on the network impedance base.
inline double ohm_to_pu(const RawNetworkParams& raw, double ohm) { return ohm / raw.z_base_ohm; }

}  // namespace swinglab
