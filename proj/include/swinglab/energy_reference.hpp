#pragma once

namespace swinglab {

/// Parameters of the transient energy function, taken from the healthy
/// network at the stable equilibrium.
struct EnergyReference {
  double delta_s = 0.0;
  double p_w_ss = 0.0;
  double p_m = 0.0;
  /// E_s |U_g| |y_sg| of the healthy network.
  double amp = 1.0;
  double omega_g = 0.0;
  double t_j = 0.0;
  double d = 0.0;
};

}  // namespace swinglab
