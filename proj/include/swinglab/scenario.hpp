#pragma once

#include <limits>
#include <string>

#include "swinglab/ibr_control.hpp"
#include "swinglab/network.hpp"

namespace swinglab {

struct SgConfig {
  double t_j_s = 8.0;
  double d_pu = 10.0;
  double x_d_prime_pu = 0.15;
  double dispatch_mw = 50.0;

  friend bool operator==(const SgConfig&, const SgConfig&) = default;
};

struct IbrConfig {
  double dispatch_mw = 650.0;
  double sigma_pu = 0.5;
  double recovery_rate_pu_per_s = std::numeric_limits<double>::infinity();
  double k_q = 2.0;
  double u_enter_pu = 0.9;
  double u_exit_pu = 0.9;
  double i_max_pu = 1.2;

  friend bool operator==(const IbrConfig&, const IbrConfig&) = default;
};

/// Complete description of one experiment.
struct Scenario {
  std::string name = "custom";
  RawNetworkParams network;
  SgConfig sg;
  IbrConfig ibr;
  FaultSpec fault;
  double t_end_s = 10.0;
  double dt_s = 1e-3;

  /// Throws InvalidScenario.
  void validate() const;

  /// Controller parameters with the dispatch converted to per unit.
  IbrParams ibr_params() const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

}  // namespace swinglab
