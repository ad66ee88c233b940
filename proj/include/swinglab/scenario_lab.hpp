#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swinglab/energy_analysis.hpp"
#include "swinglab/scenario.hpp"

namespace swinglab {

/// One row of the study-case table and which of its two compared runs.
struct CaseId {
  int number = 1;
  int variant = 0;

  friend bool operator==(const CaseId&, const CaseId&) = default;
};

/// Fully populated scenario for a study case. Throws UnknownCase.
Scenario builtin_case(CaseId id);

/// All 14 case variants in table order.
std::vector<CaseId> all_cases();

/// Short human-readable description of a case variant.
std::string describe_case(CaseId id);

enum class SweepAxis { Sigma, RecoveryRate, FaultResistance, Damping };

std::string_view to_string(SweepAxis axis);

struct AxisRange {
  SweepAxis axis = SweepAxis::Sigma;
  std::vector<double> values;
};

/// Inclusive grid lo, lo + step, ... up to hi (with a relative slack of 1e-9
/// steps). Throws InvalidScenario on an empty or non-finite range.
std::vector<double> make_grid(double lo, double hi, double step);

/// Applies one axis value to a scenario.
void apply_axis(Scenario& scenario, SweepAxis axis, double value);

enum class CellOutcome { Stable, Unstable, Failed };

std::string_view to_string(CellOutcome outcome);

struct MapCell {
  std::vector<double> coords;
  CellOutcome outcome = CellOutcome::Failed;
  std::optional<int> swing_index;
  InstabilityClass classification = InstabilityClass::None;
  double max_v = 0.0;
  std::string failure;
};

struct StabilityMap {
  std::vector<AxisRange> axes;
  /// Row-major over `axes`; the last axis varies fastest.
  std::vector<MapCell> cells;
};

/// Simulates a single scenario into a map cell. Never throws for simulation
/// failures; they become Failed cells.
MapCell evaluate_cell(const Scenario& scenario, std::vector<double> coords = {});

/// Runs every grid point. `threads` = 0 picks the hardware concurrency.
/// Results are identical for any thread count.
StabilityMap sweep(const Scenario& base, const std::vector<AxisRange>& axes,
                   unsigned threads = 1);

struct DampingThreshold {
  double d_unstable = 0.0;
  double d_stable = 0.0;
  int runs = 0;
};

/// Bisection on the SG damping between a known unstable value and an upper
/// bracket. Returns nullopt when `d_hi` is still unstable.
std::optional<DampingThreshold> find_stabilizing_damping(const Scenario& base, double d_lo,
                                                         double d_hi, double tolerance = 1e-2);

}  // namespace swinglab
