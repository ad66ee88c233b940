#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "swinglab/energy_reference.hpp"
#include "swinglab/machine.hpp"
#include "swinglab/trace.hpp"

namespace swinglab {

EnergyReference make_energy_reference(const SgParams& sg, const ReducedNetwork& healthy,
                                      const EquilibriumPair& eq);

/// Closed form of the potential term, with the coupling power frozen at its
/// steady value.
double potential_energy(double delta, const EnergyReference& ref);

/// Kinetic plus potential energy.
double total_energy(double delta, double d_omega, const EnergyReference& ref);
double total_energy(const TraceSample& sample, const EnergyReference& ref);

/// Fills `v` for every sample.
void annotate_energy(std::span<TraceSample> samples, const EnergyReference& ref);

/// Decomposition of dV/dt. The three terms sum to the exact derivative of V
/// along the swing dynamics.
struct EnergyRateTerms {
  double w_term = 0.0;   // coupling-power deviation of the IBR
  double sg_term = 0.0;  // network deviation from the healthy sine curve
  double d_term = 0.0;   // SG damping

  double sum() const { return w_term + sg_term + d_term; }
};

EnergyRateTerms energy_rate_terms(const TraceSample& sample, const EnergyReference& ref);

enum class SwingDirection { AngleIncreasing, AngleDecreasing };

std::string_view to_string(SwingDirection direction);

/// Sample indices are [first, last]; consecutive segments share a boundary
/// sample (the first sample of the new sign ends the previous segment).
struct SwingSegment {
  int index = 1;
  double t_start = 0.0;
  double t_end = 0.0;
  std::size_t first = 0;
  std::size_t last = 0;
  SwingDirection direction = SwingDirection::AngleIncreasing;
  double delta_extreme = 0.0;
  double v_at_end = 0.0;
};

/// |d_omega| at or below this counts as the quiescent pre-fault interval.
inline constexpr double kQuiescentSpeed = 1e-9;

/// Splits the trace at sign changes of d_omega. Throws EmptyTrace.
std::vector<SwingSegment> segment_swings(std::span<const TraceSample> samples);

struct CycleEnergyReport {
  int cycle_index = 1;
  double t_a = 0.0, t_b = 0.0, t_c = 0.0;
  double delta_a = 0.0, delta_b = 0.0, delta_c = 0.0;
  double dv_total = 0.0;
  double dv_w = 0.0;
  /// Network deviation from the healthy sine curve; zero once the healthy
  /// network is back, so dv_total = dv_w + dv_sg - dv_d reduces to
  /// dv_total = dv_w - dv_d on post-fault cycles.
  double dv_sg = 0.0;
  double dv_d = 0.0;
  double mvt_1 = 0.0;
  double mvt_2 = 0.0;
  /// The controller changed mode inside the cycle; the MVT ordering is not
  /// expected to hold for such cycles.
  bool mode_change_inside = false;
};

/// Energy ledger of one cycle: an AngleDecreasing swing (A -> B) followed by
/// an AngleIncreasing swing (B -> C). Throws DegenerateCycle.
///
/// Samples are right-continuous, so at an event instant the integrands jump.
/// The quadrature closes the interval that ends there with the left limit,
/// extrapolated from earlier samples in the same controller mode and network
/// phase.
CycleEnergyReport cycle_energy_report(std::span<const TraceSample> samples,
                                      const EnergyReference& ref, const SwingSegment& first,
                                      const SwingSegment& second,
                                      std::span<const TraceEvent> events = {});

/// Reports for every decreasing/increasing pair of consecutive swings.
std::vector<CycleEnergyReport> all_cycle_reports(std::span<const TraceSample> samples,
                                                 const EnergyReference& ref,
                                                 std::span<const SwingSegment> swings,
                                                 std::span<const TraceEvent> events = {});

enum class Outcome { Stable, Unstable };
enum class InstabilityClass { None, FirstSwing, MultiSwing };

std::string_view to_string(Outcome outcome);
std::string_view to_string(InstabilityClass cls);

struct StabilityVerdict {
  Outcome outcome = Outcome::Stable;
  std::optional<int> instability_swing_index;
  double delta_uep = 0.0;
  double max_delta = 0.0;
  InstabilityClass classification = InstabilityClass::None;
};

/// |delta| beyond which a run is treated as out of step.
inline constexpr double kDivergenceAngle = 4.0 * 3.14159265358979323846;

/// Unstable on the first forward crossing of the UEP, or when the trace ran
/// past the divergence cutoff.
StabilityVerdict classify_stability(std::span<const TraceSample> samples,
                                    const EquilibriumPair& eq,
                                    std::span<const SwingSegment> swings);

/// Segmentation, ledger and verdict for a whole trace.
struct TraceAnalysis {
  std::vector<SwingSegment> swings;
  std::vector<CycleEnergyReport> cycles;
  StabilityVerdict verdict;
  double max_v = 0.0;
};

TraceAnalysis analyze_trace(const Trace& trace);

}  // namespace swinglab
