#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "swinglab/scenario_lab.hpp"

namespace swinglab::cli {

inline constexpr int kExitStable = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnstable = 2;

struct RunConfig {
  std::optional<std::filesystem::path> scenario_path;
  std::optional<CaseId> builtin;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::filesystem::path output_dir = ".";
  bool emit_trace = true;
  bool emit_phase = true;
};

struct SweepConfig {
  RunConfig base;
  std::vector<AxisRange> axes;
  unsigned threads = 1;
};

struct AnalyzeConfig {
  std::filesystem::path trace_path;
  /// Scenario that produced the trace. Defaults to scenario.txt next to it.
  std::optional<std::filesystem::path> scenario_path;
  std::optional<CaseId> builtin;
  std::filesystem::path output_dir = ".";
};

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepConfig& config, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeConfig& config, std::ostream& out, std::ostream& err);
int cmd_list_cases(std::ostream& out);

/// "lo:hi:step" or a comma-separated list ("inf,0.4").
AxisRange parse_axis(SweepAxis axis, std::string_view spec);

/// Sweep parallelism from SWINGLAB_THREADS (1 when unset or invalid).
unsigned threads_from_env();

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace swinglab::cli
