#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "swinglab/energy_analysis.hpp"
#include "swinglab/scenario.hpp"
#include "swinglab/scenario_lab.hpp"
#include "swinglab/trace.hpp"

namespace swinglab {

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double value);
/// Throws ParseError on anything that is not a complete number (inf/nan allowed).
double parse_double(std::string_view text);

/// `key = value` lines with units in the key names. Comments start with '#'.
std::string format_scenario(const Scenario& scenario);
/// Unknown or duplicate keys are errors. Missing keys keep their defaults.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const std::filesystem::path& path, const Scenario& scenario);

/// Column order of trace.csv.
const std::vector<std::string>& trace_columns();

void write_trace_csv(std::ostream& out, std::span<const TraceSample> samples);
/// Columns are matched by name; a missing column is a ParseError naming it.
std::vector<TraceSample> read_trace_csv(std::istream& in);

/// delta vs d_omega with time and mode, for phase-plane plots.
void write_phase_csv(std::ostream& out, std::span<const TraceSample> samples);

void write_map_csv(std::ostream& out, const StabilityMap& map);

}  // namespace swinglab
