#include "swinglab/scenario_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "swinglab/errors.hpp"
#include "swinglab/io.hpp"
#include "swinglab/simulator.hpp"

namespace swinglab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CaseRow {
  double ibr_mw;
  double sg_mw;
  double r_f_ohm;
  double sigma[2];
  double rate[2];
  bool varies_rate;
};

// Study-case table: dispatch on the 1000 MVA base, transition resistance,
// and the two compared settings of each row.
constexpr CaseRow kCases[] = {
    {650.0, 50.0, 0.0, {0.5, 0.7}, {kInf, kInf}, false},
    {650.0, 50.0, 0.0, {0.0, 0.1}, {kInf, kInf}, false},
    {450.0, 250.0, 5.0, {0.7, 1.2}, {kInf, kInf}, false},
    {450.0, 250.0, 25.0, {0.0, 0.5}, {kInf, kInf}, false},
    {650.0, 50.0, 0.0, {0.7, 0.7}, {kInf, 5.0}, true},
    {650.0, 50.0, 0.0, {0.5, 0.5}, {kInf, 1.0}, true},
    {650.0, 50.0, 0.0, {0.2, 0.2}, {kInf, 0.4}, true},
};

const CaseRow& row_of(CaseId id) {
  if (id.number < 1 || id.number > 7 || id.variant < 0 || id.variant > 1) {
    throw UnknownCase("unknown study case " + std::to_string(id.number) + " variant " +
                      std::to_string(id.variant));
  }
  return kCases[id.number - 1];
}

}  // namespace

Scenario builtin_case(CaseId id) {
  const CaseRow& row = row_of(id);
  Scenario s;
  s.name = "case" + std::to_string(id.number) + "_v" + std::to_string(id.variant);
  s.sg.dispatch_mw = row.sg_mw;
  s.ibr.dispatch_mw = row.ibr_mw;
  s.ibr.sigma_pu = row.sigma[id.variant];
  s.ibr.recovery_rate_pu_per_s = row.rate[id.variant];
  s.fault.r_f_ohm = row.r_f_ohm;
  s.fault.t_on_s = 0.5;
  s.fault.t_clear_s = 0.7;
  return s;
}

std::vector<CaseId> all_cases() {
  std::vector<CaseId> out;
  for (int n = 1; n <= 7; ++n) {
    out.push_back({n, 0});
    out.push_back({n, 1});
  }
  return out;
}

std::string describe_case(CaseId id) {
  const CaseRow& row = row_of(id);
  std::ostringstream os;
  os << "IBR " << row.ibr_mw << " MW, SG " << row.sg_mw << " MW, r_f " << row.r_f_ohm
     << " ohm, sigma " << row.sigma[id.variant] << " pu, rate " << row.rate[id.variant]
     << " pu/s";
  return os.str();
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Sigma:
      return "sigma_pu";
    case SweepAxis::RecoveryRate:
      return "recovery_rate_pu_per_s";
    case SweepAxis::FaultResistance:
      return "r_f_ohm";
    case SweepAxis::Damping:
      return "d_pu";
  }
  return "?";
}

std::vector<double> make_grid(double lo, double hi, double step) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !std::isfinite(step)) {
    throw InvalidScenario("sweep range must be finite");
  }
  if (!(step > 0.0)) throw InvalidScenario("sweep step must be positive");
  if (hi < lo) throw InvalidScenario("sweep range is empty");
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

void apply_axis(Scenario& scenario, SweepAxis axis, double value) {
  switch (axis) {
    case SweepAxis::Sigma:
      scenario.ibr.sigma_pu = value;
      break;
    case SweepAxis::RecoveryRate:
      scenario.ibr.recovery_rate_pu_per_s = value;
      break;
    case SweepAxis::FaultResistance:
      scenario.fault.r_f_ohm = value;
      break;
    case SweepAxis::Damping:
      scenario.sg.d_pu = value;
      break;
  }
}

std::string_view to_string(CellOutcome outcome) {
  switch (outcome) {
    case CellOutcome::Stable:
      return "Stable";
    case CellOutcome::Unstable:
      return "Unstable";
    case CellOutcome::Failed:
      return "Failed";
  }
  return "?";
}

MapCell evaluate_cell(const Scenario& scenario, std::vector<double> coords) {
  MapCell cell;
  cell.coords = std::move(coords);
  try {
    const Trace trace = run_simulation(scenario);
    const TraceAnalysis analysis = analyze_trace(trace);
    cell.outcome = analysis.verdict.outcome == Outcome::Stable ? CellOutcome::Stable
                                                               : CellOutcome::Unstable;
    cell.swing_index = analysis.verdict.instability_swing_index;
    cell.classification = analysis.verdict.classification;
    cell.max_v = analysis.max_v;
  } catch (const std::exception& e) {
    cell.outcome = CellOutcome::Failed;
    cell.failure = e.what();
  }
  return cell;
}

StabilityMap sweep(const Scenario& base, const std::vector<AxisRange>& axes, unsigned threads) {
  StabilityMap map;
  map.axes = axes;
  std::size_t total = 1;
  for (const AxisRange& a : axes) {
    if (a.values.empty()) throw InvalidScenario("sweep axis " + std::string(to_string(a.axis)) + " is empty");
    total *= a.values.size();
  }
  map.cells.resize(total);

  const auto job = [&](std::size_t flat) {
    Scenario s = base;
    std::vector<double> coords(axes.size());
    std::size_t rest = flat;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const std::size_t n = axes[k].values.size();
      coords[k] = axes[k].values[rest % n];
      rest /= n;
      apply_axis(s, axes[k].axis, coords[k]);
    }
    map.cells[flat] = evaluate_cell(s, std::move(coords));
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));
  if (threads <= 1) {
    for (std::size_t i = 0; i < total; ++i) job(i);
    return map;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < total; i = next++) job(i);
      });
    }
  }
  return map;
}

std::optional<DampingThreshold> find_stabilizing_damping(const Scenario& base, double d_lo,
                                                         double d_hi, double tolerance) {
  const auto stable_at = [&](double d) {
    Scenario s = base;
    s.sg.d_pu = d;
    return evaluate_cell(s).outcome == CellOutcome::Stable;
  };
  DampingThreshold out{d_lo, d_hi, 1};
  if (!stable_at(d_hi)) return std::nullopt;
  while (out.d_stable - out.d_unstable > tolerance) {
    const double mid = 0.5 * (out.d_unstable + out.d_stable);
    (stable_at(mid) ? out.d_stable : out.d_unstable) = mid;
    ++out.runs;
  }
  return out;
}

}  // namespace swinglab
