#include "swinglab/energy_analysis.hpp"

#include <algorithm>
#include <cmath>

#include "swinglab/errors.hpp"

namespace swinglab {

namespace {

constexpr double kMinTravel = 1e-9;

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

EnergyReference make_energy_reference(const SgParams& sg, const ReducedNetwork& healthy,
                                      const EquilibriumPair& eq) {
  return EnergyReference{
      .delta_s = eq.delta_s,
      .p_w_ss = eq.p_w_ss,
      .p_m = sg.p_m,
      .amp = sg.e_s_mag * healthy.u_g_eff.magnitude() * std::abs(healthy.y_sg),
      .omega_g = sg.omega_g,
      .t_j = sg.t_j,
      .d = sg.d,
  };
}

double potential_energy(double delta, const EnergyReference& ref) {
  return -ref.amp * (std::cos(delta) - std::cos(ref.delta_s)) -
         (ref.p_w_ss + ref.p_m) * (delta - ref.delta_s);
}

double total_energy(double delta, double d_omega, const EnergyReference& ref) {
  return 0.5 * ref.t_j * ref.omega_g * d_omega * d_omega + potential_energy(delta, ref);
}

double total_energy(const TraceSample& sample, const EnergyReference& ref) {
  return total_energy(sample.delta, sample.d_omega, ref);
}

void annotate_energy(std::span<TraceSample> samples, const EnergyReference& ref) {
  for (TraceSample& s : samples) s.v = total_energy(s, ref);
}

EnergyRateTerms energy_rate_terms(const TraceSample& sample, const EnergyReference& ref) {
  const double dpw = sample.p_w - ref.p_w_ss;
  const double dpsg = sample.p_sg - ref.amp * std::sin(sample.delta);
  const double w = sample.d_omega;
  return EnergyRateTerms{
      .w_term = ref.omega_g * dpw * w,
      .sg_term = -ref.omega_g * dpsg * w,
      .d_term = -ref.omega_g * ref.d * w * w,
  };
}

std::string_view to_string(SwingDirection direction) {
  return direction == SwingDirection::AngleIncreasing ? "AngleIncreasing" : "AngleDecreasing";
}

std::vector<SwingSegment> segment_swings(std::span<const TraceSample> samples) {
  if (samples.size() < 2) throw EmptyTrace("swing segmentation needs at least two samples");

  std::size_t start = 0;
  while (start < samples.size() && std::abs(samples[start].d_omega) <= kQuiescentSpeed) ++start;
  std::vector<SwingSegment> swings;
  if (start == samples.size()) return swings;

  const auto close = [&](SwingSegment& seg, std::size_t last) {
    seg.last = last;
    seg.t_end = samples[last].t;
    seg.v_at_end = samples[last].v;
    double extreme = samples[seg.first].delta;
    for (std::size_t k = seg.first; k <= last; ++k) {
      extreme = seg.direction == SwingDirection::AngleIncreasing
                    ? std::max(extreme, samples[k].delta)
                    : std::min(extreme, samples[k].delta);
    }
    seg.delta_extreme = extreme;
    swings.push_back(seg);
  };
  const auto open = [&](std::size_t first, int sign) {
    SwingSegment seg;
    seg.index = static_cast<int>(swings.size()) + 1;
    seg.first = first;
    seg.t_start = samples[first].t;
    seg.direction = sign > 0 ? SwingDirection::AngleIncreasing : SwingDirection::AngleDecreasing;
    return seg;
  };

  int sign = sign_of(samples[start].d_omega);
  SwingSegment current = open(start, sign);
  for (std::size_t k = start + 1; k < samples.size(); ++k) {
    const int s = sign_of(samples[k].d_omega);
    if (s != 0 && s != sign) {
      close(current, k);
      sign = s;
      current = open(k, sign);
    }
  }
  close(current, samples.size() - 1);
  return swings;
}

CycleEnergyReport cycle_energy_report(std::span<const TraceSample> samples,
                                      const EnergyReference& ref, const SwingSegment& first,
                                      const SwingSegment& second,
                                      std::span<const TraceEvent> events) {
  if (first.direction != SwingDirection::AngleDecreasing ||
      second.direction != SwingDirection::AngleIncreasing) {
    throw DegenerateCycle("a cycle is an angle-decreasing swing followed by an angle-increasing one");
  }
  if (first.last != second.first || second.last >= samples.size()) {
    throw DegenerateCycle("cycle swings must be consecutive segments of the same trace");
  }
  const std::size_t a = first.first;
  const std::size_t b = first.last;
  const std::size_t c = second.last;
  const TraceSample& sa = samples[a];
  const TraceSample& sb = samples[b];
  const TraceSample& sc = samples[c];
  if (std::abs(sb.delta - sa.delta) < kMinTravel || std::abs(sc.delta - sb.delta) < kMinTravel) {
    throw DegenerateCycle("swing angle travel below 1e-9 rad");
  }

  CycleEnergyReport rep;
  rep.t_a = sa.t;
  rep.t_b = sb.t;
  rep.t_c = sc.t;
  rep.delta_a = sa.delta;
  rep.delta_b = sb.delta;
  rep.delta_c = sc.delta;
  rep.dv_total = total_energy(sc, ref) - total_energy(sa, ref);

  std::vector<double> jumps;
  std::vector<double> network_jumps;
  for (const TraceEvent& e : events) {
    jumps.push_back(e.t);
    if (e.kind == EventKind::FaultOn || e.kind == EventKind::FaultCleared) network_jumps.push_back(e.t);
  }
  std::sort(jumps.begin(), jumps.end());
  std::sort(network_jumps.begin(), network_jumps.end());
  const auto is_jump = [&](double t) { return std::binary_search(jumps.begin(), jumps.end(), t); };
  // A network switch in (t0, t1] separates two samples.
  const auto switched = [&](double t0, double t1) {
    const auto it = std::upper_bound(network_jumps.begin(), network_jumps.end(), t0);
    return it != network_jumps.end() && *it <= t1;
  };

  struct Integrands {
    EnergyRateTerms rate;
    double dpw = 0.0;
  };
  const auto at = [&](std::size_t k) {
    return Integrands{energy_rate_terms(samples[k], ref), samples[k].p_w - ref.p_w_ss};
  };
  // Left limit at sample k + 1 of the integrands that hold on [k, k + 1].
  const auto left_limit = [&](std::size_t k) {
    const std::size_t r = k + 1;
    if (!is_jump(samples[r].t)) return at(r);
    const IbrMode mode = samples[k].mode;
    std::size_t j = k;
    bool found = false;
    for (std::size_t back = 1; back <= 8 && back <= k; ++back) {
      const std::size_t cand = k - back;
      if (switched(samples[cand].t, samples[k].t)) break;
      if (samples[cand].mode == mode) {
        j = cand;
        found = true;
        break;
      }
    }
    const Integrands p = at(k);
    if (!found) return p;
    const Integrands q = at(j);
    const double w = (samples[r].t - samples[k].t) / (samples[k].t - samples[j].t);
    const auto lin = [w](double x1, double x0) { return x1 + w * (x1 - x0); };
    return Integrands{{lin(p.rate.w_term, q.rate.w_term), lin(p.rate.sg_term, q.rate.sg_term),
                       lin(p.rate.d_term, q.rate.d_term)},
                      lin(p.dpw, q.dpw)};
  };

  // Trapezoidal quadrature on the sample grid.
  double dv_w = 0.0, dv_sg = 0.0, dv_d = 0.0;
  double mvt_num_1 = 0.0, mvt_num_2 = 0.0;
  for (std::size_t k = a; k < c; ++k) {
    const TraceSample& l = samples[k];
    const TraceSample& r = samples[k + 1];
    const double h = r.t - l.t;
    const Integrands fl = at(k);
    const Integrands fr = left_limit(k);
    dv_w += 0.5 * h * (fl.rate.w_term + fr.rate.w_term);
    dv_sg += 0.5 * h * (fl.rate.sg_term + fr.rate.sg_term);
    dv_d -= 0.5 * h * (fl.rate.d_term + fr.rate.d_term);

    const double area = 0.5 * (fl.dpw + fr.dpw) * (r.delta - l.delta);
    (k < b ? mvt_num_1 : mvt_num_2) += area;
    if (r.mode != sa.mode) rep.mode_change_inside = true;
  }
  rep.dv_w = dv_w;
  rep.dv_sg = dv_sg;
  rep.dv_d = dv_d;
  rep.mvt_1 = mvt_num_1 / (sb.delta - sa.delta);
  rep.mvt_2 = mvt_num_2 / (sc.delta - sb.delta);
  return rep;
}

std::vector<CycleEnergyReport> all_cycle_reports(std::span<const TraceSample> samples,
                                                 const EnergyReference& ref,
                                                 std::span<const SwingSegment> swings,
                                                 std::span<const TraceEvent> events) {
  std::vector<CycleEnergyReport> out;
  // The increasing swing must itself end on a sign change to close the cycle.
  for (std::size_t i = 0; i + 2 < swings.size(); ++i) {
    if (swings[i].direction != SwingDirection::AngleDecreasing) continue;
    try {
      CycleEnergyReport rep = cycle_energy_report(samples, ref, swings[i], swings[i + 1], events);
      rep.cycle_index = static_cast<int>(out.size()) + 1;
      out.push_back(rep);
    } catch (const DegenerateCycle&) {
    }
  }
  return out;
}

std::string_view to_string(Outcome outcome) {
  return outcome == Outcome::Stable ? "Stable" : "Unstable";
}

std::string_view to_string(InstabilityClass cls) {
  switch (cls) {
    case InstabilityClass::None:
      return "None";
    case InstabilityClass::FirstSwing:
      return "FirstSwing";
    case InstabilityClass::MultiSwing:
      return "MultiSwing";
  }
  return "?";
}

StabilityVerdict classify_stability(std::span<const TraceSample> samples,
                                    const EquilibriumPair& eq,
                                    std::span<const SwingSegment> swings) {
  StabilityVerdict verdict;
  verdict.delta_uep = eq.delta_uep;
  verdict.max_delta = samples.empty() ? 0.0 : samples.front().delta;
  for (const TraceSample& s : samples) verdict.max_delta = std::max(verdict.max_delta, s.delta);

  std::optional<std::size_t> hit;
  for (std::size_t k = 0; k < samples.size() && !hit; ++k) {
    if (samples[k].delta > eq.delta_uep && samples[k].d_omega > 0.0) hit = k;
  }
  for (std::size_t k = 0; k < samples.size() && !hit; ++k) {
    if (std::abs(samples[k].delta) > kDivergenceAngle) hit = k;
  }
  if (!hit) return verdict;

  verdict.outcome = Outcome::Unstable;
  for (const SwingSegment& seg : swings) {
    // Shared boundary samples belong to the swing they open.
    if (*hit >= seg.first && (*hit < seg.last || &seg == &swings.back())) {
      verdict.instability_swing_index = seg.index;
      break;
    }
  }
  verdict.classification = verdict.instability_swing_index.value_or(1) >= 2
                               ? InstabilityClass::MultiSwing
                               : InstabilityClass::FirstSwing;
  return verdict;
}

TraceAnalysis analyze_trace(const Trace& trace) {
  TraceAnalysis out;
  out.swings = segment_swings(trace.samples);
  out.cycles = all_cycle_reports(trace.samples, trace.reference, out.swings, trace.events);
  out.verdict = classify_stability(trace.samples, trace.equilibrium, out.swings);
  for (const TraceSample& s : trace.samples) out.max_v = std::max(out.max_v, s.v);
  return out;
}

}  // namespace swinglab
