#pragma once

// Ideal two-level three-leg inverter feeding an isolated-neutral star load.

#include <algorithm>

#include "svdrive/errors.hpp"
#include "svdrive/svpwm.hpp"

namespace svdrive {

struct DcBus {
  double vdc = 625.0;
};

struct PhaseVoltages {
  double van = 0.0;
  double vbn = 0.0;
  double vcn = 0.0;

  ThreePhase abc() const { return {van, vbn, vcn}; }
};

inline PhaseVoltages phase_voltages(const SwitchState& s, const DcBus& bus) {
  const int a = s.sa, b = s.sb, c = s.sc;
  const double k = bus.vdc / 3.0;
  // Integer weights keep the three outputs summing to exactly zero.
  return {k * (2 * a - b - c), k * (2 * b - a - c), k * (2 * c - a - b)};
}

// Mean line-to-neutral voltages over [t_begin, t_end] inside one switching
// period, integrating the sequence's piecewise-constant states exactly.
inline PhaseVoltages average_phase_voltages(const SwitchingSequence& seq, const DcBus& bus,
                                            double t_begin, double t_end) {
  if (!(t_end > t_begin)) {
    return phase_voltages(sample_gates(seq, t_begin), bus);
  }
  PhaseVoltages acc;
  double edge = 0.0;
  for (const auto& seg : seq.segments) {
    const double lo = std::max(edge, t_begin);
    edge += seg.duration;
    const double hi = std::min(edge, t_end);
    if (hi <= lo) continue;
    const PhaseVoltages v = phase_voltages(seg.state, bus);
    acc.van += v.van * (hi - lo);
    acc.vbn += v.vbn * (hi - lo);
    acc.vcn += v.vcn * (hi - lo);
  }
  // Any part of the interval past the last edge (rounding) holds the last state.
  if (t_end > edge) {
    const double lo = std::max(edge, t_begin);
    const PhaseVoltages v = phase_voltages(seq.segments.back().state, bus);
    acc.van += v.van * (t_end - lo);
    acc.vbn += v.vbn * (t_end - lo);
    acc.vcn += v.vcn * (t_end - lo);
  }
  const double span = t_end - t_begin;
  return {acc.van / span, acc.vbn / span, acc.vcn / span};
}

}  // namespace svdrive
