#pragma once

// Space-vector modulation: Clarke transform, sector search, dwell times and
// the symmetric seven-segment switching sequence.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "svdrive/errors.hpp"

namespace svdrive {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double sqrt3 = std::numbers::sqrt3;

struct ThreePhase {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Stationary q-d phasor V_qds = vq - j*vd.
struct SpaceVector {
  double vq = 0.0;
  double vd = 0.0;

  double mag() const { return std::hypot(vq, vd); }

  // Angle from the positive real axis in [0, 2*pi).
  double alpha() const {
    double a = std::atan2(-vd, vq);
    if (a < 0.0) a += two_pi;
    if (a >= two_pi) a -= two_pi;
    return a;
  }

  static SpaceVector from_polar(double mag, double alpha) {
    return {mag * std::cos(alpha), -mag * std::sin(alpha)};
  }
};

// Leg states, 1 = upper device on.
struct SwitchState {
  std::uint8_t sa = 0;
  std::uint8_t sb = 0;
  std::uint8_t sc = 0;

  friend constexpr bool operator==(const SwitchState&, const SwitchState&) = default;

  constexpr bool is_zero() const { return sa == sb && sb == sc; }

  // Number of legs that differ between two states.
  friend constexpr int legs_toggled(const SwitchState& x, const SwitchState& y) {
    return (x.sa != y.sa) + (x.sb != y.sb) + (x.sc != y.sc);
  }
};

inline constexpr SwitchState kV0{0, 0, 0};
inline constexpr SwitchState kV7{1, 1, 1};

// Active vectors V1..V6 around the hexagon, starting on the phase-a axis.
inline constexpr std::array<SwitchState, 6> kActiveVectors{{
    {1, 0, 0},
    {1, 1, 0},
    {0, 1, 0},
    {0, 1, 1},
    {0, 0, 1},
    {1, 0, 1},
}};

// V1..V6 for k = 1..6.
inline SwitchState active_vector(int k) {
  if (k < 1 || k > 6) throw InvalidInput("active vector index must be 1..6");
  return kActiveVectors[static_cast<std::size_t>(k - 1)];
}

struct DwellTimes {
  double t1 = 0.0;
  double t2 = 0.0;
  double t0 = 0.0;  // total zero-vector time within the half period

  double half_period() const { return t1 + t2 + t0; }
};

struct Segment {
  SwitchState state;
  double duration = 0.0;
};

struct SwitchingSequence {
  std::array<Segment, 7> segments{};
  double period = 0.0;

  double total_duration() const {
    double sum = 0.0;
    for (const auto& s : segments) sum += s.duration;
    return sum;
  }
};

struct ModulatorConfig {
  double fsw = 7000.0;
  double vdc = 625.0;
  double mod_index = 0.9;
  double fo = 60.0;

  double period() const { return 1.0 / fsw; }
  // Magnitude of each active switching vector.
  double active_magnitude() const { return 2.0 / 3.0 * vdc; }
  double vref() const { return mod_index * active_magnitude(); }
  double omega_o() const { return two_pi * fo; }

  void validate() const {
    if (!(fsw > 0.0) || !std::isfinite(fsw)) throw InvalidInput("fsw must be > 0");
    if (!(vdc > 0.0) || !std::isfinite(vdc)) throw InvalidInput("vdc must be > 0");
    if (!(mod_index > 0.0) || !(mod_index <= 1.0)) {
      throw InvalidInput("mod_index must lie in (0, 1]");
    }
    if (!(fo > 0.0) || !std::isfinite(fo)) throw InvalidInput("fo must be > 0");
  }
};

inline SpaceVector clarke_transform(const ThreePhase& abc) {
  if (!std::isfinite(abc.a) || !std::isfinite(abc.b) || !std::isfinite(abc.c)) {
    throw InvalidInput("clarke_transform: non-finite phase value");
  }
  return {(2.0 * abc.a - abc.b - abc.c) / 3.0, -(abc.b - abc.c) / sqrt3};
}

// Inverse for zero-sequence-free sets.
inline ThreePhase inverse_clarke(double vq, double vd) {
  return {vq, (-vq - sqrt3 * vd) / 2.0, (-vq + sqrt3 * vd) / 2.0};
}

// Ideal q-d vector produced by a switch state on a bus of vdc.
inline SpaceVector switching_vector(const SwitchState& s, double vdc) {
  const double a = s.sa, b = s.sb, c = s.sc;
  return {vdc / 3.0 * (2.0 * a - b - c), -vdc / sqrt3 * (b - c)};
}

struct SectorPosition {
  int sector = 1;        // 1..6
  double theta = 0.0;    // angle measured from the sector's leading edge
};

// Sectors are half-open [(s-1)*60deg, s*60deg). Angles outside [0, 2pi) wrap.
inline SectorPosition sector_of(double alpha) {
  if (!std::isfinite(alpha)) throw InvalidInput("sector_of: non-finite angle");
  double a = std::fmod(alpha, two_pi);
  if (a < 0.0) a += two_pi;
  if (a >= two_pi) a = 0.0;
  constexpr double width = pi / 3.0;
  int s = static_cast<int>(std::floor(a / width));
  // Rounding can place a value just under a boundary into the next sector.
  if (s > 5) s = 5;
  if (s > 0 && a < s * width) --s;
  if (s < 5 && a >= (s + 1) * width) ++s;
  return {s + 1, a - s * width};
}

// Dwell times of the two bounding active vectors and the zero vectors for
// one half period. Overmodulated references are scaled back onto the hexagon.
inline DwellTimes dwell_times(double vref_mag, double theta_in_sector,
                              const ModulatorConfig& cfg) {
  if (!(vref_mag >= 0.0) || !std::isfinite(vref_mag)) {
    throw InvalidInput("dwell_times: reference magnitude must be finite and >= 0");
  }
  const double half = cfg.period() / 2.0;
  const double scale = vref_mag / (cfg.active_magnitude() * std::sin(pi / 3.0)) * half;
  double t1 = scale * std::sin(pi / 3.0 - theta_in_sector);
  double t2 = scale * std::sin(theta_in_sector);
  t1 = std::max(t1, 0.0);
  t2 = std::max(t2, 0.0);
  const double active = t1 + t2;
  if (active > half) {
    t1 *= half / active;
    t2 = half - t1;
    return {t1, t2, 0.0};
  }
  return {t1, t2, std::max(half - active, 0.0)};
}

// Full-period centre-symmetric sequence V0 -> active -> active -> V7 -> mirror,
// built from the dwell times of one half period.
// Even sectors visit V(k+1) before V(k) so every transition toggles one leg.
inline SwitchingSequence build_sequence(int sector, const DwellTimes& dwell) {
  if (sector < 1 || sector > 6) throw InvalidInput("build_sequence: sector must be 1..6");
  if (!(dwell.t1 >= 0.0) || !(dwell.t2 >= 0.0) || !(dwell.t0 >= 0.0)) {
    throw InvalidInput("build_sequence: negative dwell time");
  }
  const SwitchState lead = active_vector(sector);
  const SwitchState trail = active_vector(sector % 6 + 1);
  // Each half period carries the full dwell set; V0 and V7 share t0 equally.
  Segment first{lead, dwell.t1};
  Segment second{trail, dwell.t2};
  if (sector % 2 == 0) std::swap(first, second);

  SwitchingSequence seq;
  seq.segments = {{
      {kV0, dwell.t0 / 2.0},
      first,
      second,
      {kV7, dwell.t0},
      second,
      first,
      {kV0, dwell.t0 / 2.0},
  }};
  seq.period = 2.0 * dwell.half_period();
  return seq;
}

// Gate state at a time inside the period; segments are left-closed.
inline SwitchState sample_gates(const SwitchingSequence& seq, double t_in_period) {
  double t = t_in_period;
  if (seq.period > 0.0) {
    t = std::fmod(t, seq.period);
    if (t < 0.0) t += seq.period;
  }
  double edge = 0.0;
  for (const auto& seg : seq.segments) {
    edge += seg.duration;
    if (t < edge) return seg.state;
  }
  return seq.segments.back().state;
}

}  // namespace svdrive
