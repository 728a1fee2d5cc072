#pragma once

// End-to-end drive runs: source (ideal sinusoid or SVPWM inverter) feeding
// the machine, integrated at a fixed step.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "svdrive/analysis.hpp"
#include "svdrive/config.hpp"
#include "svdrive/errors.hpp"
#include "svdrive/inverter.hpp"
#include "svdrive/machine.hpp"
#include "svdrive/solver.hpp"
#include "svdrive/svpwm.hpp"

namespace svdrive {

// Balanced positive-sequence set with phase a = Vpk cos(2 pi fo t).
inline ThreePhase ideal_source_voltages(double t, double v_ll_rms, double fo) {
  const double peak = v_ll_rms * std::sqrt(2.0) / sqrt3;
  const double th = two_pi * fo * t;
  return {peak * std::cos(th), peak * std::cos(th - two_pi / 3.0),
          peak * std::cos(th + two_pi / 3.0)};
}

// Regular-sampled SVPWM inverter. The reference is sampled at the start of
// each carrier period and that period's sequence is cached until time moves on.
class PwmSource {
 public:
  explicit PwmSource(const ModulatorConfig& cfg) : cfg_(cfg), bus_{cfg.vdc} { cfg_.validate(); }

  const SwitchingSequence& sequence(long period_index) {
    if (period_index != current_) {
      const double angle = cfg_.omega_o() * period_index * cfg_.period();
      const SectorPosition pos = sector_of(angle);
      seq_ = build_sequence(pos.sector, dwell_times(cfg_.vref(), pos.theta, cfg_));
      current_ = period_index;
      ++built_;
    }
    return seq_;
  }

  // Mean phase voltages over [t_begin, t_end]; an interval that crosses a
  // carrier edge is split between the two periods.
  PhaseVoltages average(double t_begin, double t_end) {
    const double ts = cfg_.period();
    const long p = period_of(t_begin);
    const double a = std::max(t_begin - p * ts, 0.0);
    const double b = t_end - p * ts;
    if (!(t_end > t_begin)) return phase_voltages(sample_gates(sequence(p), a), bus_);
    if (b <= ts * (1.0 + 1e-9)) return average_phase_voltages(sequence(p), bus_, a, std::min(b, ts));

    const PhaseVoltages head = average_phase_voltages(sequence(p), bus_, a, ts);
    const PhaseVoltages tail = average(p * ts + ts, t_end);
    const double wa = (ts - a) / (b - a);
    const double wb = 1.0 - wa;
    return {wa * head.van + wb * tail.van, wa * head.vbn + wb * tail.vbn,
            wa * head.vcn + wb * tail.vcn};
  }

  long period_of(double t) const { return static_cast<long>(std::floor(t * cfg_.fsw + 1e-9)); }
  std::size_t sequences_built() const { return built_; }
  const ModulatorConfig& config() const { return cfg_; }

 private:
  ModulatorConfig cfg_;
  DcBus bus_;
  long current_ = -1;
  SwitchingSequence seq_{};
  std::size_t built_ = 0;
};

// All series share the grid t_k = k * dt.
struct TimeSeries {
  double dt = 0.0;
  std::vector<double> t, ia, ib, ic, vas, te, speed_pu;

  static const std::vector<std::string>& columns() {
    static const std::vector<std::string> names{"t", "ia", "ib", "ic", "vas", "te", "speed_pu"};
    return names;
  }

  const std::vector<double>& column(const std::string& name) const {
    if (name == "t") return t;
    if (name == "ia") return ia;
    if (name == "ib") return ib;
    if (name == "ic") return ic;
    if (name == "vas") return vas;
    if (name == "te") return te;
    if (name == "speed_pu") return speed_pu;
    throw InvalidInput("unknown series '" + name + "'");
  }

  Waveform waveform(const std::string& name) const { return {column(name), 1.0 / dt, 0.0}; }
};

struct RunMetrics {
  std::optional<double> ripple_ia;        // peak-to-peak, steady window
  std::optional<double> thd_vas;
  std::optional<double> thd_ia;
  std::optional<double> pre_step_speed;   // mean speed_pu, steady window
  std::optional<double> min_speed;        // dip window
  std::optional<double> speed_dip;        // pre_step_speed - min_speed
  std::optional<double> settled_speed;    // mean speed_pu, settle window
};

struct RunResult {
  SimulationConfig config;
  TimeSeries series;
  RunMetrics metrics;
  std::optional<Spectrum> spectrum_vas;   // steady window
  std::optional<Spectrum> spectrum_ia;    // steady window
  std::optional<Spectrum> spectrum_te;    // loaded window
  std::size_t sequences_built = 0;
  MachineState final_state;

  std::string label() const {
    if (config.source == SourceKind::ideal) return "ideal";
    return "fsw_" + format_number(config.fsw, 10);
  }
};

namespace detail {

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline std::optional<double> optional_thd(const Spectrum& sp, double f1) {
  try {
    return thd(sp, f1);
  } catch (const UndefinedThd&) {
    return std::nullopt;
  }
}

inline void compute_metrics(RunResult& r) {
  const SimulationConfig& cfg = r.config;
  const TimeSeries& s = r.series;
  const double t_end = s.t.back();
  const Waveform speed = s.waveform("speed_pu");

  if (cfg.steady_window.within(t_end)) {
    const auto& w = cfg.steady_window;
    const Waveform ia = slice(s.waveform("ia"), w.begin, w.end);
    const Waveform vas = slice(s.waveform("vas"), w.begin, w.end);
    r.metrics.ripple_ia = ripple_pp(ia, cfg.fo);
    r.spectrum_ia = spectrum(ia, cfg.fo);
    r.spectrum_vas = spectrum(vas, cfg.fo);
    r.metrics.thd_ia = optional_thd(*r.spectrum_ia, cfg.fo);
    r.metrics.thd_vas = optional_thd(*r.spectrum_vas, cfg.fo);
    r.metrics.pre_step_speed = mean(slice(speed, w.begin, w.end).samples);
  }
  if (cfg.dip_window.within(t_end)) {
    const auto win = slice(speed, cfg.dip_window.begin, cfg.dip_window.end).samples;
    if (!win.empty()) {
      r.metrics.min_speed = *std::min_element(win.begin(), win.end());
      if (r.metrics.pre_step_speed) {
        r.metrics.speed_dip = *r.metrics.pre_step_speed - *r.metrics.min_speed;
      }
    }
  }
  if (cfg.settle_window.within(t_end)) {
    const auto win = slice(speed, cfg.settle_window.begin, cfg.settle_window.end).samples;
    if (!win.empty()) r.metrics.settled_speed = mean(win);
  }
  if (cfg.loaded_window.within(t_end)) {
    const Waveform te = slice(s.waveform("te"), cfg.loaded_window.begin, cfg.loaded_window.end);
    r.spectrum_te = spectrum(te, cfg.fo);
  }
}

}  // namespace detail

// Direct-on-line run from a zero state.
inline RunResult run_simulation(const SimulationConfig& cfg) {
  cfg.validate();
  const MachineParams params = cfg.params();
  const double dt = cfg.step();
  const std::size_t n = cfg.step_count();

  RunResult r;
  r.config = cfg;
  TimeSeries& s = r.series;
  s.dt = dt;
  for (auto* v : {&s.t, &s.ia, &s.ib, &s.ic, &s.vas, &s.te, &s.speed_pu}) v->reserve(n + 1);

  std::optional<PwmSource> pwm;
  if (cfg.source == SourceKind::svpwm) pwm.emplace(cfg.modulator());

  auto record = [&](double t, const MachineState& x, double vas) {
    const MachineOutputs o = machine_outputs(x, params);
    s.t.push_back(t);
    s.ia.push_back(o.ia);
    s.ib.push_back(o.ib);
    s.ic.push_back(o.ic);
    s.vas.push_back(vas);
    s.te.push_back(o.te);
    s.speed_pu.push_back(o.speed_pu);
  };

  MachineState x{};
  record(0.0, x,
         pwm ? pwm->average(0.0, 0.0).van : ideal_source_voltages(0.0, cfg.v_ll_rms, cfg.fo).a);

  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    auto rhs = [&](const MachineState& xs, double ts, Rk4Stage stage) {
      SpaceVector v;
      if (pwm) {
        // Stage voltage is the mean over the stage's quadrature span, so each
        // step applies exactly the commanded volt-seconds.
        const StageSpan span = stage_span(stage);
        v = clarke_transform(pwm->average(t + span.begin * dt, t + span.end * dt).abc());
      } else {
        v = clarke_transform(ideal_source_voltages(ts, cfg.v_ll_rms, cfg.fo));
      }
      return state_derivative(xs, v.vq, v.vd, load_profile(ts, cfg.load_steps), params);
    };
    x = rk4_step(rhs, x, t, dt);
    const double t_next = static_cast<double>(k + 1) * dt;
    record(t_next, x,
           pwm ? pwm->average(t, t + dt).van
               : ideal_source_voltages(t_next, cfg.v_ll_rms, cfg.fo).a);
  }

  r.final_state = x;
  r.sequences_built = pwm ? pwm->sequences_built() : 0;
  detail::compute_metrics(r);
  return r;
}

}  // namespace svdrive
