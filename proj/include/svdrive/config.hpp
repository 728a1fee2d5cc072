#pragma once

// Scenario configuration and its flat `key = value` file format.
//
//   # comment
//   source      = svpwm          # ideal | svpwm
//   fsw         = 7000           # Hz, carrier (svpwm only)
//   vdc         = 625            # V
//   mod_index   = 0.9            # reference peak / (2/3 vdc)
//   fo          = 60             # Hz, fundamental
//   v_ll_rms    = 460            # V, ideal-source line-to-line rms
//   t_end       = 4.0            # s
//   dt          = 0              # s, 0 selects 1/(10 fsw) or 1/70000 for ideal
//   load_steps  = 3.26:200       # time:torque pairs, comma separated; "none" for no load
//   r1 r2 x1 x2 xm j poles f_base v_rated_ll slip_rated   # nameplate overrides
//   steady_window = 2.7,3.2      # pre-step analysis window
//   dip_window    = 3.26,3.8     # speed-dip search window
//   settle_window = 3.9,4.0      # settled-speed averaging window
//   loaded_window = 3.5,4.0      # post-step torque-spectrum window

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "svdrive/errors.hpp"
#include "svdrive/machine.hpp"
#include "svdrive/svpwm.hpp"

namespace svdrive {

enum class SourceKind { ideal, svpwm };

inline std::string to_string(SourceKind s) { return s == SourceKind::ideal ? "ideal" : "svpwm"; }

inline SourceKind parse_source(std::string_view s) {
  if (s == "ideal") return SourceKind::ideal;
  if (s == "svpwm") return SourceKind::svpwm;
  throw ConfigError("source must be 'ideal' or 'svpwm', got '" + std::string(s) + "'");
}

struct LoadStep {
  double time = 0.0;
  double torque = 0.0;
};

struct TimeWindow {
  double begin = 0.0;
  double end = 0.0;

  bool within(double t_end) const { return begin >= 0.0 && end > begin && end <= t_end + 1e-9; }
};

// Ideal-source runs share this step so their grid lines up with a 7 kHz carrier.
inline constexpr double kIdealSourceDt = 1.0 / 70000.0;

struct SimulationConfig {
  SourceKind source = SourceKind::svpwm;
  double fsw = 7000.0;
  double vdc = 625.0;
  double mod_index = 0.9;
  double fo = 60.0;
  double v_ll_rms = 460.0;
  double t_end = 4.0;
  double dt = 0.0;
  std::vector<LoadStep> load_steps{{3.26, 200.0}};
  Nameplate machine = reference_nameplate();

  TimeWindow steady_window{2.7, 3.2};
  TimeWindow dip_window{3.26, 3.8};
  TimeWindow settle_window{3.9, 4.0};
  TimeWindow loaded_window{3.5, 4.0};

  double step() const {
    if (dt > 0.0) return dt;
    return source == SourceKind::svpwm ? 0.1 / fsw : kIdealSourceDt;
  }
  // Number of integration steps; the time series holds one more sample.
  std::size_t step_count() const {
    return static_cast<std::size_t>(std::floor(t_end / step() + 1e-9));
  }
  ModulatorConfig modulator() const { return {fsw, vdc, mod_index, fo}; }
  MachineParams params() const { return params_from_nameplate(machine); }

  void validate() const {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw ConfigError("t_end must be > 0");
    if (dt < 0.0 || !std::isfinite(dt)) throw ConfigError("dt must be >= 0");
    if (!(fo > 0.0)) throw ConfigError("fo must be > 0");
    if (source == SourceKind::svpwm) {
      try {
        modulator().validate();
      } catch (const InvalidInput& e) {
        throw ConfigError(e.what());
      }
    } else if (!(v_ll_rms >= 0.0)) {
      throw ConfigError("v_ll_rms must be >= 0");
    }
    for (std::size_t i = 0; i < load_steps.size(); ++i) {
      if (!std::isfinite(load_steps[i].time) || !std::isfinite(load_steps[i].torque)) {
        throw ConfigError("load step values must be finite");
      }
      if (i > 0 && !(load_steps[i].time > load_steps[i - 1].time)) {
        throw ConfigError("load step times must be strictly increasing");
      }
    }
    try {
      params();
    } catch (const InvalidInput& e) {
      throw ConfigError(e.what());
    }
  }
};

// Piecewise-constant load: zero before the first step, then the latest step.
inline double load_profile(double t, const std::vector<LoadStep>& steps) {
  double tl = 0.0;
  for (const auto& s : steps) {
    if (t >= s.time) {
      tl = s.torque;
    } else {
      break;
    }
  }
  return tl;
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  if (used != text.size()) throw ConfigError(key + ": '" + text + "' is not a number");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

inline TimeWindow parse_window(const std::string& key, const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw ConfigError(key + ": expected 'begin,end'");
  return {parse_double(key, parts[0]), parse_double(key, parts[1])};
}

}  // namespace detail

// "t:T, t:T, ..." or "none".
inline std::vector<LoadStep> parse_load_steps(const std::string& text) {
  const std::string t = detail::trim(text);
  std::vector<LoadStep> steps;
  if (t.empty() || t == "none") return steps;
  for (const auto& item : detail::split(t, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("load_steps: expected time:torque, got '" + item + "'");
    steps.push_back({detail::parse_double("load_steps", detail::trim(item.substr(0, colon))),
                     detail::parse_double("load_steps", detail::trim(item.substr(colon + 1)))});
  }
  return steps;
}

// Applies one key/value pair onto cfg.
inline void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_double;
  const std::map<std::string, double*> numbers{
      {"fsw", &cfg.fsw},         {"vdc", &cfg.vdc},
      {"mod_index", &cfg.mod_index}, {"fo", &cfg.fo},
      {"v_ll_rms", &cfg.v_ll_rms}, {"t_end", &cfg.t_end},
      {"dt", &cfg.dt},           {"r1", &cfg.machine.r1},
      {"r2", &cfg.machine.r2},   {"x1", &cfg.machine.x1},
      {"x2", &cfg.machine.x2},   {"xm", &cfg.machine.xm},
      {"j", &cfg.machine.j},     {"f_base", &cfg.machine.f_base},
      {"v_rated_ll", &cfg.machine.v_rated_ll}, {"slip_rated", &cfg.machine.slip_rated},
  };
  const std::map<std::string, TimeWindow*> windows{
      {"steady_window", &cfg.steady_window},
      {"dip_window", &cfg.dip_window},
      {"settle_window", &cfg.settle_window},
      {"loaded_window", &cfg.loaded_window},
  };
  if (auto it = numbers.find(key); it != numbers.end()) {
    *it->second = parse_double(key, value);
  } else if (auto w = windows.find(key); w != windows.end()) {
    *w->second = detail::parse_window(key, value);
  } else if (key == "source") {
    cfg.source = parse_source(value);
  } else if (key == "poles") {
    const double p = parse_double(key, value);
    if (p != std::floor(p)) throw ConfigError("poles must be an integer");
    cfg.machine.poles = static_cast<int>(p);
  } else if (key == "load_steps") {
    cfg.load_steps = parse_load_steps(value);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

inline SimulationConfig parse_config(std::istream& is, SimulationConfig cfg = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = detail::trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      apply_setting(cfg, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return cfg;
}

inline SimulationConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path);
  try {
    return parse_config(is);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace svdrive
