#pragma once

// Switching-frequency sweep against an ideal-source reference run.

#include <algorithm>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "svdrive/analysis.hpp"
#include "svdrive/config.hpp"
#include "svdrive/simulation.hpp"

namespace svdrive {

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ReportRow {
  std::string label;
  SourceKind source = SourceKind::svpwm;
  double fsw = 0.0;
  RunMetrics metrics;
  std::optional<double> thd_vas_band;  // THD(vas) below the highest carrier's sidebands
  std::size_t sequences_built = 0;
};

struct ComparisonReport {
  std::vector<RunResult> runs;  // ideal first, then the VSI runs in request order
  std::vector<ReportRow> rows;
  std::vector<Assertion> assertions;
  double band_limit = 0.0;

  bool all_passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }
};

// Upper edge of the sub-switching band for a carrier list: the lowest
// sideband of the highest carrier.
inline double sub_switching_band(const std::vector<double>& fsw_list, double fo) {
  return *std::max_element(fsw_list.begin(), fsw_list.end()) - 4.0 * fo;
}

// True when f lies within +-width of a positive integer multiple of fsw.
inline bool near_carrier_multiple(double f, double fsw, double width) {
  const double k = std::max(1.0, std::round(f / fsw));
  return std::abs(f - k * fsw) <= width;
}

namespace detail {

inline std::string fmt_opt(const std::optional<double>& v, int digits = 6) {
  return v ? format_number(*v, digits) : std::string("n/a");
}

inline void add_assertions(ComparisonReport& rep) {
  const RunResult& ideal = rep.runs.front();
  std::vector<const RunResult*> vsi;
  for (std::size_t i = 1; i < rep.runs.size(); ++i) vsi.push_back(&rep.runs[i]);
  std::vector<const RunResult*> by_fsw = vsi;
  std::stable_sort(by_fsw.begin(), by_fsw.end(),
                   [](const RunResult* a, const RunResult* b) { return a->config.fsw < b->config.fsw; });
  const double fo = ideal.config.fo;

  if (by_fsw.size() >= 2) {
    bool ok = true;
    std::string detail;
    for (std::size_t i = 0; i < by_fsw.size(); ++i) {
      const auto& r = by_fsw[i]->metrics.ripple_ia;
      detail += by_fsw[i]->label() + "=" + fmt_opt(r) + " ";
      if (!r) ok = false;
      if (i > 0 && r && by_fsw[i - 1]->metrics.ripple_ia && !(*r < *by_fsw[i - 1]->metrics.ripple_ia)) ok = false;
    }
    rep.assertions.push_back({"ripple_pp(ia) strictly decreasing with fsw", ok, detail});

    ok = true;
    detail.clear();
    std::optional<double> prev;
    for (const RunResult* r : by_fsw) {
      const auto& row = *std::find_if(rep.rows.begin(), rep.rows.end(),
                                      [&](const ReportRow& x) { return x.label == r->label(); });
      detail += r->label() + "=" + fmt_opt(row.thd_vas_band) + " ";
      if (!row.thd_vas_band) ok = false;
      if (prev && row.thd_vas_band && *row.thd_vas_band > *prev * 1.05) ok = false;
      prev = row.thd_vas_band;
    }
    rep.assertions.push_back({"sub-switching THD(vas) non-increasing with fsw (5% slack)", ok, detail});
  }

  for (const RunResult* r : vsi) {
    const auto& m = r->metrics;
    const std::string tag = " [" + r->label() + "]";
    if (m.thd_ia && m.thd_vas) {
      rep.assertions.push_back({"THD(ia) < THD(vas)" + tag, *m.thd_ia < *m.thd_vas,
                                "THD(ia)=" + fmt_opt(m.thd_ia) + " THD(vas)=" + fmt_opt(m.thd_vas)});
    }
    if (m.speed_dip && ideal.metrics.speed_dip) {
      rep.assertions.push_back({"speed dip exceeds ideal-source dip" + tag,
                                *m.speed_dip > *ideal.metrics.speed_dip,
                                "dip=" + fmt_opt(m.speed_dip) + " ideal=" + fmt_opt(ideal.metrics.speed_dip)});
    }
    if (r->spectrum_vas) {
      const auto top = dominant_harmonics(*r->spectrum_vas, 1, fo);
      if (!top.empty()) {
        rep.assertions.push_back(
            {"largest voltage harmonic within 4*fo of a carrier multiple" + tag,
             near_carrier_multiple(top[0].frequency, r->config.fsw, 4.0 * fo),
             "f=" + format_number(top[0].frequency, 8) + " Hz mag=" + format_number(top[0].magnitude, 6)});
      }
    }
    if (r->spectrum_vas && r->spectrum_ia) {
      const auto& sv = *r->spectrum_vas;
      const auto& si = *r->spectrum_ia;
      const double v1 = sv.magnitude_at(fo), i1 = si.magnitude_at(fo);
      bool ok = true;
      double worst = 0.0;
      for (const auto& b : dominant_harmonics(sv, 10, fo)) {
        const double ratio = (si.magnitude_at(b.frequency) / i1) / (b.magnitude / v1);
        worst = std::max(worst, ratio);
        if (!(ratio < 1.0)) ok = false;
      }
      rep.assertions.push_back({"Vn/V1 > In/I1 on top-10 voltage harmonics" + tag, ok,
                                "max (In/I1)/(Vn/V1)=" + format_number(worst, 6)});
    }
    if (r->spectrum_te) {
      const auto& st = *r->spectrum_te;
      const double dc = st.bins.front().magnitude;
      double worst = 0.0;
      for (std::size_t k = 1; k < st.bins.size(); ++k) worst = std::max(worst, st.bins[k].magnitude);
      rep.assertions.push_back({"torque harmonics < 10% of DC" + tag, worst < 0.1 * std::abs(dc),
                                "DC=" + format_number(dc, 6) + " max AC=" + format_number(worst, 6)});
    }
  }
}

}  // namespace detail

// One ideal-source run plus one VSI run per carrier frequency. Runs execute
// concurrently; results keep the request order.
inline ComparisonReport switching_sweep(const SimulationConfig& base, const std::vector<double>& fsw_list) {
  if (fsw_list.empty()) throw ConfigError("fsw list must not be empty");
  for (double f : fsw_list) {
    if (!(f > 0.0) || !std::isfinite(f)) throw ConfigError("switching frequencies must be > 0");
  }
  std::vector<SimulationConfig> configs;
  SimulationConfig ideal = base;
  ideal.source = SourceKind::ideal;
  configs.push_back(ideal);
  for (double f : fsw_list) {
    SimulationConfig c = base;
    c.source = SourceKind::svpwm;
    c.fsw = f;
    configs.push_back(c);
  }
  for (const auto& c : configs) c.validate();

  std::vector<std::future<RunResult>> jobs;
  for (const auto& c : configs) {
    jobs.push_back(std::async(std::launch::async, [c] { return run_simulation(c); }));
  }

  ComparisonReport rep;
  rep.band_limit = sub_switching_band(fsw_list, base.fo);
  for (auto& j : jobs) rep.runs.push_back(j.get());

  for (const RunResult& r : rep.runs) {
    ReportRow row;
    row.label = r.label();
    row.source = r.config.source;
    row.fsw = r.config.source == SourceKind::svpwm ? r.config.fsw : 0.0;
    row.metrics = r.metrics;
    row.sequences_built = r.sequences_built;
    if (r.spectrum_vas) {
      try {
        row.thd_vas_band = thd_band(*r.spectrum_vas, base.fo, 0.0, rep.band_limit);
      } catch (const UndefinedThd&) {
      }
    }
    rep.rows.push_back(row);
  }
  detail::add_assertions(rep);
  return rep;
}

}  // namespace svdrive
