#pragma once

// CSV, report and gnuplot writers for runs and sweeps.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "svdrive/analysis.hpp"
#include "svdrive/errors.hpp"
#include "svdrive/simulation.hpp"
#include "svdrive/study.hpp"

namespace svdrive {

namespace fs = std::filesystem;

// Columns of a CSV file with a single header line.
struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return columns[i];
    }
    throw InvalidInput("no column named '" + name + "'");
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw IoError(path + ": empty file");
  {
    std::stringstream ss(line);
    std::string name;
    while (std::getline(ss, name, ',')) table.names.push_back(name);
  }
  table.columns.resize(table.names.size());
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= table.names.size()) throw IoError(path + ": too many fields on row " + std::to_string(row));
      try {
        table.columns[col].push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path + ": malformed number on row " + std::to_string(row));
      }
      ++col;
    }
    if (col != table.names.size()) throw IoError(path + ": too few fields on row " + std::to_string(row));
  }
  return table;
}

namespace detail {

inline std::ofstream open_for_write(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  return os;
}

inline void finish(std::ofstream& os, const fs::path& path) {
  os.flush();
  if (!os) throw IoError("write failed: " + path.string());
}

inline void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  }
}

inline void write_timeseries(const fs::path& path, const TimeSeries& s) {
  std::ofstream os = open_for_write(path);
  os << "t,ia,ib,ic,vas,te,speed_pu\n";
  std::string line;
  for (std::size_t k = 0; k < s.t.size(); ++k) {
    line.clear();
    for (const auto* col : {&s.t, &s.ia, &s.ib, &s.ic, &s.vas, &s.te, &s.speed_pu}) {
      if (!line.empty()) line += ',';
      line += format_number((*col)[k], 10);
    }
    line += '\n';
    os << line;
  }
  finish(os, path);
}

inline void write_metrics(std::ostream& os, const RunMetrics& m) {
  os << "  ripple_pp(ia) [A]     " << fmt_opt(m.ripple_ia) << '\n'
     << "  THD(vas)              " << fmt_opt(m.thd_vas) << '\n'
     << "  THD(ia)               " << fmt_opt(m.thd_ia) << '\n'
     << "  pre-step speed [pu]   " << fmt_opt(m.pre_step_speed, 8) << '\n'
     << "  min speed [pu]        " << fmt_opt(m.min_speed, 8) << '\n'
     << "  speed dip [pu]        " << fmt_opt(m.speed_dip, 6) << '\n'
     << "  settled speed [pu]    " << fmt_opt(m.settled_speed, 8) << '\n';
}

inline void write_gnuplot(const fs::path& path, bool with_spectra) {
  std::ofstream os = open_for_write(path);
  os << "# gnuplot -p plot.gp\n"
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set multiplot layout 3,1\n"
        "plot 'timeseries.csv' using 1:2 with lines\n"
        "plot 'timeseries.csv' using 1:6 with lines\n"
        "plot 'timeseries.csv' using 1:7 with lines\n"
        "unset multiplot\n";
  if (with_spectra) {
    os << "pause -1\n"
          "set logscale y\n"
          "set multiplot layout 3,1\n"
          "plot 'spectrum_vas.csv' using 1:2 with impulses\n"
          "plot 'spectrum_ia.csv' using 1:2 with impulses\n"
          "plot 'spectrum_te.csv' using 1:2 with impulses\n"
          "unset multiplot\n";
  }
  finish(os, path);
}

inline void write_run_files(const RunResult& r, const fs::path& dir) {
  ensure_dir(dir);
  write_timeseries(dir / "timeseries.csv", r.series);
  if (r.spectrum_vas) write_spectrum_csv((dir / "spectrum_vas.csv").string(), *r.spectrum_vas);
  if (r.spectrum_ia) write_spectrum_csv((dir / "spectrum_ia.csv").string(), *r.spectrum_ia);
  if (r.spectrum_te) write_spectrum_csv((dir / "spectrum_te.csv").string(), *r.spectrum_te);
  write_gnuplot(dir / "plot.gp", r.spectrum_vas && r.spectrum_ia && r.spectrum_te);
}

}  // namespace detail

inline void write_outputs(const RunResult& r, const std::string& dir) {
  const fs::path out(dir);
  detail::write_run_files(r, out);
  const fs::path report = out / "report.txt";
  std::ofstream os = detail::open_for_write(report);
  os << "run " << r.label() << "\n"
     << "  source                " << to_string(r.config.source) << '\n'
     << "  dt [s]                " << format_number(r.series.dt, 10) << '\n'
     << "  samples               " << r.series.t.size() << '\n'
     << "  switching sequences   " << r.sequences_built << '\n';
  detail::write_metrics(os, r.metrics);
  detail::finish(os, report);
}

inline void write_outputs(const ComparisonReport& rep, const std::string& dir) {
  const fs::path out(dir);
  detail::ensure_dir(out);
  for (const RunResult& r : rep.runs) detail::write_run_files(r, out / r.label());

  const fs::path summary = out / "summary.csv";
  {
    std::ofstream os = detail::open_for_write(summary);
    os << "run,fsw_hz,ripple_pp_ia,thd_vas,thd_ia,thd_vas_band,pre_step_speed,min_speed,speed_dip,settled_speed\n";
    for (const ReportRow& row : rep.rows) {
      const RunMetrics& m = row.metrics;
      os << row.label << ',' << format_number(row.fsw, 10);
      for (const auto& v : {m.ripple_ia, m.thd_vas, m.thd_ia, row.thd_vas_band, m.pre_step_speed,
                            m.min_speed, m.speed_dip, m.settled_speed}) {
        os << ',' << (v ? format_number(*v, 10) : std::string());
      }
      os << '\n';
    }
    detail::finish(os, summary);
  }

  const fs::path report = out / "report.txt";
  std::ofstream os = detail::open_for_write(report);
  os << "switching-frequency sweep\n"
     << "sub-switching band for THD(vas): 0 .. " << format_number(rep.band_limit, 8) << " Hz\n\n";
  for (const ReportRow& row : rep.rows) {
    os << "run " << row.label << '\n';
    detail::write_metrics(os, row.metrics);
    os << "  THD(vas) sub-band      " << detail::fmt_opt(row.thd_vas_band) << '\n'
       << "  switching sequences   " << row.sequences_built << "\n\n";
  }
  os << "assertions\n";
  for (const Assertion& a : rep.assertions) {
    os << (a.passed ? "  PASS  " : "  FAIL  ") << a.name << "  (" << a.detail << ")\n";
  }
  detail::finish(os, report);
}

}  // namespace svdrive
