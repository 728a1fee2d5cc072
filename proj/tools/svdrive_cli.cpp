// svdrive: command-line front end for single runs, carrier sweeps and
// re-analysis of recorded time series.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "svdrive/svdrive.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 1, kRuntime = 2, kIo = 3 };

svdrive::SimulationConfig load_or_default(const std::string& path) {
  return path.empty() ? svdrive::SimulationConfig{} : svdrive::load_config(path);
}

void print_metrics(const svdrive::RunResult& r) {
  const auto show = [](const char* name, const std::optional<double>& v) {
    std::printf("  %-18s %s\n", name, v ? svdrive::format_number(*v, 8).c_str() : "n/a");
  };
  std::printf("%s: %zu samples, dt = %s s\n", r.label().c_str(), r.series.t.size(),
              svdrive::format_number(r.series.dt, 8).c_str());
  show("ripple_pp(ia)", r.metrics.ripple_ia);
  show("THD(vas)", r.metrics.thd_vas);
  show("THD(ia)", r.metrics.thd_ia);
  show("speed dip", r.metrics.speed_dip);
  show("settled speed", r.metrics.settled_speed);
}

int run_simulate(const std::string& config, const std::optional<double>& fsw,
                 const std::string& source, const std::string& out) {
  svdrive::SimulationConfig cfg = load_or_default(config);
  if (fsw) cfg.fsw = *fsw;
  if (!source.empty()) cfg.source = svdrive::parse_source(source);
  const svdrive::RunResult r = svdrive::run_simulation(cfg);
  svdrive::write_outputs(r, out);
  print_metrics(r);
  return kOk;
}

int run_sweep(const std::string& config, const std::vector<double>& fsw, const std::string& out) {
  const svdrive::SimulationConfig cfg = load_or_default(config);
  const svdrive::ComparisonReport rep = svdrive::switching_sweep(cfg, fsw);
  svdrive::write_outputs(rep, out);
  for (const auto& r : rep.runs) print_metrics(r);
  for (const auto& a : rep.assertions) {
    std::printf("%s  %s  (%s)\n", a.passed ? "PASS" : "FAIL", a.name.c_str(), a.detail.c_str());
  }
  return kOk;
}

int run_spectrum(const std::string& in, const std::string& column, double f1,
                 const std::optional<double>& from, const std::optional<double>& to,
                 const std::string& out) {
  const svdrive::CsvTable table = svdrive::read_csv(in);
  const auto& t = table.column("t");
  if (t.size() < 2) throw svdrive::InvalidWindow(in + ": need at least two rows");
  svdrive::Waveform w{table.column(column), 1.0 / (t[1] - t[0]), t.front()};
  w = svdrive::slice(w, from.value_or(t.front()), to.value_or(t.back() + 0.5 / w.sample_rate));
  const svdrive::Spectrum sp = svdrive::spectrum(w, f1);

  svdrive::detail::ensure_dir(out);
  const std::string path = (svdrive::fs::path(out) / ("spectrum_" + column + ".csv")).string();
  svdrive::write_spectrum_csv(path, sp);

  std::printf("%s: %zu bins, resolution %s Hz, fundamental %s\n", path.c_str(), sp.bins.size(),
              svdrive::format_number(sp.resolution, 8).c_str(),
              svdrive::format_number(sp.magnitude_at(f1), 8).c_str());
  try {
    std::printf("THD %s\n", svdrive::format_number(svdrive::thd(sp, f1), 8).c_str());
  } catch (const svdrive::UndefinedThd& e) {
    std::printf("THD undefined: %s\n", e.what());
  }
  for (const auto& b : svdrive::dominant_harmonics(sp, 5, f1)) {
    std::printf("  %10s Hz  %s\n", svdrive::format_number(b.frequency, 8).c_str(),
                svdrive::format_number(b.magnitude, 8).c_str());
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Induction machine fed by an SVPWM voltage-source inverter"};
  app.require_subcommand(1);

  std::string config, source, out, in, column;
  std::optional<double> fsw, from, to;
  std::vector<double> fsw_list{1000.0, 3500.0, 7000.0};
  double f1 = 60.0;

  auto* simulate = app.add_subcommand("simulate", "run one scenario");
  simulate->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
  simulate->add_option("--fsw", fsw, "carrier frequency override [Hz]");
  simulate->add_option("--source", source, "ideal | svpwm")->check(CLI::IsMember({"ideal", "svpwm"}));
  simulate->add_option("--out", out, "output directory")->required();

  auto* sweep = app.add_subcommand("sweep", "carrier sweep plus ideal-source reference");
  sweep->add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
  sweep->add_option("--fsw", fsw_list, "carrier frequencies [Hz]")->delimiter(',');
  sweep->add_option("--out", out, "output directory")->required();

  auto* spec = app.add_subcommand("spectrum", "spectrum of one column of a timeseries CSV");
  spec->add_option("--in", in, "timeseries CSV")->required()->check(CLI::ExistingFile);
  spec->add_option("--column", column, "column name")->required();
  spec->add_option("--f1", f1, "fundamental frequency [Hz]");
  spec->add_option("--from", from, "window start [s]");
  spec->add_option("--to", to, "window end [s]");
  spec->add_option("--out", out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*simulate) return run_simulate(config, fsw, source, out);
    if (*sweep) return run_sweep(config, fsw_list, out);
    return run_spectrum(in, column, f1, from, to, out);
  } catch (const svdrive::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const svdrive::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfig;
  } catch (const svdrive::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
