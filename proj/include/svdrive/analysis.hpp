#pragma once

// Spectral and ripple analysis of uniformly sampled waveforms.

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "svdrive/errors.hpp"
#include "svdrive/svpwm.hpp"

namespace svdrive {

struct Waveform {
  std::vector<double> samples;
  double sample_rate = 1.0;
  double start_time = 0.0;

  double duration() const { return samples.size() / sample_rate; }
};

struct SpectralBin {
  double frequency = 0.0;
  double magnitude = 0.0;

  friend bool operator==(const SpectralBin&, const SpectralBin&) = default;
};

// Single-sided amplitude spectrum: a bin-centred sinusoid of amplitude A
// reads A, DC reads the mean.
struct Spectrum {
  std::vector<SpectralBin> bins;
  double resolution = 0.0;

  // Index of the bin nearest to f, clamped to the available range.
  std::size_t index_of(double f) const {
    if (bins.empty()) return 0;
    const double k = std::round(f / resolution);
    if (k <= 0.0) return 0;
    return std::min(static_cast<std::size_t>(k), bins.size() - 1);
  }
  double magnitude_at(double f) const { return bins.empty() ? 0.0 : bins[index_of(f)].magnitude; }
};

// Samples whose timestamps fall in [t_begin, t_end).
inline Waveform slice(const Waveform& w, double t_begin, double t_end) {
  const double eps = 1e-6 / w.sample_rate;
  auto index = [&](double t) {
    const double k = std::ceil((t - w.start_time) * w.sample_rate - eps * w.sample_rate);
    return static_cast<std::size_t>(std::clamp(k, 0.0, static_cast<double>(w.samples.size())));
  };
  const std::size_t lo = index(t_begin);
  const std::size_t hi = std::max(lo, index(t_end));
  Waveform out;
  out.sample_rate = w.sample_rate;
  out.start_time = w.start_time + lo / w.sample_rate;
  out.samples.assign(w.samples.begin() + static_cast<std::ptrdiff_t>(lo),
                     w.samples.begin() + static_cast<std::ptrdiff_t>(hi));
  return out;
}

// Leading whole cycles of f1. Throws when less than one cycle is available.
inline Waveform trim_to_cycles(const Waveform& w, double f1) {
  if (!(f1 > 0.0) || !(w.sample_rate > 0.0)) {
    throw InvalidWindow("fundamental frequency and sample rate must be > 0");
  }
  if (w.samples.size() < 2) throw InvalidWindow("waveform needs at least two samples");
  const double samples_per_cycle = w.sample_rate / f1;
  const double cycles = std::floor(w.samples.size() / samples_per_cycle + 1e-9);
  if (cycles < 1.0) throw InvalidWindow("window shorter than one fundamental cycle");
  const auto n = std::min(w.samples.size(),
                          static_cast<std::size_t>(std::llround(cycles * samples_per_cycle)));
  Waveform out = w;
  out.samples.resize(n);
  return out;
}

namespace detail {

// The FFTW planner is not thread-safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace detail

// Rectangular-window DFT magnitudes over the leading whole cycles of f1.
inline Spectrum spectrum(const Waveform& w, double f1) {
  const Waveform win = trim_to_cycles(w, f1);
  const std::size_t n = win.samples.size();
  const std::size_t n_out = n / 2 + 1;

  std::unique_ptr<double, detail::FftwDeleter> in(
      static_cast<double*>(fftw_malloc(sizeof(double) * n)));
  std::unique_ptr<fftw_complex, detail::FftwDeleter> out(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_out)));
  if (!in || !out) throw Error("spectrum: allocation failed");

  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
  }
  std::copy(win.samples.begin(), win.samples.end(), in.get());
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum sp;
  sp.resolution = win.sample_rate / static_cast<double>(n);
  sp.bins.resize(n_out);
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < n_out; ++k) {
    const double mag = std::hypot(out.get()[k][0], out.get()[k][1]);
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    sp.bins[k] = {k * sp.resolution, (edge ? 1.0 : 2.0) * mag / nn};
  }
  return sp;
}

// Broadband THD over bins in [f_lo, f_hi], excluding DC and the f1 bin.
inline double thd_band(const Spectrum& sp, double f1, double f_lo, double f_hi) {
  if (sp.bins.empty()) throw UndefinedThd("empty spectrum");
  const std::size_t k1 = sp.index_of(f1);
  const double fundamental = sp.bins[k1].magnitude;
  double peak = 0.0;
  for (const auto& b : sp.bins) peak = std::max(peak, b.magnitude);
  // Rounding leaves ~1e-16 relative residue in bins that are exactly empty.
  if (!(fundamental > 1e-12 * peak) || std::abs(sp.bins[k1].frequency - f1) > sp.resolution / 2.0) {
    throw UndefinedThd("fundamental bin missing or zero");
  }
  double sum = 0.0;
  for (std::size_t k = 1; k < sp.bins.size(); ++k) {
    if (k == k1) continue;
    const double f = sp.bins[k].frequency;
    if (f < f_lo || f > f_hi) continue;
    sum += sp.bins[k].magnitude * sp.bins[k].magnitude;
  }
  return std::sqrt(sum) / fundamental;
}

inline double thd(const Spectrum& sp, double f1) {
  return thd_band(sp, f1, 0.0, std::numeric_limits<double>::infinity());
}

// k largest bins at or above exclude_below, by magnitude then frequency.
inline std::vector<SpectralBin> dominant_components(const Spectrum& sp, std::size_t k,
                                                    double exclude_below) {
  std::vector<SpectralBin> candidates;
  for (const auto& b : sp.bins) {
    if (b.frequency >= exclude_below) candidates.push_back(b);
  }
  const std::size_t take = std::min(k, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                    candidates.end(), [](const SpectralBin& x, const SpectralBin& y) {
                      if (x.magnitude != y.magnitude) return x.magnitude > y.magnitude;
                      return x.frequency < y.frequency;
                    });
  candidates.resize(take);
  return candidates;
}

// Same as dominant_components but also skipping DC and the f1 bin.
inline std::vector<SpectralBin> dominant_harmonics(const Spectrum& sp, std::size_t k, double f1) {
  Spectrum rest = sp;
  const std::size_t k1 = sp.index_of(f1);
  rest.bins.clear();
  for (std::size_t i = 1; i < sp.bins.size(); ++i) {
    if (i != k1) rest.bins.push_back(sp.bins[i]);
  }
  return dominant_components(rest, k, 0.0);
}

// Peak-to-peak of the signal after removing its f1 component, over the
// leading whole cycles of f1.
inline double ripple_pp(const Waveform& w, double f1) {
  const Waveform win = trim_to_cycles(w, f1);
  const std::size_t n = win.samples.size();
  const double step = two_pi * f1 / win.sample_rate;
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a += win.samples[i] * std::cos(step * i);
    b += win.samples[i] * std::sin(step * i);
  }
  a *= 2.0 / n;
  b *= 2.0 / n;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = win.samples[i] - a * std::cos(step * i) - b * std::sin(step * i);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  return hi - lo;
}

// 17 significant digits round-trips a double exactly.
inline std::string format_number(double v, int digits = 17) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

inline void write_spectrum_csv(const std::string& path, const Spectrum& sp) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os << "frequency_hz,magnitude\n";
  for (const auto& b : sp.bins) {
    os << format_number(b.frequency) << ',' << format_number(b.magnitude) << '\n';
  }
  if (!os) throw IoError("write failed: " + path);
}

inline Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(is, line) || line != "frequency_hz,magnitude") {
    throw IoError(path + ": missing spectrum header");
  }
  Spectrum sp;
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path + ": malformed row " + std::to_string(row));
    try {
      sp.bins.push_back({std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
    } catch (const std::exception&) {
      throw IoError(path + ": malformed number on row " + std::to_string(row));
    }
  }
  if (sp.bins.size() >= 2) sp.resolution = sp.bins[1].frequency - sp.bins[0].frequency;
  return sp;
}

}  // namespace svdrive
