#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <vector>

#include "svdrive/analysis.hpp"

using namespace svdrive;

namespace {

template <typename F>
Waveform synth(F f, double fs, double duration, double t0 = 0.0) {
  Waveform w;
  w.sample_rate = fs;
  w.start_time = t0;
  const auto n = static_cast<std::size_t>(std::llround(duration * fs));
  for (std::size_t k = 0; k < n; ++k) w.samples.push_back(f(t0 + k / fs));
  return w;
}

// Direct O(N^2) DFT, single-sided amplitude normalisation.
std::vector<double> naive_amplitudes(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> out(n / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::complex<double> acc;
    for (std::size_t i = 0; i < n; ++i) {
      acc += x[i] * std::polar(1.0, -two_pi * static_cast<double>(k * i % n) / n);
    }
    const bool edge = k == 0 || (n % 2 == 0 && k == n / 2);
    out[k] = (edge ? 1.0 : 2.0) * std::abs(acc) / n;
  }
  return out;
}

}  // namespace

TEST(spectrum, unit_sinusoid) {
  const Waveform w = synth([](double t) { return std::cos(two_pi * 60.0 * t + 0.3); }, 10000.0, 0.5);
  const Spectrum sp = spectrum(w, 60.0);
  EXPECT_NEAR(sp.resolution, 2.0, 1e-12);
  EXPECT_NEAR(sp.magnitude_at(60.0), 1.0, 1e-6);
  const auto top = dominant_components(sp, 2, 0.0);
  EXPECT_DOUBLE_EQ(top[0].frequency, 60.0);
  EXPECT_LT(top[1].magnitude, 1e-9);
  EXPECT_DOUBLE_EQ(sp.bins.back().frequency, 5000.0);
}

TEST(spectrum, constant_signal) {
  const Waveform w = synth([](double) { return 3.5; }, 1000.0, 0.1);
  const Spectrum sp = spectrum(w, 60.0);
  EXPECT_NEAR(sp.bins[0].magnitude, 3.5, 1e-12);
  EXPECT_EQ(sp.bins[0].frequency, 0.0);
}

TEST(spectrum, two_tones) {
  const Waveform w = synth(
      [](double t) { return std::sin(two_pi * 60.0 * t) + 0.2 * std::cos(two_pi * 940.0 * t); },
      20000.0, 0.5);
  const Spectrum sp = spectrum(w, 60.0);
  EXPECT_NEAR(sp.magnitude_at(60.0), 1.0, 1e-6);
  EXPECT_NEAR(sp.magnitude_at(940.0), 0.2, 1e-6);
  const auto top = dominant_components(sp, 2, 0.0);
  ASSERT_EQ(top.size(), 2u);
  EXPECT_DOUBLE_EQ(top[0].frequency, 60.0);
  EXPECT_DOUBLE_EQ(top[1].frequency, 940.0);
  EXPECT_NEAR(thd(sp, 60.0), 0.2, 1e-6);
}

TEST(spectrum, agrees_with_direct_dft) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  Waveform w;
  w.sample_rate = 6000.0;  // 100 samples per 60 Hz cycle
  for (int i = 0; i < 700; ++i) w.samples.push_back(g(rng));
  const Spectrum sp = spectrum(w, 60.0);
  const auto ref = naive_amplitudes(w.samples);
  ASSERT_EQ(sp.bins.size(), ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) EXPECT_NEAR(sp.bins[k].magnitude, ref[k], 1e-12);
}

TEST(spectrum, trims_to_whole_cycles) {
  // 2.5 cycles of 60 Hz: only the first two are analysed.
  const Waveform w = synth([](double t) { return std::sin(two_pi * 60.0 * t); }, 6000.0, 2.5 / 60.0);
  const Spectrum sp = spectrum(w, 60.0);
  EXPECT_NEAR(sp.resolution, 30.0, 1e-9);
  EXPECT_NEAR(sp.magnitude_at(60.0), 1.0, 1e-9);
}

TEST(spectrum, rejects_short_window) {
  const Waveform w = synth([](double t) { return t; }, 1000.0, 0.01);
  EXPECT_THROW(spectrum(w, 60.0), InvalidWindow);
  EXPECT_THROW(spectrum(Waveform{{1.0}, 1000.0, 0.0}, 60.0), InvalidWindow);
}

TEST(spectrum, parseval_property) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> amp(0.0, 2.0), ph(0.0, two_pi);
  for (int trial = 0; trial < 20; ++trial) {
    const double dc = amp(rng);
    std::vector<std::pair<double, double>> tones;
    for (int i = 0; i < 6; ++i) tones.push_back({amp(rng), ph(rng)});
    const Waveform w = synth(
        [&](double t) {
          double v = dc;
          for (std::size_t i = 0; i < tones.size(); ++i) {
            v += tones[i].first * std::cos(two_pi * 60.0 * (i + 1) * 3 * t + tones[i].second);
          }
          return v;
        },
        12000.0, 0.25);
    const Spectrum sp = spectrum(w, 60.0);
    double ms = 0.0;
    for (double x : w.samples) ms += x * x;
    ms /= static_cast<double>(w.samples.size());
    double from_bins = sp.bins[0].magnitude * sp.bins[0].magnitude;
    for (std::size_t k = 1; k < sp.bins.size(); ++k) from_bins += sp.bins[k].magnitude * sp.bins[k].magnitude / 2.0;
    EXPECT_NEAR(from_bins, ms, 1e-3 * ms);
  }
}

TEST(spectrum, linearity_property) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  Waveform w;
  w.sample_rate = 3000.0;
  for (int i = 0; i < 600; ++i) w.samples.push_back(g(rng));
  Waveform scaled = w;
  for (double& x : scaled.samples) x *= -2.5;
  const Spectrum a = spectrum(w, 60.0), b = spectrum(scaled, 60.0);
  for (std::size_t k = 0; k < a.bins.size(); ++k) {
    EXPECT_NEAR(b.bins[k].magnitude, 2.5 * a.bins[k].magnitude, 1e-12);
  }
}

TEST(thd, pure_sinusoid) {
  const Waveform w = synth([](double t) { return 2.0 * std::sin(two_pi * 60.0 * t); }, 10000.0, 0.5);
  EXPECT_NEAR(thd(spectrum(w, 60.0), 60.0), 0.0, 1e-6);
}

TEST(thd, square_wave) {
  // Half-sample offset keeps samples off the zero crossings.
  const double fs = 60.0 * 2000.0;
  const Waveform w = synth(
      [&](double t) { return std::sin(two_pi * 60.0 * (t + 0.5 / fs)) >= 0.0 ? 1.0 : -1.0; }, fs, 0.5);
  const double expected = std::sqrt(pi * pi / 8.0 - 1.0);
  EXPECT_NEAR(expected, 0.4834, 1e-4);
  EXPECT_NEAR(thd(spectrum(w, 60.0), 60.0), expected, 1e-3);
}

TEST(thd, zero_fundamental) {
  const Waveform w = synth([](double t) { return std::sin(two_pi * 120.0 * t); }, 6000.0, 0.1);
  EXPECT_THROW(thd(spectrum(w, 60.0), 60.0), UndefinedThd);
}

TEST(thd, band_limited) {
  const Waveform w = synth(
      [](double t) {
        return std::sin(two_pi * 60.0 * t) + 0.3 * std::sin(two_pi * 300.0 * t) +
               0.4 * std::sin(two_pi * 3000.0 * t);
      },
      12000.0, 0.5);
  const Spectrum sp = spectrum(w, 60.0);
  EXPECT_NEAR(thd_band(sp, 60.0, 0.0, 1000.0), 0.3, 1e-6);
  EXPECT_NEAR(thd(sp, 60.0), 0.5, 1e-6);
}

TEST(dominant_components, clamps_and_filters) {
  Spectrum sp;
  sp.resolution = 10.0;
  sp.bins = {{0.0, 5.0}, {10.0, 1.0}, {20.0, 3.0}, {30.0, 3.0}};
  const auto all = dominant_components(sp, 10, 0.0);
  ASSERT_EQ(all.size(), 4u);
  const auto above = dominant_components(sp, 10, 15.0);
  ASSERT_EQ(above.size(), 2u);
  // Equal magnitudes: lower frequency first.
  EXPECT_EQ(above[0].frequency, 20.0);
  EXPECT_EQ(above[1].frequency, 30.0);
  const auto harmonics = dominant_harmonics(sp, 10, 10.0);
  ASSERT_EQ(harmonics.size(), 2u);
  EXPECT_EQ(harmonics[0].frequency, 20.0);
}

TEST(ripple_pp, pure_sinusoid) {
  const Waveform w = synth([](double t) { return 50.0 * std::cos(two_pi * 60.0 * t - 1.0); }, 20000.0, 0.5);
  EXPECT_LT(ripple_pp(w, 60.0), 1e-9);
}

TEST(ripple_pp, triangle_ripple) {
  const double r = 3.0;
  auto tri = [&](double t) {
    const double ph = std::fmod(t * 1000.0, 1.0);
    return r * (ph < 0.5 ? 2.0 * ph : 2.0 - 2.0 * ph) - r / 2.0;
  };
  const Waveform w = synth([&](double t) { return 40.0 * std::sin(two_pi * 60.0 * t) + tri(t); }, 100000.0, 0.5);
  EXPECT_NEAR(ripple_pp(w, 60.0), r, 0.02 * r);
}

TEST(ripple_pp, rejects_short_window) {
  const Waveform w = synth([](double t) { return t; }, 1000.0, 0.005);
  EXPECT_THROW(ripple_pp(w, 60.0), InvalidWindow);
}

TEST(slice, selects_half_open_interval) {
  const Waveform w = synth([](double t) { return t; }, 10.0, 2.0);
  const Waveform s = slice(w, 0.5, 1.0);
  ASSERT_EQ(s.samples.size(), 5u);
  EXPECT_NEAR(s.start_time, 0.5, 1e-12);
  EXPECT_NEAR(s.samples.front(), 0.5, 1e-12);
}

TEST(spectrum_csv, write_read_roundtrip) {
  const Waveform w = synth(
      [](double t) { return 1.0 / 3.0 + std::sin(two_pi * 60.0 * t) + 0.1 * std::sin(two_pi * 420.0 * t); },
      7000.0, 0.5);
  const Spectrum sp = spectrum(w, 60.0);
  const auto path = std::filesystem::temp_directory_path() / "svdrive_spectrum_roundtrip.csv";
  write_spectrum_csv(path.string(), sp);
  const Spectrum back = read_spectrum_csv(path.string());
  EXPECT_EQ(back.bins, sp.bins);
  std::filesystem::remove(path);
}

TEST(spectrum_csv, io_errors_carry_path) {
  try {
    read_spectrum_csv("/nonexistent/dir/spectrum.csv");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/dir/spectrum.csv"), std::string::npos);
  }
  EXPECT_THROW(write_spectrum_csv("/nonexistent/dir/out.csv", Spectrum{}), IoError);
}
