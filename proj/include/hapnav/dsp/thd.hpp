/*
Copyright 2026 The hapnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef HAPNAV_DSP_THD_HPP
#define HAPNAV_DSP_THD_HPP

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace hapnav::dsp {

/// Raised when a spectrum has no usable fundamental.
class UndefinedResult : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectrumEstimate {
  double fundamental_hz = 0.0;
  double v0 = 0.0;                // RMS of the fundamental
  std::vector<double> harmonics;  // RMS of harmonics 2..n, in order
  double thd = 0.0;
};

namespace detail {

// fftw planning is not thread safe; execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// |X[k]|^2 for k = 0..N/2 of a real sequence.
inline std::vector<double> power_spectrum(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x.begin(), x.end());
  const auto out = std::unique_ptr<fftw_complex[], decltype(&fftw_free)>(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (n / 2 + 1))), &fftw_free);
  if (!out) throw std::bad_alloc();
  fftw_plan plan;
  {
    std::lock_guard lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), out.get(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  std::vector<double> p(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) p[k] = out[k][0] * out[k][0] + out[k][1] * out[k][1];
  return p;
}

}  // namespace detail

/// Harmonic analysis of a periodic signal from one Hann-windowed periodogram.
///
/// The fundamental is the largest spectral peak above DC. Each component's
/// power is summed over the five bins of the Hann main lobe centred on its
/// nominal bin, which removes the scalloping bias a single-bin reading has
/// for tones that fall between bins. Harmonics above Nyquist count as zero.
inline SpectrumEstimate analyze_harmonics(std::span<const double> signal, double sample_rate,
                                          int n_harmonics = 6) {
  if (!(sample_rate > 0.0)) throw std::domain_error("thd: sample_rate must be > 0");
  if (n_harmonics < 2) throw std::domain_error("thd: need at least the 2nd harmonic");
  const std::size_t n = signal.size();
  if (n < 32) throw UndefinedResult("thd: signal too short");

  double mean = 0.0;
  for (double v : signal) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double hann = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                             static_cast<double>(n));
    w[i] = (signal[i] - mean) * hann;
  }
  const auto p = detail::power_spectrum(w);
  const int last = static_cast<int>(p.size()) - 1;

  double total = 0.0;
  int peak = -1;
  for (int k = 2; k <= last; ++k) {
    total += p[k];
    if (peak < 0 || p[k] > p[peak]) peak = k;
  }
  if (peak < 0 || !(p[peak] > 0.0) || p[peak] < 1e-24 * (total + 1e-300) || total < 1e-300) {
    throw UndefinedResult("thd: no detectable fundamental");
  }

  auto lobe = [&](int centre) {
    double s = 0.0;
    for (int k = centre - 2; k <= centre + 2; ++k) {
      if (k >= 1 && k <= last) s += p[k];
    }
    return s;
  };
  // power-weighted centroid refines the fundamental bin
  double num = 0.0, den = 0.0;
  for (int k = peak - 2; k <= peak + 2; ++k) {
    if (k >= 1 && k <= last) {
      num += k * p[k];
      den += p[k];
    }
  }
  const double f0_bin = num / den;
  if (f0_bin < 5.0) throw UndefinedResult("thd: fundamental not resolved, signal too short");

  // Hann main lobe of a unit-amplitude tone carries 3 N^2 / 32 of power.
  const double to_rms = std::sqrt(32.0 / 3.0) / static_cast<double>(n) / std::numbers::sqrt2;

  SpectrumEstimate est;
  est.fundamental_hz = f0_bin * sample_rate / static_cast<double>(n);
  const double p0 = lobe(peak);
  est.v0 = std::sqrt(p0) * to_rms;
  double harm_power = 0.0;
  for (int h = 2; h <= n_harmonics; ++h) {
    const int centre = static_cast<int>(std::lround(h * f0_bin));
    const double ph = centre + 2 <= last ? lobe(centre) : 0.0;
    harm_power += ph;
    est.harmonics.push_back(std::sqrt(ph) * to_rms);
  }
  est.thd = std::sqrt(harm_power / p0);
  return est;
}

inline double thd(std::span<const double> signal, double sample_rate, int n_harmonics = 6) {
  return analyze_harmonics(signal, sample_rate, n_harmonics).thd;
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_THD_HPP
