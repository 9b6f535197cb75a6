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

#ifndef HAPNAV_DSP_VIBRATION_HPP
#define HAPNAV_DSP_VIBRATION_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace hapnav::dsp {

/// Three-axis accelerometer capture, m/s^2.
struct TriaxialRecording {
  double sample_rate = 0.0;
  std::vector<double> x, y, z;
};

/// Population RMS about the mean, 1/N normalization.
inline double centered_rms(std::span<const double> s) {
  if (s.empty()) throw std::domain_error("centered_rms: empty series");
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double acc = 0.0;
  for (double v : s) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(s.size()));
}

/// Transmitted vibration magnitude: sum of the mean-removed per-axis RMS.
inline double acc_rms(const TriaxialRecording& rec) {
  if (!(rec.sample_rate > 0.0)) throw std::domain_error("acc_rms: sample_rate must be > 0");
  if (rec.x.size() != rec.y.size() || rec.x.size() != rec.z.size()) {
    throw std::domain_error("acc_rms: axis lengths differ");
  }
  if (rec.x.size() < 2) throw std::domain_error("acc_rms: need at least two samples");
  return centered_rms(rec.x) + centered_rms(rec.y) + centered_rms(rec.z);
}

struct AttenuationModel {
  double alpha_damp = 0.0;  // 1/(m*Hz)
};

/// Magnitude of exponential shear-wave decay at distance x for frequency f.
/// Phase and velocity dispersion are not modelled.
inline double shear_wave_attenuation(double x, double f, const AttenuationModel& model) {
  if (!(x >= 0.0) || !(f >= 0.0)) {
    throw std::domain_error("shear_wave_attenuation: x and f must be >= 0");
  }
  if (!(model.alpha_damp >= 0.0)) {
    throw std::domain_error("shear_wave_attenuation: alpha_damp must be >= 0");
  }
  return std::exp(-model.alpha_damp * x * f);
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_VIBRATION_HPP
