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

#ifndef HAPNAV_DSP_GAIN_HPP
#define HAPNAV_DSP_GAIN_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>

#include "hapnav/modulation.hpp"

namespace hapnav::dsp {

struct StereoFrame {
  double left = 0.0;
  double right = 0.0;

  friend bool operator==(const StereoFrame&, const StereoFrame&) = default;
};

inline StereoFrame apply_gains(StereoFrame frame, const GainPair& g) {
  return {frame.left * g.left, frame.right * g.right};
}

/// In-place gain over an interleaved stereo buffer.
inline void apply_gains(std::span<float> interleaved, const GainPair& g) {
  const auto gl = static_cast<float>(g.left);
  const auto gr = static_cast<float>(g.right);
  for (std::size_t i = 0; i + 1 < interleaved.size(); i += 2) {
    interleaved[i] *= gl;
    interleaved[i + 1] *= gr;
  }
}

/// Constant-power pan weights for a wrapped azimuth. Rear angles reuse the
/// pan of their front reflection, so 135 deg pans like 45 deg.
inline GainPair pan_weights(double theta) {
  double front = theta;
  if (front > 90.0) front = 180.0 - front;
  if (front < -90.0) front = -180.0 - front;
  front = std::clamp(front, -90.0, 90.0);
  // phi runs from 0 (hard left, +90) to pi/2 (hard right, -90)
  const double phi = (90.0 - front) * (std::numbers::pi / 360.0);
  return {std::cos(phi), std::sin(phi)};
}

/// Simplified vocal localization: mono vox panned toward the target.
inline StereoFrame spatialize_vox(double vox, double theta) {
  const auto w = pan_weights(theta);
  return {vox * w.left, vox * w.right};
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_GAIN_HPP
