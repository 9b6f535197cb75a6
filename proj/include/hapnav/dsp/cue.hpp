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

#ifndef HAPNAV_DSP_CUE_HPP
#define HAPNAV_DSP_CUE_HPP

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string_view>

#include "hapnav/condition.hpp"
#include "hapnav/dsp/audio_buffer.hpp"

namespace hapnav::dsp {

enum class CueKind { Vibration, Ping };

inline std::string_view to_string(CueKind k) { return k == CueKind::Vibration ? "vibration" : "ping"; }

struct CueSpec {
  CueKind kind = CueKind::Ping;
  double frequency_hz = 0.0;
  double duration_s = 0.0;
  double amplitude = 1.0;
  double decay_s = 0.0;  // exponential time constant, 0 for a steady tone
};

/// Arrival feedback: haptic conditions get one second of 10 Hz vibration on
/// both sides, audio-guided conditions a short decaying 1 kHz ping.
inline CueSpec arrival_cue(Condition c) {
  if (is_haptic_guided(c)) return {CueKind::Vibration, 10.0, 1.0, 1.0, 0.0};
  return {CueKind::Ping, 1000.0, 0.3, 1.0, 0.06};
}

inline std::size_t cue_length(const CueSpec& cue, double sample_rate) {
  return static_cast<std::size_t>(std::lround(sample_rate * cue.duration_s));
}

/// Renders the cue as identical stereo channels.
inline AudioBuffer render_cue(const CueSpec& cue, double sample_rate) {
  AudioBuffer out(sample_rate, 2, cue_length(cue, sample_rate));
  const double w = 2.0 * std::numbers::pi * cue.frequency_hz / sample_rate;
  for (std::size_t i = 0; i < out.frames(); ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    double v = cue.amplitude * std::sin(w * static_cast<double>(i));
    if (cue.decay_s > 0.0) v *= std::exp(-t / cue.decay_s);
    out.at(i, 0) = static_cast<float>(v);
    out.at(i, 1) = static_cast<float>(v);
  }
  return out;
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_CUE_HPP
