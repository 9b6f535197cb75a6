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

#ifndef HAPNAV_DSP_AUDIO_BUFFER_HPP
#define HAPNAV_DSP_AUDIO_BUFFER_HPP

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace hapnav::dsp {

/// Interleaved floating-point audio.
struct AudioBuffer {
  double sample_rate = 48000.0;
  int channels = 2;
  std::vector<float> samples;

  AudioBuffer() = default;
  AudioBuffer(double rate, int ch, std::size_t frames)
      : sample_rate(rate), channels(ch), samples(frames * static_cast<std::size_t>(ch), 0.0f) {
    if (ch < 1) throw std::domain_error("AudioBuffer: channels must be >= 1");
  }

  std::size_t frames() const {
    return channels > 0 ? samples.size() / static_cast<std::size_t>(channels) : 0;
  }
  double duration() const { return static_cast<double>(frames()) / sample_rate; }

  float& at(std::size_t frame, int ch) {
    return samples[frame * static_cast<std::size_t>(channels) + static_cast<std::size_t>(ch)];
  }
  float at(std::size_t frame, int ch) const {
    return samples[frame * static_cast<std::size_t>(channels) + static_cast<std::size_t>(ch)];
  }

  void scale(double gain) {
    for (auto& s : samples) s = static_cast<float>(s * gain);
  }

  /// One channel copied out as doubles.
  std::vector<double> channel(int ch) const {
    std::vector<double> out(frames());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i, ch);
    return out;
  }
};

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_AUDIO_BUFFER_HPP
