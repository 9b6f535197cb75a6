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

#ifndef HAPNAV_DSP_RENDERER_HPP
#define HAPNAV_DSP_RENDERER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <vector>

#include "hapnav/condition.hpp"
#include "hapnav/dsp/gain.hpp"
#include "hapnav/dsp/multitrack.hpp"

namespace hapnav::dsp {

/// Running output levels, reset by the caller.
struct RenderMeter {
  double haptic_energy_l = 0.0;
  double haptic_energy_r = 0.0;
  double audio_energy_l = 0.0;
  double audio_energy_r = 0.0;
  std::size_t frames = 0;
};

/// Block renderer for the haptic and headphone streams. The stimulus loops.
/// Gains are held constant for a whole render call (one simulator tick).
class StimulusRenderer {
 public:
  explicit StimulusRenderer(std::shared_ptr<const MultiTrack> source, std::size_t block = 512)
      : source_(std::move(source)), block_(block), haptic_(2 * block), audio_(2 * block) {
    if (!source_ || source_->frames() == 0) throw std::domain_error("StimulusRenderer: empty source");
    if (block_ == 0) throw std::domain_error("StimulusRenderer: block size must be > 0");
  }

  double sample_rate() const { return source_->sample_rate(); }
  std::size_t block_size() const { return block_; }

  /// Renders `frames` frames for one tick. `vox_theta` steers the vocal pan
  /// in the audio-guided conditions.
  void render(std::size_t frames, Condition cond, const GainPair& haptic_gains, double vox_theta,
              RenderMeter& meter) {
    const auto& mix = source_->group(Group::Mix).samples;
    const auto& vox = source_->group(Group::Vox).samples;
    const auto& inst = source_->group(Group::Inst).samples;
    const std::size_t total = source_->frames();
    const bool pan_vox = !is_haptic_guided(cond);
    const auto pan = pan_weights(vox_theta);
    const auto pl = static_cast<float>(pan.left), pr = static_cast<float>(pan.right);

    while (frames > 0) {
      const std::size_t n = std::min(frames, block_);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = 2 * cursor_;
        haptic_[2 * i] = mix[s];
        haptic_[2 * i + 1] = mix[s + 1];
        if (pan_vox) {
          const float mono = 0.5f * (vox[s] + vox[s + 1]);
          audio_[2 * i] = inst[s] + mono * pl;
          audio_[2 * i + 1] = inst[s + 1] + mono * pr;
        } else {
          audio_[2 * i] = mix[s];
          audio_[2 * i + 1] = mix[s + 1];
        }
        if (++cursor_ == total) cursor_ = 0;
      }
      apply_gains(std::span<float>(haptic_.data(), 2 * n), haptic_gains);
      double hl = 0.0, hr = 0.0, al = 0.0, ar = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        hl += static_cast<double>(haptic_[2 * i]) * haptic_[2 * i];
        hr += static_cast<double>(haptic_[2 * i + 1]) * haptic_[2 * i + 1];
        al += static_cast<double>(audio_[2 * i]) * audio_[2 * i];
        ar += static_cast<double>(audio_[2 * i + 1]) * audio_[2 * i + 1];
      }
      meter.haptic_energy_l += hl;
      meter.haptic_energy_r += hr;
      meter.audio_energy_l += al;
      meter.audio_energy_r += ar;
      meter.frames += n;
      frames -= n;
    }
  }

  /// Most recent block of haptic output (interleaved).
  const std::vector<float>& last_haptic_block() const { return haptic_; }

 private:
  std::shared_ptr<const MultiTrack> source_;
  std::size_t block_;
  std::size_t cursor_ = 0;
  std::vector<float> haptic_;
  std::vector<float> audio_;
};

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_RENDERER_HPP
