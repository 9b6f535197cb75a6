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

#ifndef HAPNAV_DSP_LOUDNESS_HPP
#define HAPNAV_DSP_LOUDNESS_HPP

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hapnav/dsp/audio_buffer.hpp"

namespace hapnav::dsp {

/// Direct-form I biquad, a0 normalized to 1.
struct Biquad {
  std::array<double, 3> b{1.0, 0.0, 0.0};
  std::array<double, 3> a{1.0, 0.0, 0.0};
};

/// The two K-weighting stages (high shelf, then RLB high pass) designed for
/// an arbitrary sample rate from their analog prototypes.
inline std::array<Biquad, 2> k_weighting(double sample_rate) {
  if (!(sample_rate > 0.0)) throw std::domain_error("k_weighting: bad sample rate");
  std::array<Biquad, 2> f;
  {
    const double f0 = 1681.974450955533;
    const double gain_db = 3.999843853973347;
    const double q = 0.7071752369554196;
    const double k = std::tan(std::numbers::pi * f0 / sample_rate);
    const double vh = std::pow(10.0, gain_db / 20.0);
    const double vb = std::pow(vh, 0.4996667741545416);
    const double a0 = 1.0 + k / q + k * k;
    f[0].b = {(vh + vb * k / q + k * k) / a0, 2.0 * (k * k - vh) / a0,
              (vh - vb * k / q + k * k) / a0};
    f[0].a = {1.0, 2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0};
  }
  {
    const double f0 = 38.13547087602444;
    const double q = 0.5003270373238773;
    const double k = std::tan(std::numbers::pi * f0 / sample_rate);
    const double a0 = 1.0 + k / q + k * k;
    f[1].b = {1.0, -2.0, 1.0};
    f[1].a = {1.0, 2.0 * (k * k - 1.0) / a0, (1.0 - k / q + k * k) / a0};
  }
  return f;
}

inline constexpr double kAbsoluteGate = -70.0;
inline constexpr double kRelativeGate = -10.0;

inline double energy_to_lufs(double e) { return -0.691 + 10.0 * std::log10(e); }

/// Streaming gated loudness meter: 400 ms blocks with 75 % overlap, absolute
/// gate at -70 LUFS then a relative gate 10 LU below the absolute-gated mean.
/// All channels weighted 1.0. Single owner; not thread safe.
class LoudnessMeter {
 public:
  LoudnessMeter(double sample_rate, int channels)
      : channels_(channels),
        hop_(static_cast<std::size_t>(std::lround(sample_rate * 0.1))),
        filters_(k_weighting(sample_rate)),
        state_(static_cast<std::size_t>(channels)) {
    if (channels < 1) throw std::domain_error("LoudnessMeter: channels must be >= 1");
    if (hop_ == 0) throw std::domain_error("LoudnessMeter: sample rate too low");
  }

  /// Feeds interleaved frames.
  void push(std::span<const float> interleaved) {
    const auto ch = static_cast<std::size_t>(channels_);
    for (std::size_t i = 0; i + ch <= interleaved.size(); i += ch) {
      double sum = 0.0;
      for (std::size_t c = 0; c < ch; ++c) {
        const double y = filter(state_[c], interleaved[i + c]);
        sum += y * y;
      }
      hop_energy_ += sum;
      if (++hop_fill_ == hop_) {
        hops_.push_back(hop_energy_);
        hop_energy_ = 0.0;
        hop_fill_ = 0;
        if (hops_.size() >= 4) {
          const std::size_t j = hops_.size() - 4;
          const double e = (hops_[j] + hops_[j + 1] + hops_[j + 2] + hops_[j + 3]) /
                           static_cast<double>(4 * hop_);
          blocks_.push_back(e);
        }
      }
    }
  }

  std::size_t block_count() const { return blocks_.size(); }

  /// Mean-square energy per 400 ms block, K-weighted and channel-summed.
  const std::vector<double>& block_energies() const { return blocks_; }

  /// Integrated loudness, or nullopt when every block falls below the gates.
  std::optional<double> integrated() const {
    const double abs_energy = std::pow(10.0, (kAbsoluteGate + 0.691) / 10.0);
    double sum = 0.0;
    std::size_t count = 0;
    for (double e : blocks_) {
      if (e > abs_energy) {
        sum += e;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    const double rel_lufs = energy_to_lufs(sum / static_cast<double>(count)) + kRelativeGate;
    const double rel_energy = std::pow(10.0, (rel_lufs + 0.691) / 10.0);
    sum = 0.0;
    count = 0;
    for (double e : blocks_) {
      if (e > abs_energy && e > rel_energy) {
        sum += e;
        ++count;
      }
    }
    if (count == 0) return std::nullopt;
    return energy_to_lufs(sum / static_cast<double>(count));
  }

 private:
  struct ChannelState {
    std::array<double, 2> x1{}, y1{}, y2{};
    // stage-1 output history doubles as stage-2 input history
    std::array<double, 2> x2{};
  };

  double filter(ChannelState& s, double x) {
    const auto& f1 = filters_[0];
    const auto& f2 = filters_[1];
    const double y = f1.b[0] * x + f1.b[1] * s.x1[0] + f1.b[2] * s.x1[1] - f1.a[1] * s.y1[0] -
                     f1.a[2] * s.y1[1];
    s.x1 = {x, s.x1[0]};
    s.y1 = {y, s.y1[0]};
    const double z = f2.b[0] * y + f2.b[1] * s.x2[0] + f2.b[2] * s.x2[1] - f2.a[1] * s.y2[0] -
                     f2.a[2] * s.y2[1];
    s.x2 = {y, s.x2[0]};
    s.y2 = {z, s.y2[0]};
    return z;
  }

  int channels_;
  std::size_t hop_;
  std::array<Biquad, 2> filters_;
  std::vector<ChannelState> state_;
  double hop_energy_ = 0.0;
  std::size_t hop_fill_ = 0;
  std::vector<double> hops_;
  std::vector<double> blocks_;
};

/// Integrated loudness of a whole buffer. nullopt means below the gate
/// (e.g. digital silence). Requires at least one 400 ms block.
inline std::optional<double> integrated_loudness(const AudioBuffer& track) {
  if (track.duration() < 0.4) {
    throw std::domain_error("integrated_loudness: need at least 0.4 s of audio");
  }
  LoudnessMeter meter(track.sample_rate, track.channels);
  meter.push(track.samples);
  return meter.integrated();
}

class CannotNormalize : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NormalizeResult {
  AudioBuffer track;
  double gain = 1.0;
  double input_lufs = 0.0;
  double output_lufs = 0.0;
};

inline constexpr double kDefaultTargetLufs = -14.0;

/// Applies one scalar gain so the track measures `target_lufs`.
inline NormalizeResult normalize_loudness(const AudioBuffer& track,
                                          double target_lufs = kDefaultTargetLufs) {
  const auto in = integrated_loudness(track);
  if (!in) throw CannotNormalize("normalize_loudness: input is below the loudness gate");
  NormalizeResult res;
  res.input_lufs = *in;
  res.gain = std::pow(10.0, (target_lufs - *in) / 20.0);
  res.track = track;
  res.track.scale(res.gain);
  const auto out = integrated_loudness(res.track);
  res.output_lufs = out.value_or(-HUGE_VAL);
  return res;
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_LOUDNESS_HPP
