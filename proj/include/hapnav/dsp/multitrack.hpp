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

#ifndef HAPNAV_DSP_MULTITRACK_HPP
#define HAPNAV_DSP_MULTITRACK_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "hapnav/dsp/audio_buffer.hpp"
#include "hapnav/dsp/loudness.hpp"
#include "hapnav/rng.hpp"

namespace hapnav::dsp {

enum class Group { Vox, Inst, Mix };

inline std::string_view to_string(Group g) {
  switch (g) {
    case Group::Vox: return "Vox";
    case Group::Inst: return "Inst";
    case Group::Mix: return "Mix";
  }
  return "?";
}

/// Stereo stimulus split into a vocal group and an instrumental group, plus
/// their sum.
class MultiTrack {
 public:
  MultiTrack() = default;

  MultiTrack(AudioBuffer vox, AudioBuffer inst) : vox_(std::move(vox)), inst_(std::move(inst)) {
    if (vox_.channels != 2 || inst_.channels != 2) {
      throw std::domain_error("MultiTrack: groups must be stereo");
    }
    if (vox_.sample_rate != inst_.sample_rate) {
      throw std::domain_error("MultiTrack: sample rates differ");
    }
    if (vox_.frames() != inst_.frames()) throw std::domain_error("MultiTrack: lengths differ");
    remix();
  }

  double sample_rate() const { return vox_.sample_rate; }
  std::size_t frames() const { return vox_.frames(); }

  const AudioBuffer& group(Group g) const {
    switch (g) {
      case Group::Vox: return vox_;
      case Group::Inst: return inst_;
      case Group::Mix: return mix_;
    }
    return mix_;
  }

  /// Scales one source group and rebuilds the mix.
  void scale_group(Group g, double gain) {
    if (g == Group::Mix) throw std::domain_error("MultiTrack: scale a source group, not Mix");
    (g == Group::Vox ? vox_ : inst_).scale(gain);
    remix();
  }

 private:
  void remix() {
    mix_ = AudioBuffer(vox_.sample_rate, 2, vox_.frames());
    for (std::size_t i = 0; i < mix_.samples.size(); ++i) {
      mix_.samples[i] = vox_.samples[i] + inst_.samples[i];
    }
  }

  AudioBuffer vox_, inst_, mix_;
};

struct SynthParams {
  double sample_rate = 48000.0;
  double duration_s = 8.0;
  double bpm = 120.0;
  std::uint64_t seed = 1;
  // per-part loudness before grouping; nullopt leaves the raw level
  std::optional<double> drum_lufs = -18.9;
  std::optional<double> bass_lufs = -18.4;
  std::optional<double> vox_lufs = -16.0;
};

namespace detail {

inline void set_loudness(AudioBuffer& buf, std::optional<double> lufs) {
  if (!lufs) return;
  const auto l = integrated_loudness(buf);
  if (l) buf.scale(std::pow(10.0, (*lufs - *l) / 20.0));
}

}  // namespace detail

/// Synthetic stimulus: kick drum on every beat, an eighth-note bass line and
/// a vibrato vocal-band melody.
inline MultiTrack synthesize_multitrack(const SynthParams& p) {
  if (!(p.sample_rate > 0.0) || !(p.duration_s >= 0.4) || !(p.bpm > 0.0)) {
    throw std::domain_error("synthesize_multitrack: invalid parameters");
  }
  const auto frames = static_cast<std::size_t>(std::lround(p.sample_rate * p.duration_s));
  const double beat = 60.0 / p.bpm;
  const double two_pi = 2.0 * std::numbers::pi;
  Rng rng(mix_seed(p.seed));

  AudioBuffer drum(p.sample_rate, 2, frames);
  double phase = 0.0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    const double tb = std::fmod(t, beat);
    const double f = 45.0 + 70.0 * std::exp(-tb / 0.03);
    phase += two_pi * f / p.sample_rate;
    const float v = static_cast<float>(0.8 * std::exp(-tb / 0.12) * std::sin(phase));
    drum.at(i, 0) = v;
    drum.at(i, 1) = v;
  }

  // bass: root notes of a i-VI-III-VII progression in eighths
  constexpr std::array<double, 4> roots{55.0, 43.65, 65.41, 49.0};
  AudioBuffer bass(p.sample_rate, 2, frames);
  phase = 0.0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    const auto bar = static_cast<std::size_t>(t / (4.0 * beat));
    const double te = std::fmod(t, beat / 2.0);
    phase += two_pi * roots[bar % roots.size()] / p.sample_rate;
    const double tone = std::sin(phase) + 0.3 * std::sin(2.0 * phase) + 0.1 * std::sin(3.0 * phase);
    const float v = static_cast<float>(0.5 * tone * std::exp(-te / 0.25));
    bass.at(i, 0) = v;
    bass.at(i, 1) = v;
  }

  // vox: one pentatonic note per beat with 5 Hz vibrato
  constexpr std::array<double, 5> scale{293.66, 329.63, 392.0, 440.0, 523.25};
  const auto beats = static_cast<std::size_t>(p.duration_s / beat) + 1;
  std::vector<double> melody(beats);
  for (auto& m : melody) m = scale[rng.below(scale.size())];
  AudioBuffer vox(p.sample_rate, 2, frames);
  phase = 0.0;
  for (std::size_t i = 0; i < frames; ++i) {
    const double t = static_cast<double>(i) / p.sample_rate;
    const auto b = static_cast<std::size_t>(t / beat);
    const double tb = std::fmod(t, beat);
    const double f = melody[b] * (1.0 + 0.01 * std::sin(two_pi * 5.0 * t));
    phase += two_pi * f / p.sample_rate;
    const double env = std::min(1.0, tb / 0.02) * std::min(1.0, (beat - tb) / 0.05);
    const float v = static_cast<float>(0.4 * env * (std::sin(phase) + 0.2 * std::sin(2.0 * phase)));
    vox.at(i, 0) = v;
    vox.at(i, 1) = v;
  }

  detail::set_loudness(drum, p.drum_lufs);
  detail::set_loudness(bass, p.bass_lufs);
  detail::set_loudness(vox, p.vox_lufs);
  AudioBuffer inst(p.sample_rate, 2, frames);
  for (std::size_t i = 0; i < inst.samples.size(); ++i) {
    inst.samples[i] = drum.samples[i] + bass.samples[i];
  }
  return MultiTrack(std::move(vox), std::move(inst));
}

/// Normalizes Vox and Inst independently to `target_lufs` and rebuilds Mix.
inline MultiTrack normalize_groups(MultiTrack mt, double target_lufs = kDefaultTargetLufs) {
  for (auto g : {Group::Vox, Group::Inst}) {
    const auto l = integrated_loudness(mt.group(g));
    if (!l) throw CannotNormalize("normalize_groups: group below the loudness gate");
    mt.scale_group(g, std::pow(10.0, (target_lufs - *l) / 20.0));
  }
  return mt;
}

}  // namespace hapnav::dsp

#endif  // HAPNAV_DSP_MULTITRACK_HPP
