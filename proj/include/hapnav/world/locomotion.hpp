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

#ifndef HAPNAV_WORLD_LOCOMOTION_HPP
#define HAPNAV_WORLD_LOCOMOTION_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "hapnav/modulation.hpp"
#include "hapnav/world/world_spec.hpp"

namespace hapnav::world {

inline constexpr double kStepLength = 1.17;   // m
inline constexpr double kStepDuration = 0.7;  // s
inline constexpr double kWalkSpeed = kStepLength / kStepDuration;
inline constexpr double kStepThreshold = 0.10;  // m above standing height

struct StepEvent {
  double time = 0.0;  // s, when the foot came back down

  friend bool operator==(const StepEvent&, const StepEvent&) = default;
};

/// Counts rise-and-fall excursions of a controller height trace above
/// baseline + threshold. Sample i is taken at i * dt.
inline std::vector<StepEvent> detect_steps(std::span<const double> heights, double baseline,
                                           double dt, double threshold = kStepThreshold) {
  if (!std::isfinite(baseline)) throw std::domain_error("detect_steps: baseline must be finite");
  if (!(dt > 0.0)) throw std::domain_error("detect_steps: dt must be > 0");
  const double level = baseline + threshold;
  std::vector<StepEvent> out;
  bool raised = false;
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (!raised && heights[i] > level) {
      raised = true;
    } else if (raised && heights[i] < level) {
      raised = false;
      out.push_back({static_cast<double>(i) * dt});
    }
  }
  return out;
}

/// Longest distance in [0, want] the avatar disc can move from `pose`
/// along its heading without touching an obstacle. Assumes the start is
/// free and want is smaller than the avatar diameter plus one cell, so the
/// free set along the ray is an interval starting at 0.
inline double free_travel(const WorldSpec& w, const Pose& pose, double want) {
  if (want <= 0.0) return 0.0;
  const double ux = std::cos(pose.heading * kDegToRad);
  const double uy = std::sin(pose.heading * kDegToRad);
  auto ok = [&](double d) { return w.disc_is_free(pose.x + ux * d, pose.y + uy * d, w.avatar_radius); };
  if (ok(want)) return want;
  double lo = 0.0, hi = want;
  for (int i = 0; i < 64 && hi - lo > 1e-13; ++i) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Queue of forward distance still to walk. Steps add 1.17 m; the queue
/// drains at walking speed along whatever heading is current at each tick.
class StepQueue {
 public:
  void add_step() { remaining_ += kStepLength; }
  void clear() { remaining_ = 0.0; }
  double remaining() const { return remaining_; }
  bool idle() const { return remaining_ <= 0.0; }

  /// Moves the pose for one tick. Returns the distance actually covered.
  /// A wall clamp drops whatever remains queued.
  double advance(const WorldSpec& w, Pose& pose, double dt) {
    if (remaining_ <= 0.0) return 0.0;
    double want = kWalkSpeed * dt;
    // absorb float residue so a step ends on the tick that nominally completes it
    if (remaining_ - want < 1e-9) want = remaining_;
    const double got = free_travel(w, pose, want);
    pose.x += std::cos(pose.heading * kDegToRad) * got;
    pose.y += std::sin(pose.heading * kDegToRad) * got;
    remaining_ = got < want ? 0.0 : remaining_ - want;
    return got;
  }

 private:
  double remaining_ = 0.0;
};

}  // namespace hapnav::world

#endif  // HAPNAV_WORLD_LOCOMOTION_HPP
