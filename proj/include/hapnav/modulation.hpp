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

#ifndef HAPNAV_MODULATION_HPP
#define HAPNAV_MODULATION_HPP

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hapnav {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Wraps an angle in degrees onto the half-open interval (-180, 180].
inline double wrap_angle(double deg) {
  if (!std::isfinite(deg)) {
    throw std::domain_error("wrap_angle: non-finite angle");
  }
  double r = std::fmod(deg, 360.0);
  if (r <= -180.0) r += 360.0;
  if (r > 180.0) r -= 360.0;
  return r;
}

/// Target position relative to the user. Positive theta is to the user's left.
struct PolarTarget {
  double r = 0.0;      // meters
  double theta = 0.0;  // degrees, (-180, 180]

  friend bool operator==(const PolarTarget&, const PolarTarget&) = default;
};

/// World-frame avatar state. Heading 0 faces +x, 90 faces +y (counter-clockwise).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  friend bool operator==(const Pose&, const Pose&) = default;
};

struct ModulationConfig {
  double c_max = 1.0;
  double c_min = 0.2;
  double alpha = 0.1;  // 1/m
  bool distance_enabled = true;

  void validate() const {
    if (!(c_max > 0.0) || !std::isfinite(c_max)) {
      throw std::domain_error("ModulationConfig: c_max must be > 0");
    }
    if (!(c_min >= 0.0) || c_min > c_max) {
      throw std::domain_error("ModulationConfig: require 0 <= c_min <= c_max");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw std::domain_error("ModulationConfig: alpha must be > 0");
    }
  }

  /// Distance at which the gain floor c_min/c_max is reached.
  double floor_distance() const { return (1.0 - c_min / c_max) / alpha; }

  friend bool operator==(const ModulationConfig&, const ModulationConfig&) = default;
};

struct GainPair {
  double left = 0.0;
  double right = 0.0;

  friend bool operator==(const GainPair&, const GainPair&) = default;
};

struct DirectionGains {
  double left = 0.0;
  double right = 0.0;
};

/// Stereo balance for an azimuth. Saturates to one side outside [-90, 90];
/// at exactly 180 the printed piecewise law gives (1, 0).
inline DirectionGains direction_gains(double theta) {
  if (!(theta > -180.0 && theta <= 180.0)) {
    throw std::domain_error("direction_gains: theta outside (-180, 180]: " +
                            std::to_string(theta));
  }
  if (theta >= 90.0) return {1.0, 0.0};
  if (theta <= -90.0) return {0.0, 1.0};
  const double left = (90.0 + theta) / 180.0;
  return {left, 1.0 - left};
}

/// Total amplitude factor A(r): linear decay with slope alpha, held at the
/// floor c_min/c_max once reached. Identity when distance modulation is off.
inline double distance_gain(double r, const ModulationConfig& cfg) {
  if (!(r >= 0.0)) {
    throw std::domain_error("distance_gain: r must be >= 0");
  }
  if (!cfg.distance_enabled) return 1.0;
  const double floor = cfg.c_min / cfg.c_max;
  if (r >= cfg.floor_distance()) return floor;
  return 1.0 - cfg.alpha * r;
}

inline GainPair gains(const PolarTarget& target, const ModulationConfig& cfg) {
  cfg.validate();
  const auto dir = direction_gains(target.theta);
  const double total = cfg.c_max * distance_gain(target.r, cfg);
  return {total * dir.left, total * dir.right};
}

/// Chooses alpha so that the gain floor is met exactly at `reach` meters.
inline double alpha_for_reach(double c_min, double c_max, double reach) {
  if (!(reach > 0.0)) throw std::domain_error("alpha_for_reach: reach must be > 0");
  const double a = (1.0 - c_min / c_max) / reach;
  if (!(a > 0.0)) throw std::domain_error("alpha_for_reach: c_min must be < c_max");
  return a;
}

inline PolarTarget relative_target(const Pose& pose, double target_x, double target_y) {
  const double dx = target_x - pose.x;
  const double dy = target_y - pose.y;
  if (!std::isfinite(dx) || !std::isfinite(dy) || !std::isfinite(pose.heading)) {
    throw std::domain_error("relative_target: non-finite coordinates");
  }
  const double r = std::hypot(dx, dy);
  if (r == 0.0) return {0.0, 0.0};
  const double bearing = std::atan2(dy, dx) * kRadToDeg;
  return {r, wrap_angle(bearing - pose.heading)};
}

}  // namespace hapnav

#endif  // HAPNAV_MODULATION_HPP
