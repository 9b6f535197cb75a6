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

#ifndef HAPNAV_CONDITION_HPP
#define HAPNAV_CONDITION_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hapnav {

/// Navigation feedback conditions.
///   NT          vocal track panned toward the target, no vibration
///   NT&Hap      as NT, plus unmodulated vibration
///   HapDir      vibration balance encodes direction
///   HapDirDist  vibration balance encodes direction, total level encodes distance
enum class Condition { NT, NTHap, HapDir, HapDirDist };

inline constexpr std::array<Condition, 4> kAllConditions{Condition::NT, Condition::NTHap,
                                                         Condition::HapDir, Condition::HapDirDist};

inline std::string_view to_string(Condition c) {
  switch (c) {
    case Condition::NT: return "NT";
    case Condition::NTHap: return "NT&Hap";
    case Condition::HapDir: return "HapDir";
    case Condition::HapDirDist: return "HapDirDist";
  }
  return "?";
}

inline std::optional<Condition> parse_condition(std::string_view s) {
  for (auto c : kAllConditions) {
    if (to_string(c) == s) return c;
  }
  if (s == "NTHap") return Condition::NTHap;
  return std::nullopt;
}

inline bool is_haptic_guided(Condition c) {
  return c == Condition::HapDir || c == Condition::HapDirDist;
}

enum class Mode { FrontDetect, Navigation };

inline std::string_view to_string(Mode m) {
  return m == Mode::FrontDetect ? "front_detect" : "navigation";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "front_detect") return Mode::FrontDetect;
  if (s == "navigation") return Mode::Navigation;
  return std::nullopt;
}

}  // namespace hapnav

#endif  // HAPNAV_CONDITION_HPP
