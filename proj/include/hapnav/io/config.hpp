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

#ifndef HAPNAV_IO_CONFIG_HPP
#define HAPNAV_IO_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapnav/agents/agent.hpp"
#include "hapnav/condition.hpp"
#include "hapnav/rng.hpp"
#include "hapnav/world/session.hpp"
#include "hapnav/world/world_spec.hpp"

namespace hapnav::io {

using nlohmann::json;

inline constexpr const char* kConfigFormat = "hapnav-config";
inline constexpr int kConfigVersion = 1;

/// A config problem, located by JSON pointer and (when known) source line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string source, int line, std::string field, const std::string& what)
      : std::runtime_error(format(source, line, field, what)),
        source_(std::move(source)),
        line_(line),
        field_(std::move(field)) {}
  const std::string& source() const { return source_; }
  int line() const { return line_; }  // 0 when unknown
  const std::string& field() const { return field_; }

 private:
  static std::string format(const std::string& src, int line, const std::string& field, const std::string& what) {
    std::string s = src.empty() ? "config" : src;
    if (line > 0) s += ":" + std::to_string(line);
    s += ": ";
    if (!field.empty()) s += field + ": ";
    return s + what;
  }

  std::string source_;
  int line_;
  std::string field_;
};

struct RunConfig {
  std::string world = "default";  // "default" or a world file path
  Mode mode = Mode::Navigation;
  std::vector<Condition> conditions{kAllConditions.begin(), kAllConditions.end()};
  int trial_count = 24;
  std::uint64_t seed = 1;
  double tick = 0.033;
  ModulationConfig modulation;
  double max_turn_rate = 360.0;
  double circle_radius = 2.0;
  double hold_duration = 1.0;
  agents::AgentParams agent;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Session seed for one condition of a run. Keyed by the condition itself
/// so that running a subset reproduces the matching sessions of a full run.
inline std::uint64_t condition_seed(std::uint64_t seed, Condition c) {
  return mix_seed(seed * 8 + static_cast<std::uint64_t>(c));
}

inline world::SessionConfig session_config(const RunConfig& rc, Condition c) {
  world::SessionConfig s;
  s.condition = c;
  s.modulation = rc.modulation;
  s.tick = rc.tick;
  s.rng_seed = condition_seed(rc.seed, c);
  s.trial_count = rc.trial_count;
  s.mode = rc.mode;
  s.max_turn_rate = rc.max_turn_rate;
  s.circle_radius = rc.circle_radius;
  s.hold_duration = rc.hold_duration;
  return s;
}

/// World named by the config; relative paths resolve against `base`.
inline world::WorldSpec resolve_world(const RunConfig& rc, const std::filesystem::path& base = {}) {
  if (rc.world == "default") return world::default_world();
  std::filesystem::path p(rc.world);
  if (p.is_relative() && !base.empty()) p = base / p;
  return world::load_world(p);
}

inline json to_json(const RunConfig& rc) {
  json conds = json::array();
  for (auto c : rc.conditions) conds.push_back(to_string(c));
  const auto& a = rc.agent;
  return {{"format", kConfigFormat},
          {"version", kConfigVersion},
          {"world", rc.world},
          {"mode", to_string(rc.mode)},
          {"conditions", conds},
          {"trial_count", rc.trial_count},
          {"seed", rc.seed},
          {"tick", rc.tick},
          {"modulation", {{"c_max", rc.modulation.c_max}, {"c_min", rc.modulation.c_min}, {"alpha", rc.modulation.alpha}}},
          {"session",
           {{"max_turn_rate", rc.max_turn_rate},
            {"circle_radius", rc.circle_radius},
            {"hold_duration", rc.hold_duration}}},
          {"agent",
           {{"amp_jnd", a.amp_jnd},
            {"turn_rate", a.turn_rate},
            {"decision_period", a.decision_period},
            {"front_back_confusion_p", a.front_back_confusion_p},
            {"settle_time", a.settle_time},
            {"confusion_persistence", a.confusion_persistence},
            {"probe_angle", a.probe_angle},
            {"look_time", a.look_time},
            {"max_trial_time", a.max_trial_time}}}};
}

namespace detail {

/// Source line of every object key and array element, by JSON pointer.
/// Assumes text that already parsed as JSON.
inline std::map<std::string, int> locate_fields(const std::string& text) {
  struct Frame {
    bool object;
    std::string path;
    std::string key;
    int index = -1;
  };
  std::map<std::string, int> out;
  std::vector<Frame> stack;
  int line = 1;
  bool expect_key = false;
  auto escape = [](const std::string& k) {
    std::string s;
    for (char c : k) {
      if (c == '~') s += "~0";
      else if (c == '/') s += "~1";
      else s += c;
    }
    return s;
  };
  auto here = [&]() -> std::string {
    if (stack.empty()) return "";
    const auto& f = stack.back();
    return f.path + "/" + (f.object ? escape(f.key) : std::to_string(f.index));
  };
  auto value_start = [&] {
    if (!stack.empty() && !stack.back().object) {
      ++stack.back().index;
      out.emplace(here(), line);
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i];
      }
      if (expect_key) {
        stack.back().key = s;
        out.emplace(here(), line);
        expect_key = false;
      } else {
        value_start();
      }
    } else if (c == '{' || c == '[') {
      value_start();
      const std::string path = here();
      stack.push_back({c == '{', path, "", -1});
      expect_key = c == '{';
    } else if (c == '}' || c == ']') {
      stack.pop_back();
      expect_key = false;
    } else if (c == ',') {
      expect_key = !stack.empty() && stack.back().object;
    } else if (c == ':') {
      expect_key = false;
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      // bare literal: number, true, false, null
      value_start();
      while (i + 1 < text.size() && std::string_view(",]}\n\r\t ").find(text[i + 1]) == std::string_view::npos) ++i;
    }
  }
  return out;
}

class Reader {
 public:
  Reader(const json& root, std::string source, std::map<std::string, int> lines)
      : root_(root), source_(std::move(source)), lines_(std::move(lines)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    int line = 0;
    // fall back to the nearest enclosing field that has a position
    for (std::string f = field;; f = f.substr(0, f.rfind('/'))) {
      if (auto it = lines_.find(f); it != lines_.end()) {
        line = it->second;
        break;
      }
      if (f.empty()) break;
    }
    throw ConfigError(source_, line, field, what);
  }

  const json* find(const std::string& ptr) const {
    const json::json_pointer p(ptr);
    return root_.contains(p) ? &root_.at(p) : nullptr;
  }

  void only(const std::string& ptr, std::initializer_list<const char*> keys) const {
    const json* obj = find(ptr);
    if (!obj) return;
    if (!obj->is_object()) fail(ptr, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj->items()) {
      if (!allowed.count(k)) fail(ptr + "/" + k, "unknown field");
    }
  }

  void number(const std::string& ptr, double& out) const {
    if (const json* v = find(ptr)) {
      if (!v->is_number()) fail(ptr, "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& ptr, Int& out) const {
    if (const json* v = find(ptr)) {
      if (!v->is_number_integer()) fail(ptr, "expected an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->is_number_unsigned()) {
          out = v->get<Int>();
        } else {
          fail(ptr, "expected a non-negative integer");
        }
      } else {
        out = v->get<Int>();
      }
    }
  }

  void string(const std::string& ptr, std::string& out) const {
    if (const json* v = find(ptr)) {
      if (!v->is_string()) fail(ptr, "expected a string");
      out = v->get<std::string>();
    }
  }

 private:
  const json& root_;
  std::string source_;
  std::map<std::string, int> lines_;
};

}  // namespace detail

/// Parses and validates a config document. `source` names it in messages.
inline RunConfig parse_config(const std::string& text, const std::string& source = "config") {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // byte offset of the failure to a line number
    const auto upto = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(source, line, "", "syntax error");
  }
  const detail::Reader r(root, source, detail::locate_fields(text));
  if (!root.is_object()) r.fail("", "expected an object");
  r.only("", {"format", "version", "world", "mode", "conditions", "trial_count", "seed", "tick", "modulation", "session",
              "agent"});
  r.only("/modulation", {"c_max", "c_min", "alpha"});
  r.only("/session", {"max_turn_rate", "circle_radius", "hold_duration"});
  r.only("/agent", {"amp_jnd", "turn_rate", "decision_period", "front_back_confusion_p", "settle_time",
                    "confusion_persistence", "probe_angle", "look_time", "max_trial_time"});

  std::string format;
  r.string("/format", format);
  if (format != kConfigFormat) r.fail("/format", std::string("expected \"") + kConfigFormat + "\"");
  int version = 0;
  r.integer("/version", version);
  if (version != kConfigVersion) r.fail("/version", "unsupported version " + std::to_string(version));

  RunConfig rc;
  r.string("/world", rc.world);
  if (rc.world.empty()) r.fail("/world", "must not be empty");
  std::string mode = std::string(to_string(rc.mode));
  r.string("/mode", mode);
  if (auto m = parse_mode(mode)) {
    rc.mode = *m;
  } else {
    r.fail("/mode", "unknown mode \"" + mode + "\"");
  }
  if (const json* cs = r.find("/conditions")) {
    if (!cs->is_array() || cs->empty()) r.fail("/conditions", "expected a non-empty array");
    rc.conditions.clear();
    for (std::size_t i = 0; i < cs->size(); ++i) {
      const auto field = "/conditions/" + std::to_string(i);
      const auto& v = (*cs)[i];
      const auto c = v.is_string() ? parse_condition(v.get<std::string>()) : std::nullopt;
      if (!c) r.fail(field, "unknown condition");
      if (std::find(rc.conditions.begin(), rc.conditions.end(), *c) != rc.conditions.end()) {
        r.fail(field, "duplicate condition");
      }
      rc.conditions.push_back(*c);
    }
  }
  r.integer("/trial_count", rc.trial_count);
  if (rc.trial_count < 1) r.fail("/trial_count", "must be >= 1");
  r.integer("/seed", rc.seed);
  r.number("/tick", rc.tick);
  if (!(rc.tick > 0.0)) r.fail("/tick", "must be > 0");

  r.number("/modulation/c_max", rc.modulation.c_max);
  r.number("/modulation/c_min", rc.modulation.c_min);
  r.number("/modulation/alpha", rc.modulation.alpha);
  try {
    rc.modulation.validate();
  } catch (const std::domain_error& e) {
    r.fail("/modulation", e.what());
  }

  r.number("/session/max_turn_rate", rc.max_turn_rate);
  if (!(rc.max_turn_rate > 0.0)) r.fail("/session/max_turn_rate", "must be > 0");
  r.number("/session/circle_radius", rc.circle_radius);
  if (!(rc.circle_radius > 0.0)) r.fail("/session/circle_radius", "must be > 0");
  r.number("/session/hold_duration", rc.hold_duration);
  if (!(rc.hold_duration >= 0.0)) r.fail("/session/hold_duration", "must be >= 0");

  auto& a = rc.agent;
  const std::pair<const char*, double*> fields[] = {{"amp_jnd", &a.amp_jnd},
                                                    {"turn_rate", &a.turn_rate},
                                                    {"decision_period", &a.decision_period},
                                                    {"front_back_confusion_p", &a.front_back_confusion_p},
                                                    {"settle_time", &a.settle_time},
                                                    {"confusion_persistence", &a.confusion_persistence},
                                                    {"probe_angle", &a.probe_angle},
                                                    {"look_time", &a.look_time},
                                                    {"max_trial_time", &a.max_trial_time}};
  for (const auto& [name, ptr] : fields) r.number(std::string("/agent/") + name, *ptr);
  try {
    a.validate();
  } catch (const std::domain_error& e) {
    // "agent: <field> must ..." names the offending field
    std::string msg = e.what();
    std::string field = "/agent";
    for (const auto& [name, ptr] : fields) {
      if (msg.find(std::string(" ") + name + " ") != std::string::npos) field += std::string("/") + name;
    }
    r.fail(field, msg.substr(msg.find(": ") + 2));
  }
  return rc;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

inline std::string format_config(const RunConfig& rc) { return to_json(rc).dump(2) + "\n"; }

}  // namespace hapnav::io

#endif  // HAPNAV_IO_CONFIG_HPP
