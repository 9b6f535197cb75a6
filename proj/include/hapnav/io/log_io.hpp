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

#ifndef HAPNAV_IO_LOG_IO_HPP
#define HAPNAV_IO_LOG_IO_HPP

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "hapnav/world/session.hpp"

namespace hapnav::io {

using nlohmann::json;

inline constexpr const char* kLogFormat = "hapnav-log";
inline constexpr int kLogVersion = 1;

class LogFormatError : public std::runtime_error {
 public:
  LogFormatError(long line, const std::string& what, const std::string& where = "")
      : std::runtime_error((where.empty() ? "" : where + ": ") + "log line " + std::to_string(line) + ": " + what),
        line_(line),
        detail_(what) {}
  long line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  long line_;
  std::string detail_;
};

inline json to_json(const world::LogHeader& h) {
  return {{"type", "header"},
          {"format", kLogFormat},
          {"version", h.version},
          {"source", h.source},
          {"mode", to_string(h.mode)},
          {"condition", to_string(h.condition)},
          {"tick", h.tick},
          {"seed", h.seed},
          {"trial_count", h.trial_count},
          {"modulation",
           {{"c_max", h.modulation.c_max},
            {"c_min", h.modulation.c_min},
            {"alpha", h.modulation.alpha},
            {"distance_enabled", h.modulation.distance_enabled}}},
          {"world_hash", h.world_hash},
          {"cell_size", h.cell_size},
          {"contact_radius", h.contact_radius}};
}

inline json to_json(const world::TickSample& s) {
  return {{"type", "tick"},          {"k", s.k},
          {"t", s.t},                {"x", s.pose.x},
          {"y", s.pose.y},           {"heading", s.pose.heading},
          {"target", s.target},      {"r", s.rel.r},
          {"theta", s.rel.theta},    {"gl", s.gains.left},
          {"gr", s.gains.right},     {"pl", s.pan.left},
          {"pr", s.pan.right},       {"cond", to_string(s.condition)}};
}

inline json to_json(const world::Event& e) {
  json j = {{"type", "event"}, {"k", e.k}, {"t", e.t}, {"event", world::event_name(e)}};
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, world::SpawnEv> || std::is_same_v<T, world::ContactEv>) {
          j["trial"] = d.trial;
          j["target"] = d.target;
          j["x"] = d.x;
          j["y"] = d.y;
        } else if constexpr (std::is_same_v<T, world::CrossroadEv>) {
          j["trial"] = d.trial;
          j["row"] = d.cell.row;
          j["col"] = d.cell.col;
          j["dir"] = world::to_string(d.dir);
          j["heading"] = d.heading;
          j["theta"] = d.theta;
        } else if constexpr (std::is_same_v<T, world::AnswerEv>) {
          j["trial"] = d.trial;
          j["error"] = d.error;
          j["heading"] = d.heading;
          j["response_time"] = d.response_time;
        }
      },
      e.data);
  return j;
}

/// One JSON record per line: header, then events and tick samples in tick
/// order (events of tick k precede sample k), then an end record.
inline void write_log(std::ostream& os, const world::SessionLog& log) {
  os << to_json(log.header).dump() << '\n';
  std::size_t ei = 0;
  for (const auto& s : log.ticks) {
    while (ei < log.events.size() && log.events[ei].k <= s.k) os << to_json(log.events[ei++]).dump() << '\n';
    os << to_json(s).dump() << '\n';
  }
  while (ei < log.events.size()) os << to_json(log.events[ei++]).dump() << '\n';
  const json end = {{"type", "end"},
                    {"ticks", log.ticks.size()},
                    {"events", log.events.size()},
                    {"complete", log.complete}};
  os << end.dump() << '\n';
}

inline std::string format_log(const world::SessionLog& log) {
  std::ostringstream os;
  write_log(os, log);
  return os.str();
}

inline void save_log(const std::filesystem::path& path, const world::SessionLog& log) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_log(out, log);
}

namespace detail {

template <class T>
T field(const json& j, const char* key, long line) {
  const auto it = j.find(key);
  if (it == j.end()) throw LogFormatError(line, std::string("missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw LogFormatError(line, std::string("bad value for '") + key + "'");
  }
}

}  // namespace detail

/// Parses a log. Any malformed, out-of-order or truncated input raises
/// LogFormatError naming the line.
inline world::SessionLog read_log(std::istream& in) {
  using detail::field;
  world::SessionLog log;
  std::string text;
  long line = 0;
  bool have_header = false, have_end = false;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    if (have_end) throw LogFormatError(line, "record after end");
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw LogFormatError(line, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw LogFormatError(line, "record is not an object");
    const auto type = field<std::string>(j, "type", line);
    if (!have_header) {
      if (type != "header") throw LogFormatError(line, "first record must be the header");
      if (field<std::string>(j, "format", line) != kLogFormat) throw LogFormatError(line, "not a hapnav log");
      auto& h = log.header;
      h.version = field<int>(j, "version", line);
      if (h.version != kLogVersion) throw LogFormatError(line, "unsupported log version " + std::to_string(h.version));
      h.source = field<std::string>(j, "source", line);
      const auto mode = parse_mode(field<std::string>(j, "mode", line));
      const auto cond = parse_condition(field<std::string>(j, "condition", line));
      if (!mode || !cond) throw LogFormatError(line, "unknown mode or condition");
      h.mode = *mode;
      h.condition = *cond;
      h.tick = field<double>(j, "tick", line);
      h.seed = field<std::uint64_t>(j, "seed", line);
      h.trial_count = field<int>(j, "trial_count", line);
      const auto m = field<json>(j, "modulation", line);
      h.modulation.c_max = field<double>(m, "c_max", line);
      h.modulation.c_min = field<double>(m, "c_min", line);
      h.modulation.alpha = field<double>(m, "alpha", line);
      h.modulation.distance_enabled = field<bool>(m, "distance_enabled", line);
      h.world_hash = field<std::string>(j, "world_hash", line);
      h.cell_size = field<double>(j, "cell_size", line);
      h.contact_radius = field<double>(j, "contact_radius", line);
      have_header = true;
    } else if (type == "tick") {
      world::TickSample s;
      s.k = field<long>(j, "k", line);
      if (!log.ticks.empty() && s.k != log.ticks.back().k + 1) throw LogFormatError(line, "tick index gap");
      s.t = field<double>(j, "t", line);
      s.pose = {field<double>(j, "x", line), field<double>(j, "y", line), field<double>(j, "heading", line)};
      s.target = field<int>(j, "target", line);
      s.rel = {field<double>(j, "r", line), field<double>(j, "theta", line)};
      s.gains = {field<double>(j, "gl", line), field<double>(j, "gr", line)};
      s.pan = {field<double>(j, "pl", line), field<double>(j, "pr", line)};
      const auto c = parse_condition(field<std::string>(j, "cond", line));
      if (!c) throw LogFormatError(line, "unknown condition");
      s.condition = *c;
      log.ticks.push_back(s);
    } else if (type == "event") {
      world::Event e;
      e.k = field<long>(j, "k", line);
      e.t = field<double>(j, "t", line);
      if (!log.events.empty() && e.k < log.events.back().k) throw LogFormatError(line, "events out of order");
      const auto name = field<std::string>(j, "event", line);
      if (name == "step") {
        e.data = world::StepEv{};
      } else if (name == "spawn" || name == "contact") {
        const int trial = field<int>(j, "trial", line), target = field<int>(j, "target", line);
        const double x = field<double>(j, "x", line), y = field<double>(j, "y", line);
        if (name == "spawn") {
          e.data = world::SpawnEv{trial, target, x, y};
        } else {
          e.data = world::ContactEv{trial, target, x, y};
        }
      } else if (name == "crossroad") {
        world::CrossroadEv c;
        c.trial = field<int>(j, "trial", line);
        c.cell = {field<int>(j, "row", line), field<int>(j, "col", line)};
        const auto d = world::parse_dir(field<std::string>(j, "dir", line));
        if (!d) throw LogFormatError(line, "bad direction");
        c.dir = *d;
        c.heading = field<double>(j, "heading", line);
        c.theta = field<double>(j, "theta", line);
        e.data = c;
      } else if (name == "answer") {
        e.data = world::AnswerEv{field<int>(j, "trial", line), field<double>(j, "error", line),
                                 field<double>(j, "heading", line), field<double>(j, "response_time", line)};
      } else {
        throw LogFormatError(line, "unknown event '" + name + "'");
      }
      log.events.push_back(e);
    } else if (type == "end") {
      if (field<std::size_t>(j, "ticks", line) != log.ticks.size() ||
          field<std::size_t>(j, "events", line) != log.events.size()) {
        throw LogFormatError(line, "end record counts do not match");
      }
      log.complete = field<bool>(j, "complete", line);
      have_end = true;
    } else {
      throw LogFormatError(line, "unknown record type '" + type + "'");
    }
  }
  if (!have_header) throw LogFormatError(line, "empty log");
  if (!have_end) throw LogFormatError(line, "truncated log: no end record");
  return log;
}

inline world::SessionLog parse_log(const std::string& text) {
  std::istringstream in(text);
  return read_log(in);
}

inline world::SessionLog load_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read_log(in);
  } catch (const LogFormatError& e) {
    throw LogFormatError(e.line(), e.detail(), path.string());
  }
}

}  // namespace hapnav::io

#endif  // HAPNAV_IO_LOG_IO_HPP
