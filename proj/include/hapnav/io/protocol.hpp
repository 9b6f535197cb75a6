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

#ifndef HAPNAV_IO_PROTOCOL_HPP
#define HAPNAV_IO_PROTOCOL_HPP

#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hapnav/dsp/cue.hpp"
#include "hapnav/io/config.hpp"
#include "hapnav/io/log_io.hpp"
#include "hapnav/world/session.hpp"

namespace hapnav::io {

inline constexpr int kProtocolVersion = 1;

inline json error_frame(std::string_view code, std::string_view message) {
  return {{"type", "error"}, {"code", code}, {"message", message}};
}

/// Transport-independent live session: client messages in, frames out.
/// The owner calls tick() at the session tick rate.
class LiveSession {
 public:
  LiveSession(world::WorldSpec w, RunConfig rc, Condition c = Condition::HapDir)
      : world_(std::move(w)), rc_(std::move(rc)) {
    restart(c, rc_.mode, false);
  }

  /// Frames sent when a client connects: hello, config, any pending
  /// events, and the current state.
  std::vector<json> greet() {
    std::vector<json> out{{{"type", "hello"},
                           {"server", "hapnav"},
                           {"protocol", kProtocolVersion},
                           {"tick", rc_.tick}},
                          config_frame()};
    auto ev = drain_events();
    out.insert(out.end(), ev.begin(), ev.end());
    out.push_back(state_frame());
    return out;
  }

  /// Handles one client message and returns the immediate replies.
  std::vector<json> on_message(std::string_view text) {
    json m;
    try {
      m = json::parse(text);
    } catch (const json::parse_error&) {
      return {error_frame("bad_json", "message is not valid JSON")};
    }
    if (!m.is_object() || !m.contains("type") || !m["type"].is_string()) {
      return {error_frame("bad_message", "message needs a string 'type'")};
    }
    const auto type = m["type"].get<std::string>();
    try {
      if (type == "hello") return on_hello(m);
      if (type == "input") return on_input(m);
      if (type == "config") return on_config(m);
    } catch (const json::exception&) {
      return {error_frame("bad_field", "field has the wrong type")};
    }
    return {error_frame("bad_message", "unknown message type '" + type + "'")};
  }

  /// Advances one tick with the held input and returns the event frames of
  /// that tick followed by the state frame. Nothing once finished.
  std::vector<json> tick() {
    if (session_->finished()) return {};
    world::Input in{turn_rate_, step_, grip_};
    step_ = false;
    session_->tick(in);
    auto out = drain_events();
    out.push_back(state_frame());
    return out;
  }

  bool finished() const { return session_->finished(); }
  const world::Session& session() const { return *session_; }

  /// Logs of sessions replaced by a config message, oldest first, plus the
  /// current one.
  std::vector<world::SessionLog> logs() const {
    auto out = retired_;
    out.push_back(session_->log());
    return out;
  }

  json state_frame() const {
    const auto& s = session_->last_sample();
    json j = {{"type", "state"},  {"k", s.k},
              {"t", s.t},         {"x", s.pose.x},
              {"y", s.pose.y},    {"heading", s.pose.heading},
              {"trial", session_->trial()},
              {"gl", s.gains.left}, {"gr", s.gains.right},
              {"pl", s.pan.left},   {"pr", s.pan.right},
              {"cond", to_string(s.condition)}};
    if (tutorial_) {
      const auto t = session_->target_position();
      j["target"] = {{"x", t.x}, {"y", t.y}};
      j["r"] = s.rel.r;
      j["theta"] = s.rel.theta;
    }
    return j;
  }

  json config_frame() const {
    const auto& c = session_->config();
    return {{"type", "config"},
            {"condition", to_string(c.condition)},
            {"mode", to_string(c.mode)},
            {"tutorial", tutorial_},
            {"trial_count", c.trial_count},
            {"seed", c.rng_seed},
            {"world_hash", session_->log().header.world_hash},
            {"world", world::format_world(world_)}};
  }

 private:
  std::vector<json> on_hello(const json& m) {
    if (m.contains("protocol") && m["protocol"] != kProtocolVersion) {
      return {error_frame("protocol", "unsupported protocol version")};
    }
    return {};
  }

  std::vector<json> on_input(const json& m) {
    if (session_->finished()) return {error_frame("finished", "session finished")};
    if (m.contains("turn_rate")) {
      const double r = m["turn_rate"].get<double>();
      if (!std::isfinite(r)) return {error_frame("bad_field", "turn_rate must be finite")};
      turn_rate_ = r;
    }
    if (m.contains("step") && m["step"].get<bool>()) step_ = true;
    if (m.contains("grip")) grip_ = m["grip"].get<bool>();
    if (m.contains("commit") && m["commit"].get<bool>()) {
      try {
        session_->commit_answer();
      } catch (const world::ProtocolError& e) {
        return {error_frame("protocol", e.what())};
      }
      auto out = drain_events();
      if (!session_->finished()) out.push_back(state_frame());
      return out;
    }
    return {};
  }

  std::vector<json> on_config(const json& m) {
    auto cond = session_->config().condition;
    auto mode = session_->config().mode;
    bool tutorial = tutorial_;
    if (m.contains("condition")) {
      const auto c = parse_condition(m["condition"].get<std::string>());
      if (!c) return {error_frame("bad_field", "unknown condition")};
      cond = *c;
    }
    if (m.contains("mode")) {
      const auto md = parse_mode(m["mode"].get<std::string>());
      if (!md) return {error_frame("bad_field", "unknown mode")};
      mode = *md;
    }
    if (m.contains("tutorial")) tutorial = m["tutorial"].get<bool>();
    retired_.push_back(session_->log());
    restart(cond, mode, tutorial);
    auto out = std::vector<json>{config_frame()};
    auto ev = drain_events();
    out.insert(out.end(), ev.begin(), ev.end());
    out.push_back(state_frame());
    return out;
  }

  void restart(Condition c, Mode mode, bool tutorial) {
    auto rc = rc_;
    rc.mode = mode;
    session_.emplace(world_, session_config(rc, c), "human");
    tutorial_ = tutorial;
    turn_rate_ = 0.0;
    step_ = false;
    grip_ = false;
    sent_events_ = 0;
  }

  std::vector<json> drain_events() {
    std::vector<json> out;
    const auto& ev = session_->log().events;
    for (; sent_events_ < ev.size(); ++sent_events_) {
      const auto& e = ev[sent_events_];
      // the UI learns targets only in tutorial mode
      json j = to_json(e);
      if (!tutorial_) {
        j.erase("x");
        j.erase("y");
        j.erase("theta");
        j.erase("target");
      }
      if (std::holds_alternative<world::ContactEv>(e.data)) {
        j["cue"] = dsp::to_string(dsp::arrival_cue(session_->config().condition).kind);
      }
      out.push_back(std::move(j));
    }
    return out;
  }

  world::WorldSpec world_;
  RunConfig rc_;
  std::optional<world::Session> session_;
  std::vector<world::SessionLog> retired_;
  bool tutorial_ = false;
  double turn_rate_ = 0.0;
  bool step_ = false;
  bool grip_ = false;
  std::size_t sent_events_ = 0;
};

/// Outbound frames of one connection. State frames are absolute, so only
/// the newest waits; other frames queue up to a cap and the rest drop.
class FrameQueue {
 public:
  explicit FrameQueue(std::size_t cap = 256) : cap_(cap) {}

  void push(json frame) {
    if (frame["type"] == "state") {
      if (state_) ++dropped_;
      state_ = std::move(frame);
      return;
    }
    if (fifo_.size() >= cap_) {
      ++dropped_;
      return;
    }
    fifo_.push_back(std::move(frame));
  }

  std::optional<json> pop() {
    if (!fifo_.empty()) {
      auto f = std::move(fifo_.front());
      fifo_.pop_front();
      return f;
    }
    if (state_) {
      auto f = std::move(*state_);
      state_.reset();
      return f;
    }
    return std::nullopt;
  }

  bool empty() const { return fifo_.empty() && !state_; }
  std::size_t size() const { return fifo_.size() + (state_ ? 1 : 0); }
  std::size_t dropped() const { return dropped_; }

 private:
  std::size_t cap_;
  std::deque<json> fifo_;
  std::optional<json> state_;
  std::size_t dropped_ = 0;
};

}  // namespace hapnav::io

#endif  // HAPNAV_IO_PROTOCOL_HPP
