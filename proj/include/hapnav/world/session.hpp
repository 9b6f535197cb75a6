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

#ifndef HAPNAV_WORLD_SESSION_HPP
#define HAPNAV_WORLD_SESSION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hapnav/condition.hpp"
#include "hapnav/dsp/gain.hpp"
#include "hapnav/modulation.hpp"
#include "hapnav/rng.hpp"
#include "hapnav/world/locomotion.hpp"
#include "hapnav/world/world_spec.hpp"

namespace hapnav::world {

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SessionConfig {
  Condition condition = Condition::HapDir;
  ModulationConfig modulation;
  double tick = 0.033;  // s
  std::uint64_t rng_seed = 1;
  int trial_count = 24;
  Mode mode = Mode::Navigation;
  double max_turn_rate = 360.0;  // deg/s
  double circle_radius = 2.0;    // m, front-detect target distance
  double hold_duration = 1.0;    // s of grip before an answer registers

  void validate() const {
    if (!(tick > 0.0) || !std::isfinite(tick)) throw std::domain_error("session: tick must be > 0");
    if (trial_count < 1) throw std::domain_error("session: trial_count must be >= 1");
    if (!(max_turn_rate > 0.0)) throw std::domain_error("session: max_turn_rate must be > 0");
    if (!(circle_radius > 0.0)) throw std::domain_error("session: circle_radius must be > 0");
    if (!(hold_duration >= 0.0)) throw std::domain_error("session: hold_duration must be >= 0");
    modulation.validate();
  }

  /// Modulation actually applied: distance coding only under HapDirDist.
  ModulationConfig effective_modulation() const {
    ModulationConfig m = modulation;
    m.distance_enabled = condition == Condition::HapDirDist;
    return m;
  }
};

/// Per-tick operator input.
struct Input {
  double turn_rate = 0.0;  // deg/s, positive turns left
  bool step = false;       // one detected step
  bool grip = false;       // answer button held
};

struct TickSample {
  long k = 0;
  double t = 0.0;
  Pose pose;
  int target = -1;
  PolarTarget rel;
  GainPair gains;  // haptic channel gains
  GainPair pan;    // vocal pan weights, (1, 1) when the audio is not steered
  Condition condition = Condition::HapDir;

  friend bool operator==(const TickSample&, const TickSample&) = default;
};

struct StepEv {
  friend bool operator==(const StepEv&, const StepEv&) = default;
};
struct SpawnEv {
  int trial = 0;
  int target = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const SpawnEv&, const SpawnEv&) = default;
};
struct ContactEv {
  int trial = 0;
  int target = 0;
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const ContactEv&, const ContactEv&) = default;
};
/// Avatar left a decision cell through `dir`. theta is the target azimuth
/// on the first tick spent in that cell during the trial.
struct CrossroadEv {
  int trial = 0;
  Cell cell;
  Dir dir = Dir::East;
  double heading = 0.0;
  double theta = 0.0;
  friend bool operator==(const CrossroadEv&, const CrossroadEv&) = default;
};
struct AnswerEv {
  int trial = 0;
  double error = 0.0;  // signed degrees, target azimuth at commit
  double heading = 0.0;
  double response_time = 0.0;
  friend bool operator==(const AnswerEv&, const AnswerEv&) = default;
};

struct Event {
  long k = 0;
  double t = 0.0;
  std::variant<StepEv, SpawnEv, ContactEv, CrossroadEv, AnswerEv> data;

  friend bool operator==(const Event&, const Event&) = default;
};

inline const char* event_name(const Event& e) {
  static constexpr const char* names[] = {"step", "spawn", "contact", "crossroad", "answer"};
  return names[e.data.index()];
}

struct LogHeader {
  int version = 1;
  std::string source = "agent";
  Mode mode = Mode::Navigation;
  Condition condition = Condition::HapDir;
  double tick = 0.033;
  std::uint64_t seed = 0;
  int trial_count = 0;
  ModulationConfig modulation;  // effective
  std::string world_hash;
  double cell_size = 0.0;
  double contact_radius = 0.0;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

struct SessionLog {
  LogHeader header;
  std::vector<TickSample> ticks;
  std::vector<Event> events;
  bool complete = false;

  friend bool operator==(const SessionLog&, const SessionLog&) = default;
};

/// Uniform draw over spawn ids other than `exclude` (-1 excludes nothing).
inline int spawn_target(Rng& rng, const WorldSpec& w, int exclude) {
  const auto n = static_cast<int>(w.spawn_points.size());
  const int candidates = n - (exclude >= 0 && exclude < n ? 1 : 0);
  if (candidates <= 0) throw WorldError("spawn_target: no spawn point left to draw from");
  auto id = static_cast<int>(rng.below(static_cast<std::uint64_t>(candidates)));
  if (exclude >= 0 && id >= exclude) ++id;
  return id;
}

/// World bearing in (-180, 180] and fixed radius.
inline PolarTarget spawn_circle_target(Rng& rng, double radius = 2.0) {
  if (!(radius > 0.0)) throw std::domain_error("spawn_circle_target: radius must be > 0");
  return {radius, 180.0 - 360.0 * rng.uniform()};
}

/// Observable feedback for a (possibly virtual) heading.
struct Feedback {
  GainPair haptic;
  GainPair pan;
};

class Session {
 public:
  Session(WorldSpec world, SessionConfig cfg, std::string source = "agent")
      : world_(std::move(world)), cfg_(cfg), rng_(mix_seed(cfg.rng_seed)) {
    world_.validate();
    cfg_.validate();
    mod_ = cfg_.effective_modulation();
    pose_ = {world_.start.x, world_.start.y, 0.0};
    auto& h = log_.header;
    h.source = std::move(source);
    h.mode = cfg_.mode;
    h.condition = cfg_.condition;
    h.tick = cfg_.tick;
    h.seed = cfg_.rng_seed;
    h.trial_count = cfg_.trial_count;
    h.modulation = mod_;
    h.world_hash = hex64(world_hash(world_));
    h.cell_size = world_.cell_size;
    h.contact_radius = world_.contact_radius;
    spawn_next();
    enter_cell_check();
    log_.ticks.push_back(sample());
  }

  const WorldSpec& world() const { return world_; }
  const SessionConfig& config() const { return cfg_; }
  const Pose& pose() const { return pose_; }
  long k() const { return k_; }
  double time() const { return static_cast<double>(k_) * cfg_.tick; }
  int trial() const { return trial_; }
  bool finished() const { return finished_; }
  double queued_motion() const { return steps_.remaining(); }
  double path_length() const { return path_length_; }
  long step_count() const { return step_count_; }
  const SessionLog& log() const { return log_; }
  const TickSample& last_sample() const { return log_.ticks.back(); }

  /// Target position and id. Not part of what participants observe.
  Vec2 target_position() const { return target_; }
  int target_id() const { return target_id_; }

  Feedback feedback_at(double heading) const {
    const auto rel = relative_target({pose_.x, pose_.y, heading}, target_.x, target_.y);
    return feedback_for(rel);
  }

  void tick(const Input& in) {
    if (finished_) throw ProtocolError("session finished");
    if (!std::isfinite(in.turn_rate)) throw std::domain_error("tick: non-finite turn rate");
    const double dt = cfg_.tick;
    const long next_k = k_ + 1;
    const double rate = std::clamp(in.turn_rate, -cfg_.max_turn_rate, cfg_.max_turn_rate);
    pose_.heading = wrap_angle(pose_.heading + rate * dt);

    if (cfg_.mode == Mode::Navigation) {
      if (in.step) {
        steps_.add_step();
        ++step_count_;
        push_event(next_k, StepEv{});
      }
      path_length_ += steps_.advance(world_, pose_, dt);
    }
    k_ = next_k;

    if (cfg_.mode == Mode::Navigation) {
      exit_cell_check();
      const double d = std::hypot(target_.x - pose_.x, target_.y - pose_.y);
      if (d <= world_.contact_radius) {
        steps_.clear();
        push_event(k_, ContactEv{trial_, target_id_, pose_.x, pose_.y});
        ++trial_;
        spawn_next();
        if (trial_ >= cfg_.trial_count) finish();
      }
      enter_cell_check();
    } else {
      if (in.grip) {
        hold_ += dt;
        if (!hold_spent_ && hold_ >= cfg_.hold_duration - 1e-9) {
          hold_spent_ = true;
          commit();
        }
      } else {
        hold_ = 0.0;
        hold_spent_ = false;
      }
    }
    log_.ticks.push_back(sample());
  }

  /// Records the current heading error as this trial's answer. The grip
  /// hold rule is applied by the caller (or by tick() for Input::grip).
  AnswerEv commit_answer() {
    if (finished_) throw ProtocolError("commit_answer: session finished");
    if (cfg_.mode != Mode::FrontDetect) throw ProtocolError("commit_answer: not in front_detect mode");
    return commit();
  }

 private:
  Feedback feedback_for(const PolarTarget& rel) const {
    Feedback f;
    switch (cfg_.condition) {
      case Condition::NT:
        f.haptic = {0.0, 0.0};
        break;
      case Condition::NTHap:
        f.haptic = {mod_.c_max / 2.0, mod_.c_max / 2.0};
        break;
      case Condition::HapDir:
      case Condition::HapDirDist:
        f.haptic = gains(rel, mod_);
        break;
    }
    f.pan = is_haptic_guided(cfg_.condition) ? GainPair{1.0, 1.0} : dsp::pan_weights(rel.theta);
    return f;
  }

  TickSample sample() const {
    TickSample s;
    s.k = k_;
    s.t = time();
    s.pose = pose_;
    s.target = target_id_;
    s.rel = relative_target(pose_, target_.x, target_.y);
    const auto f = feedback_for(s.rel);
    s.gains = f.haptic;
    s.pan = f.pan;
    s.condition = cfg_.condition;
    return s;
  }

  template <class T>
  void push_event(long k, T ev) {
    log_.events.push_back(Event{k, static_cast<double>(k) * cfg_.tick, ev});
  }

  void spawn_next() {
    trial_start_k_ = k_;
    if (cfg_.mode == Mode::Navigation) {
      target_id_ = spawn_target(rng_, world_, target_id_);
      target_ = world_.spawn_points[static_cast<std::size_t>(target_id_)];
    } else {
      const auto p = spawn_circle_target(rng_, cfg_.circle_radius);
      target_id_ = trial_;
      target_ = {pose_.x + p.r * std::cos(p.theta * kDegToRad),
                 pose_.y + p.r * std::sin(p.theta * kDegToRad)};
    }
    push_event(k_, SpawnEv{trial_, target_id_, target_.x, target_.y});
    decision_cell_.reset();
  }

  AnswerEv commit() {
    const auto rel = relative_target(pose_, target_.x, target_.y);
    AnswerEv a{trial_, rel.theta, pose_.heading, static_cast<double>(k_ - trial_start_k_) * cfg_.tick};
    push_event(k_, a);
    ++trial_;
    if (trial_ >= cfg_.trial_count) {
      finish();
    } else {
      spawn_next();
    }
    return a;
  }

  void finish() {
    finished_ = true;
    log_.complete = true;
  }

  void enter_cell_check() {
    const auto c = world_.cell_at(pose_.x, pose_.y);
    if (!c || (decision_cell_ && decision_cell_->cell == *c)) return;
    if (world_.is_decision_cell(*c)) {
      const auto rel = relative_target(pose_, target_.x, target_.y);
      decision_cell_ = Pending{*c, rel.theta};
    }
  }

  void exit_cell_check() {
    if (!decision_cell_) return;
    const auto c = world_.cell_at(pose_.x, pose_.y);
    if (!c || *c == decision_cell_->cell) return;
    const int dr = c->row - decision_cell_->cell.row;
    const int dc = c->col - decision_cell_->cell.col;
    Dir dir;
    if (dr != 0 && dc != 0) {
      dir = nearest_dir(pose_.heading);
    } else if (dc != 0) {
      dir = dc > 0 ? Dir::East : Dir::West;
    } else {
      dir = dr > 0 ? Dir::South : Dir::North;
    }
    push_event(k_, CrossroadEv{trial_, decision_cell_->cell, dir, pose_.heading, decision_cell_->theta});
    decision_cell_.reset();
  }

  struct Pending {
    Cell cell;
    double theta = 0.0;
  };

  WorldSpec world_;
  SessionConfig cfg_;
  ModulationConfig mod_;
  Rng rng_;
  Pose pose_;
  StepQueue steps_;
  SessionLog log_;
  long k_ = 0;
  int trial_ = 0;
  long trial_start_k_ = 0;
  int target_id_ = -1;
  Vec2 target_;
  std::optional<Pending> decision_cell_;
  double hold_ = 0.0;
  bool hold_spent_ = false;
  bool finished_ = false;
  double path_length_ = 0.0;
  long step_count_ = 0;
};

/// What a participant model may see: its own pose, the maze, and the
/// feedback channels. The target position is deliberately absent.
class Observation {
 public:
  explicit Observation(const Session& s) : s_(s) {}

  const Pose& pose() const { return s_.pose(); }
  const WorldSpec& world() const { return s_.world(); }
  Condition condition() const { return s_.config().condition; }
  Mode mode() const { return s_.config().mode; }
  double tick() const { return s_.config().tick; }
  double max_turn_rate() const { return s_.config().max_turn_rate; }
  double queued_motion() const { return s_.queued_motion(); }
  int trial() const { return s_.trial(); }
  bool finished() const { return s_.finished(); }
  Feedback feedback_at(double heading) const { return s_.feedback_at(heading); }
  Feedback feedback() const { return s_.feedback_at(s_.pose().heading); }

 private:
  const Session& s_;
};

}  // namespace hapnav::world

#endif  // HAPNAV_WORLD_SESSION_HPP
