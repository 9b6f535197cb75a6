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

#ifndef HAPNAV_AGENTS_AGENT_HPP
#define HAPNAV_AGENTS_AGENT_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hapnav/condition.hpp"
#include "hapnav/modulation.hpp"
#include "hapnav/rng.hpp"
#include "hapnav/world/session.hpp"

namespace hapnav::agents {

using world::Dir;
using world::Input;
using world::Observation;

struct AgentParams {
  double amp_jnd = 0.0;                 // just-noticeable relative gain difference
  double turn_rate = 360.0;             // deg/s
  double decision_period = 0.1;         // s between perceptual updates
  double front_back_confusion_p = 0.0;  // per trial (front detect) or per junction (navigation)
  double settle_time = 1.0;             // s balanced before answering
  double confusion_persistence = 0.5;   // chance a confusion carries into the next junction
  double probe_angle = 45.0;            // deg, head turn used to tell front from back
  double look_time = 0.5;               // s spent attending to each corridor at a junction
  double max_trial_time = 60.0;         // s, an unsettled seeker answers anyway

  void validate() const {
    if (!(amp_jnd >= 0.0) || !std::isfinite(amp_jnd)) throw std::domain_error("agent: amp_jnd must be >= 0");
    if (!(turn_rate > 0.0)) throw std::domain_error("agent: turn_rate must be > 0");
    if (!(decision_period > 0.0)) throw std::domain_error("agent: decision_period must be > 0");
    if (!(front_back_confusion_p >= 0.0 && front_back_confusion_p <= 1.0)) {
      throw std::domain_error("agent: front_back_confusion_p must be in [0, 1]");
    }
    if (!(confusion_persistence >= 0.0 && confusion_persistence <= 1.0)) {
      throw std::domain_error("agent: confusion_persistence must be in [0, 1]");
    }
    if (!(settle_time >= 0.0)) throw std::domain_error("agent: settle_time must be >= 0");
    if (!(probe_angle > 0.0 && probe_angle < 90.0)) throw std::domain_error("agent: probe_angle must be in (0, 90)");
    if (!(max_trial_time > 0.0)) throw std::domain_error("agent: max_trial_time must be > 0");
    if (!(look_time >= 0.0)) throw std::domain_error("agent: look_time must be >= 0");
  }

  friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

/// The stereo pair a participant attends to: vibration balance in the
/// haptic conditions, the vocal pan otherwise.
inline GainPair cue_pair(const world::Feedback& f, Condition c) { return is_haptic_guided(c) ? f.haptic : f.pan; }

/// Each gain scaled by an independent 1 + N(0, (amp_jnd/2)^2) factor.
inline GainPair perceive(const GainPair& g, double amp_jnd, Rng& rng) {
  if (amp_jnd <= 0.0) return g;
  const double s = amp_jnd / 2.0;
  return {std::max(0.0, g.left * (1.0 + s * rng.normal())), std::max(0.0, g.right * (1.0 + s * rng.normal()))};
}

/// Normalized left-right imbalance in [-1, 1]; positive when left is louder.
inline double imbalance(const GainPair& g) {
  const double sum = g.left + g.right;
  return sum > 0.0 ? (g.left - g.right) / sum : 0.0;
}

/// Turn-rate command toward the louder side, zero inside the JND deadband.
inline double balance_seek_command(const GainPair& observed, const AgentParams& p) {
  const double diff = observed.left - observed.right;
  const double sum = observed.left + observed.right;
  if (std::abs(diff) <= p.amp_jnd * sum / 2.0) return 0.0;
  return p.turn_rate * std::clamp(2.0 * imbalance(observed), -1.0, 1.0);
}

/// Front-detect participant: turns until both sides feel equal, holds the
/// balance for settle_time, then grips to answer.
class BalanceSeeker {
 public:
  BalanceSeeker(AgentParams p, std::uint64_t seed) : p_(p), rng_(seed) { p_.validate(); }

  Input act(const Observation& obs) {
    const double dt = obs.tick();
    if (obs.trial() != trial_) start_trial(obs);
    elapsed_ += dt;
    switch (phase_) {
      case Phase::Seek: {
        if (++since_update_ >= period_ticks(dt)) {
          since_update_ = 0;
          const auto seen = perceive(cue_pair(obs.feedback(), obs.condition()), p_.amp_jnd, rng_);
          cmd_ = balance_seek_command(seen, p_);
          const bool balanced = std::abs(imbalance(seen)) <= p_.amp_jnd / 2.0 + kSettleSlack;
          settled_ = balanced ? settled_ + period_ticks(dt) * dt : 0.0;
          if (settled_ >= p_.settle_time - 1e-9 || elapsed_ >= p_.max_trial_time) {
            cmd_ = 0.0;
            phase_ = confused_ ? Phase::Flip : Phase::Hold;
          }
        }
        return {cmd_, false, false};
      }
      case Phase::Flip: {
        const double turn = std::min(flip_left_, p_.turn_rate * dt);
        flip_left_ -= turn;
        if (flip_left_ <= 1e-12) phase_ = Phase::Hold;
        return {turn / dt, false, false};
      }
      case Phase::Hold:
        return {0.0, false, true};
    }
    return {};
  }

  bool confused() const { return confused_; }

 private:
  static constexpr double kSettleSlack = 0.002;
  enum class Phase { Seek, Flip, Hold };

  int period_ticks(double dt) const { return std::max(1, static_cast<int>(std::lround(p_.decision_period / dt))); }

  void start_trial(const Observation& obs) {
    trial_ = obs.trial();
    confused_ = rng_.bernoulli(p_.front_back_confusion_p);
    phase_ = Phase::Seek;
    settled_ = 0.0;
    elapsed_ = 0.0;
    cmd_ = 0.0;
    since_update_ = period_ticks(obs.tick());
    flip_left_ = 180.0;
  }

  AgentParams p_;
  Rng rng_;
  int trial_ = -1;
  bool confused_ = false;
  Phase phase_ = Phase::Seek;
  double settled_ = 0.0;
  double elapsed_ = 0.0;
  double cmd_ = 0.0;
  int since_update_ = 0;
  double flip_left_ = 180.0;
};

/// How an option looked when the agent faced it.
struct OptionView {
  Dir dir = Dir::East;
  double imbalance = 0.0;
  bool front = false;
  double score = 0.0;
};

/// Picks a corridor at a junction by virtually facing each open direction.
/// The best corridor has the most balanced pair and passes the front test:
/// turning the head left must shift the balance to the right.
inline Dir crossroads_policy(const Observation& obs, const std::vector<Dir>& open, const AgentParams& p, Rng& rng,
                             bool confused, std::vector<OptionView>* views = nullptr) {
  if (open.empty()) throw std::domain_error("crossroads_policy: no open corridor");
  const auto cond = obs.condition();
  // one perceptual sample per decision period while looking
  const int samples = std::max(1, static_cast<int>(std::lround(p.look_time / p.decision_period)));
  auto look = [&](double h) {
    const auto pair = cue_pair(obs.feedback_at(h), cond);
    double acc = 0.0;
    for (int i = 0; i < samples; ++i) acc += imbalance(perceive(pair, p.amp_jnd, rng));
    return acc / samples;
  };
  std::vector<OptionView> v;
  for (Dir d : open) {
    const double h = world::heading_of(d);
    OptionView o;
    o.dir = d;
    o.imbalance = look(h);
    o.front = look(h + p.probe_angle) < look(h - p.probe_angle);
    o.score = std::abs(o.imbalance) + (o.front ? 0.0 : 2.0);
    v.push_back(o);
  }
  const auto best = std::min_element(v.begin(), v.end(), [](auto& a, auto& b) { return a.score < b.score; });
  Dir choice = best->dir;
  if (confused) {
    // believe the target sits at the front-back mirror of where it seems
    const double h = obs.pose().heading;
    const double seen = wrap_angle(world::heading_of(best->dir) - h);
    const double mirrored = h + wrap_angle(180.0 - seen);
    double gap = 1e9;
    for (Dir d : open) {
      const double g = std::abs(wrap_angle(world::heading_of(d) - mirrored));
      if (g < gap - 1e-9) {
        gap = g;
        choice = d;
      }
    }
  }
  if (views) *views = std::move(v);
  return choice;
}

/// Grid navigator: walks corridor centerlines in whole steps, stops at each
/// decision cell, chooses a corridor, turns, and walks on.
class Navigator {
 public:
  Navigator(AgentParams p, std::uint64_t seed) : p_(p), rng_(seed) { p_.validate(); }

  Input act(const Observation& obs) {
    const double dt = obs.tick();
    const auto& pose = obs.pose();
    const auto& w = obs.world();
    if (obs.trial() != trial_) start_trial(obs);
    walked_ += std::hypot(pose.x - last_.x, pose.y - last_.y);
    last_ = {pose.x, pose.y};
    if (turning_) {
      const double diff = wrap_angle(desired_ - pose.heading);
      if (std::abs(diff) > 1e-9) return {std::clamp(diff / dt, -p_.turn_rate, p_.turn_rate), false, false};
      turning_ = false;
    }
    const auto cell = w.cell_at(pose.x, pose.y);
    if (!cell) return {};
    const double queued = obs.queued_motion();
    const bool can_step = queued <= world::kWalkSpeed * dt + 1e-9;
    const auto next = next_junction(w, *cell, world::nearest_dir(pose.heading));
    if (!next) return {0.0, can_step, false};
    const auto ctr = w.center(*next);
    const double ux = std::cos(pose.heading * kDegToRad), uy = std::sin(pose.heading * kDegToRad);
    const double rest = (ctr.x - pose.x) * ux + (ctr.y - pose.y) * uy - queued;
    if (queued <= 0.0 && *cell == *next) return decide(obs, *cell, dt);
    if (!can_step) return {};
    // stop where the walked distance best matches the center-to-center
    // route, staying inside the junction cell
    const double edge = w.cell_size / 2.0 - kCellMargin;
    const double err = walked_ + queued - (nominal_ + std::hypot(ctr.x - anchor_.x, ctr.y - anchor_.y));
    const bool outside = rest >= edge;
    const bool fits = rest - world::kStepLength > -edge;
    const bool step = outside || (fits && err < -world::kStepLength / 2.0);
    return {0.0, step, false};
  }

  int decisions() const { return decisions_; }
  int confused_decisions() const { return confused_count_; }

 private:
  Input decide(const Observation& obs, world::Cell cell, double dt) {
    const auto& w = obs.world();
    std::vector<Dir> open;
    for (Dir d : world::kAllDirs) {
      if (w.is_free(world::step(cell, d))) open.push_back(d);
    }
    confused_ = confused_ ? rng_.bernoulli(p_.confusion_persistence) : false;
    if (!confused_) confused_ = rng_.bernoulli(p_.front_back_confusion_p);
    const Dir d = crossroads_policy(obs, open, p_, rng_, confused_);
    ++decisions_;
    confused_count_ += confused_ ? 1 : 0;
    decided_ = cell;
    const auto ctr = w.center(cell);
    nominal_ += std::hypot(ctr.x - anchor_.x, ctr.y - anchor_.y);
    anchor_ = ctr;
    desired_ = aim(w, obs.pose(), cell, d);
    const double diff = wrap_angle(desired_ - obs.pose().heading);
    if (std::abs(diff) <= 1e-9) return {0.0, true, false};
    turning_ = true;
    return {std::clamp(diff / dt, -p_.turn_rate, p_.turn_rate), false, false};
  }

  static constexpr double kCellMargin = 0.05;

  void start_trial(const Observation& obs) {
    const auto& pose = obs.pose();
    const auto& w = obs.world();
    trial_ = obs.trial();
    decided_.reset();
    walked_ = 0.0;
    nominal_ = 0.0;
    last_ = {pose.x, pose.y};
    const auto c = w.cell_at(pose.x, pose.y);
    anchor_ = c ? w.center(*c) : last_;
  }

  // the junction the agent is heading for: the current cell when it is an
  // undecided decision cell, else the next one down the corridor
  std::optional<world::Cell> next_junction(const world::WorldSpec& w, world::Cell from, Dir d) const {
    if (w.is_decision_cell(from) && !(decided_ && *decided_ == from)) return from;
    world::Cell c = from;
    for (int i = 0; i < w.rows + w.cols; ++i) {
      c = world::step(c, d);
      if (w.is_blocked(c)) return std::nullopt;
      if (w.is_decision_cell(c)) return c;
    }
    return std::nullopt;
  }

  // heading from the current position to the center of the next decision
  // cell down corridor `d`, which pulls the walk back onto the centerline
  static double aim(const world::WorldSpec& w, const Pose& pose, world::Cell from, Dir d) {
    world::Cell c = from;
    for (int i = 0; i < w.rows + w.cols; ++i) {
      const world::Cell n = world::step(c, d);
      if (w.is_blocked(n)) break;
      c = n;
      if (w.is_decision_cell(c)) break;
    }
    if (c == from) return world::heading_of(d);
    const auto ctr = w.center(c);
    return std::atan2(ctr.y - pose.y, ctr.x - pose.x) * kRadToDeg;
  }

  AgentParams p_;
  Rng rng_;
  int trial_ = -1;
  std::optional<world::Cell> decided_;
  bool turning_ = false;
  double desired_ = 0.0;
  bool confused_ = false;
  double walked_ = 0.0;   // m walked this trial
  double nominal_ = 0.0;  // m of center-to-center route up to anchor_
  world::Vec2 anchor_;
  world::Vec2 last_;
  int decisions_ = 0;
  int confused_count_ = 0;
};

}  // namespace hapnav::agents

#endif  // HAPNAV_AGENTS_AGENT_HPP
