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

#ifndef HAPNAV_EVAL_TRIAL_HPP
#define HAPNAV_EVAL_TRIAL_HPP

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hapnav/eval/path.hpp"
#include "hapnav/world/session.hpp"

namespace hapnav::eval {

class MalformedLog : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TrialClass { Perfect, Good, Miss };

inline const char* to_string(TrialClass c) {
  switch (c) {
    case TrialClass::Perfect: return "Perfect";
    case TrialClass::Good: return "Good";
    case TrialClass::Miss: return "Miss";
  }
  return "?";
}

inline TrialClass class_for(int wrong_turns) {
  if (wrong_turns < 0) throw std::domain_error("class_for: negative count");
  return wrong_turns == 0 ? TrialClass::Perfect : wrong_turns == 1 ? TrialClass::Good : TrialClass::Miss;
}

struct Choice {
  world::CrossroadEv event;
  bool wrong = false;
};

struct TrialOutcome {
  int trial = 0;
  TrialClass cls = TrialClass::Perfect;
  int wrong_turns = 0;
  double travel_distance = 0.0;  // m
  double arrival_time = 0.0;     // s
  double shortest_distance = 0.0;
  bool front_back_err = false;
  std::vector<Choice> choices;
};

/// Two or more back-to-back wrong choices, each made with the target behind.
inline bool detect_front_back_err(const std::vector<Choice>& choices) {
  int run = 0;
  for (const auto& c : choices) {
    if (c.wrong && std::abs(c.event.theta) > 90.0) {
      if (++run >= 2) return true;
    } else {
      run = 0;
    }
  }
  return false;
}

namespace detail {

struct TrialSpan {
  std::optional<world::SpawnEv> spawn;
  long spawn_k = -1;
  std::optional<world::ContactEv> contact;
  long contact_k = -1;
  std::vector<world::CrossroadEv> crossroads;
};

inline std::map<int, TrialSpan> split_trials(const world::SessionLog& log) {
  std::map<int, TrialSpan> out;
  for (const auto& e : log.events) {
    if (const auto* s = std::get_if<world::SpawnEv>(&e.data)) {
      auto& t = out[s->trial];
      if (t.spawn) throw MalformedLog("trial " + std::to_string(s->trial) + " spawned twice");
      t.spawn = *s;
      t.spawn_k = e.k;
    } else if (const auto* c = std::get_if<world::ContactEv>(&e.data)) {
      auto& t = out[c->trial];
      if (!t.spawn) throw MalformedLog("contact before spawn in trial " + std::to_string(c->trial));
      if (t.contact) throw MalformedLog("trial " + std::to_string(c->trial) + " has two contacts");
      t.contact = *c;
      t.contact_k = e.k;
    } else if (const auto* x = std::get_if<world::CrossroadEv>(&e.data)) {
      out[x->trial].crossroads.push_back(*x);
    }
  }
  return out;
}

inline void check_log(const world::SessionLog& log, const WorldSpec& w) {
  if (log.header.mode != Mode::Navigation) throw MalformedLog("not a navigation log");
  if (log.header.world_hash != world::hex64(world::world_hash(w))) {
    throw MalformedLog("log was recorded on a different world");
  }
  if (log.ticks.empty()) throw MalformedLog("log has no tick samples");
  for (std::size_t i = 0; i < log.ticks.size(); ++i) {
    if (log.ticks[i].k != static_cast<long>(i)) throw MalformedLog("tick samples are not consecutive");
  }
}

inline TrialOutcome classify(const world::SessionLog& log, const WorldSpec& w, int trial, const TrialSpan& span) {
  if (!span.spawn || !span.contact) {
    throw MalformedLog("trial " + std::to_string(trial) + " does not end in contact");
  }
  const auto last = static_cast<long>(log.ticks.size()) - 1;
  if (span.contact_k > last || span.spawn_k < 0) throw MalformedLog("trial events outside the tick range");
  TrialOutcome out;
  out.trial = trial;
  for (long k = span.spawn_k + 1; k <= span.contact_k; ++k) {
    const auto& a = log.ticks[static_cast<std::size_t>(k - 1)].pose;
    const auto& b = log.ticks[static_cast<std::size_t>(k)].pose;
    out.travel_distance += std::hypot(b.x - a.x, b.y - a.y);
  }
  out.arrival_time = static_cast<double>(span.contact_k - span.spawn_k) * log.header.tick;
  const auto& start = log.ticks[static_cast<std::size_t>(span.spawn_k)].pose;
  const Cell goal = cell_of(w, span.spawn->x, span.spawn->y);
  const DistanceField field(w, goal);
  out.shortest_distance = field.at(cell_of(w, start.x, start.y));
  if (out.shortest_distance == kUnreachable) throw NoPath("trial start cannot reach its target");
  for (const auto& x : span.crossroads) {
    Choice c{x, !field.on_shortest_route(x.cell, x.dir)};
    out.wrong_turns += c.wrong ? 1 : 0;
    out.choices.push_back(c);
  }
  out.cls = class_for(out.wrong_turns);
  out.front_back_err = detect_front_back_err(out.choices);
  return out;
}

}  // namespace detail

inline TrialOutcome classify_trial(const world::SessionLog& log, const WorldSpec& w, int trial) {
  detail::check_log(log, w);
  const auto spans = detail::split_trials(log);
  const auto it = spans.find(trial);
  if (it == spans.end()) throw MalformedLog("no trial " + std::to_string(trial) + " in log");
  return detail::classify(log, w, trial, it->second);
}

/// Every trial of the log that reached its target, in order. A trailing
/// unfinished trial of an interrupted session is skipped; a gap is an error.
inline std::vector<TrialOutcome> classify_trials(const world::SessionLog& log, const WorldSpec& w) {
  detail::check_log(log, w);
  const auto spans = detail::split_trials(log);
  std::vector<TrialOutcome> out;
  bool open_seen = false;
  for (const auto& [trial, span] : spans) {
    if (trial >= log.header.trial_count) continue;
    if (!span.contact) {
      open_seen = true;
      continue;
    }
    if (open_seen) throw MalformedLog("trial " + std::to_string(trial) + " follows an unfinished trial");
    out.push_back(detail::classify(log, w, trial, span));
  }
  if (log.complete && static_cast<int>(out.size()) != log.header.trial_count) {
    throw MalformedLog("complete log is missing trials");
  }
  return out;
}

struct ClassCounts {
  int perfect = 0;
  int good = 0;
  int miss = 0;
  int total() const { return perfect + good + miss; }
};

inline ClassCounts count_classes(const std::vector<TrialOutcome>& trials) {
  ClassCounts c;
  for (const auto& t : trials) {
    switch (t.cls) {
      case TrialClass::Perfect: ++c.perfect; break;
      case TrialClass::Good: ++c.good; break;
      case TrialClass::Miss: ++c.miss; break;
    }
  }
  return c;
}

struct FrontDetectSummary {
  double mean_abs = 0.0;
  double pct_within_30 = 0.0;  // fraction in [0, 1]
  std::size_t n = 0;
};

inline FrontDetectSummary front_detect_summary(const std::vector<double>& errors) {
  if (errors.empty()) throw std::domain_error("front_detect_summary: no errors");
  FrontDetectSummary s;
  int within = 0;
  for (double e : errors) {
    s.mean_abs += std::abs(e);
    within += std::abs(e) < 30.0 ? 1 : 0;
  }
  s.n = errors.size();
  s.mean_abs /= static_cast<double>(s.n);
  s.pct_within_30 = static_cast<double>(within) / static_cast<double>(s.n);
  return s;
}

inline std::vector<double> answer_errors(const world::SessionLog& log) {
  std::vector<double> out;
  for (const auto& e : log.events) {
    if (const auto* a = std::get_if<world::AnswerEv>(&e.data)) out.push_back(a->error);
  }
  return out;
}

}  // namespace hapnav::eval

#endif  // HAPNAV_EVAL_TRIAL_HPP
