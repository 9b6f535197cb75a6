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

#ifndef HAPNAV_AGENTS_RUNNER_HPP
#define HAPNAV_AGENTS_RUNNER_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "hapnav/agents/agent.hpp"
#include "hapnav/eval/trial.hpp"
#include "hapnav/world/session.hpp"

namespace hapnav::agents {

/// Agent noise draws come from their own stream so that the target
/// sequence of a seed does not depend on the agent.
inline std::uint64_t agent_seed(std::uint64_t session_seed) { return mix_seed(session_seed ^ 0x6167656e74ULL); }

/// Runs one agent-driven session to completion. A session that exceeds
/// max_trial_time per trial on average is cut off and left incomplete.
inline world::SessionLog run_session(const world::WorldSpec& w, const world::SessionConfig& cfg,
                                     const AgentParams& params) {
  world::Session s(w, cfg, "agent");
  const world::Observation obs(s);
  const auto limit = static_cast<long>(std::ceil(params.max_trial_time * 2.0 / cfg.tick)) * cfg.trial_count;
  if (cfg.mode == Mode::FrontDetect) {
    BalanceSeeker agent(params, agent_seed(cfg.rng_seed));
    while (!s.finished() && s.k() < limit) s.tick(agent.act(obs));
  } else {
    Navigator agent(params, agent_seed(cfg.rng_seed));
    while (!s.finished() && s.k() < limit) s.tick(agent.act(obs));
  }
  return s.log();
}

struct CalibrationPoint {
  double amp_jnd = 0.0;
  eval::FrontDetectSummary summary;
};

struct CalibrationResult {
  double amp_jnd = 0.0;
  double mean_abs = 0.0;
  std::vector<CalibrationPoint> sweep;
};

/// Front-detect run of `trials` answers at one amp_jnd.
inline eval::FrontDetectSummary front_detect_run(const world::WorldSpec& w, world::SessionConfig cfg,
                                                 AgentParams params, double amp_jnd, int trials) {
  cfg.mode = Mode::FrontDetect;
  cfg.trial_count = trials;
  params.amp_jnd = amp_jnd;
  return eval::front_detect_summary(eval::answer_errors(run_session(w, cfg, params)));
}

/// Sweeps amp_jnd over `grid` and keeps the value whose mean absolute
/// front-detect error lands closest to `target_deg`.
inline CalibrationResult calibrate_amp_jnd(const world::WorldSpec& w, const world::SessionConfig& cfg,
                                           const AgentParams& params, const std::vector<double>& grid,
                                           double target_deg = 20.0, int trials = 200) {
  if (grid.empty()) throw std::domain_error("calibrate: empty grid");
  CalibrationResult res;
  double best = 1e300;
  for (double a : grid) {
    const auto s = front_detect_run(w, cfg, params, a, trials);
    res.sweep.push_back({a, s});
    if (std::abs(s.mean_abs - target_deg) < best) {
      best = std::abs(s.mean_abs - target_deg);
      res.amp_jnd = a;
      res.mean_abs = s.mean_abs;
    }
  }
  return res;
}

}  // namespace hapnav::agents

#endif  // HAPNAV_AGENTS_RUNNER_HPP
