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

#ifndef HAPNAV_BENCH_HPP
#define HAPNAV_BENCH_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <thread>
#include <vector>

#include "hapnav/agents/agent.hpp"
#include "hapnav/agents/runner.hpp"
#include "hapnav/dsp/multitrack.hpp"
#include "hapnav/dsp/renderer.hpp"
#include "hapnav/io/config.hpp"

namespace hapnav {

struct BenchOptions {
  int sessions = 10;
  double sim_seconds = 120.0;  // simulated time per session
  std::size_t block = 512;
};

struct BenchSession {
  Condition condition = Condition::HapDir;
  double sim_seconds = 0.0;
  double wall_seconds = 0.0;
  long ticks = 0;
  double haptic_energy = 0.0;  // keeps the render from being optimized out

  double speedup() const { return wall_seconds > 0.0 ? sim_seconds / wall_seconds : HUGE_VAL; }
};

struct BenchResult {
  std::vector<BenchSession> sessions;
  double wall_seconds = 0.0;

  double min_speedup() const {
    double m = HUGE_VAL;
    for (const auto& s : sessions) m = std::min(m, s.speedup());
    return m;
  }
  double aggregate_speedup() const {
    double sim = 0.0;
    for (const auto& s : sessions) sim += s.sim_seconds;
    return wall_seconds > 0.0 ? sim / wall_seconds : HUGE_VAL;
  }
};

namespace detail {

// One agent-driven navigation loop with per-tick stimulus rendering.
// Finished sessions restart on the next seed until the budget is spent.
inline BenchSession bench_one(const world::WorldSpec& w, const io::RunConfig& rc, Condition c,
                              std::shared_ptr<const dsp::MultiTrack> src, const BenchOptions& opt,
                              std::uint64_t seed) {
  BenchSession out;
  out.condition = c;
  dsp::StimulusRenderer renderer(std::move(src), opt.block);
  const auto frames_per_tick = static_cast<std::size_t>(std::lround(renderer.sample_rate() * rc.tick));
  dsp::RenderMeter meter;
  const auto t0 = std::chrono::steady_clock::now();
  const long budget = static_cast<long>(std::ceil(opt.sim_seconds / rc.tick));
  while (out.ticks < budget) {
    auto cfg = io::session_config(rc, c);
    cfg.rng_seed = seed++;
    world::Session s(w, cfg, "bench");
    const world::Observation obs(s);
    agents::Navigator agent(rc.agent, agents::agent_seed(cfg.rng_seed));
    while (!s.finished() && out.ticks < budget) {
      s.tick(agent.act(obs));
      const auto& smp = s.last_sample();
      renderer.render(frames_per_tick, c, smp.gains, smp.rel.theta, meter);
      ++out.ticks;
    }
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.sim_seconds = static_cast<double>(out.ticks) * rc.tick;
  out.haptic_energy = meter.haptic_energy_l + meter.haptic_energy_r;
  return out;
}

}  // namespace detail

/// Runs `sessions` sessions on their own threads at once, cycling through
/// the configured conditions. Each session's speedup is its simulated time
/// over its own wall time, contention included.
inline BenchResult run_bench(const world::WorldSpec& w, const io::RunConfig& rc, const BenchOptions& opt = {}) {
  if (opt.sessions < 1) throw std::domain_error("bench: sessions must be >= 1");
  if (!(opt.sim_seconds > 0.0)) throw std::domain_error("bench: sim_seconds must be > 0");
  dsp::SynthParams sp;
  sp.seed = rc.seed;
  const auto src = std::make_shared<const dsp::MultiTrack>(dsp::normalize_groups(dsp::synthesize_multitrack(sp)));

  BenchResult res;
  res.sessions.resize(static_cast<std::size_t>(opt.sessions));
  std::vector<std::thread> threads;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < opt.sessions; ++i) {
    const auto c = rc.conditions[static_cast<std::size_t>(i) % rc.conditions.size()];
    threads.emplace_back([&, i, c] {
      res.sessions[static_cast<std::size_t>(i)] =
          detail::bench_one(w, rc, c, src, opt, io::condition_seed(rc.seed, c) + static_cast<std::uint64_t>(i) * 1000);
    });
  }
  for (auto& t : threads) t.join();
  res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace hapnav

#endif  // HAPNAV_BENCH_HPP
