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

// Acceptance run: one PASS/FAIL line per primary criterion.
//
// Exit status is 0 when every criterion passes or fails only on a check
// listed as known infeasible (see README, "Known failures").

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hapnav/agents/runner.hpp"
#include "hapnav/bench.hpp"
#include "hapnav/dsp/loudness.hpp"
#include "hapnav/dsp/thd.hpp"
#include "hapnav/dsp/vibration.hpp"
#include "hapnav/eval/stats.hpp"
#include "hapnav/eval/trial.hpp"
#include "hapnav/io/config.hpp"
#include "hapnav/io/manifest.hpp"
#include "hapnav/modulation.hpp"
#include "hapnav/world/locomotion.hpp"
#include "hapnav/world/session.hpp"

using namespace hapnav;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;
  // checks that failed but are listed as infeasible by construction
  std::vector<std::string> known_infeasible;
  std::vector<std::string> failed;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failed.push_back(what);
    }
  }
  void check_infeasible(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      known_infeasible.push_back(what);
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

agents::AgentParams calibrated_agent() {
  agents::AgentParams p;
  p.amp_jnd = 1.0;
  p.front_back_confusion_p = 0.05;
  return p;
}

// ---- gain law ----

Outcome gain_law() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  ModulationConfig cfg;
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> rd(0.0, 30.0), td(-180.0, 180.0);
  double worst_dir = 0.0, worst_total = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double r = rd(gen);
    const double th = wrap_angle(td(gen));
    const auto d = direction_gains(th);
    const auto g = gains({r, th}, cfg);
    worst_dir = std::max(worst_dir, std::abs(d.left + d.right - 1.0));
    worst_total = std::max(worst_total, std::abs(g.left + g.right - cfg.c_max * distance_gain(r, cfg)));
  }
  o.check(worst_dir <= 1e-12, "a_L + a_R = 1");
  o.check(worst_total <= 1e-12, "G_L + G_R = c_max A(r)");

  // printed piecewise law; -180 wraps onto 180
  struct B {
    double theta, left, right;
  };
  const B bounds[] = {{-180.0, 1.0, 0.0}, {-90.0, 0.0, 1.0}, {0.0, 0.5, 0.5}, {90.0, 1.0, 0.0}, {180.0, 1.0, 0.0}};
  for (const auto& b : bounds) {
    const auto d = direction_gains(wrap_angle(b.theta));
    o.check(d.left == b.left && d.right == b.right, "boundary " + fmt("%g", b.theta));
  }
  const double dt = seconds_since(t0);
  o.check(dt < 1.0, "runtime < 1 s");
  o.detail = "max dev " + fmt("%.1e", std::max(worst_dir, worst_total)) + ", " + fmt("%.3f s", dt);
  return o;
}

// ---- distance floor ----

Outcome distance_floor() {
  Outcome o;
  ModulationConfig cfg;
  cfg.c_max = 1.0;
  cfg.c_min = 0.2;
  const double reach = (1.0 / cfg.alpha) * (1.0 - 0.2);
  int n = 0;
  for (double r = reach; r < reach + 200.0; r += 0.37, ++n) {
    if (distance_gain(r, cfg) != 0.2) {
      o.check(false, "A(" + fmt("%g", r) + ") = 0.2");
      break;
    }
  }
  o.check(distance_gain(1e9, cfg) == 0.2, "A(1e9) = 0.2");
  ModulationConfig off = cfg;
  off.distance_enabled = false;
  world::SessionConfig hd;
  hd.condition = Condition::HapDir;
  hd.modulation = cfg;
  for (double r = 0.0; r < 100.0; r += 0.5) {
    if (distance_gain(r, hd.effective_modulation()) != 1.0 || distance_gain(r, off) != 1.0) {
      o.check(false, "HapDir A(r) = 1");
      break;
    }
  }
  o.detail = "floor from r = " + fmt("%g m", reach) + ", " + std::to_string(n) + " radii";
  return o;
}

// ---- front detect ----

Outcome front_detect() {
  Outcome o;
  const auto w = world::default_world();
  io::RunConfig rc;
  rc.mode = Mode::FrontDetect;
  const auto cfg = io::session_config(rc, Condition::HapDir);

  const auto t0 = std::chrono::steady_clock::now();
  const auto zero = agents::front_detect_run(w, cfg, agents::AgentParams{}, 0.0, 100);
  const double dt = seconds_since(t0);
  o.check(zero.n == 100, "100 zero-noise answers");
  o.check(zero.mean_abs < 0.5, "zero-noise mean |error| < 0.5");
  o.check(dt < 5.0, "zero-noise runtime < 5 s");

  const auto cal = agents::front_detect_run(w, cfg, calibrated_agent(), 1.0, 200);
  o.check(cal.n == 200, "200 calibrated answers");
  o.check(cal.mean_abs >= 15.0 && cal.mean_abs <= 25.0, "calibrated mean |error| in [15, 25]");
  o.check(cal.pct_within_30 >= 0.80, "calibrated within-30 fraction >= 0.80");
  o.detail = "zero " + fmt("%.3f deg", zero.mean_abs) + " in " + fmt("%.2f s", dt) + "; calibrated " +
             fmt("%.2f deg", cal.mean_abs) + ", within 30 " + fmt("%.3f", cal.pct_within_30);
  return o;
}

// ---- navigation ----

std::vector<std::pair<Condition, std::vector<eval::TrialOutcome>>> navigate(const agents::AgentParams& p) {
  const auto w = world::default_world();
  io::RunConfig rc;
  rc.agent = p;
  std::vector<std::pair<Condition, std::vector<eval::TrialOutcome>>> out;
  for (auto c : rc.conditions) {
    const auto log = agents::run_session(w, io::session_config(rc, c), p);
    out.emplace_back(c, eval::classify_trials(log, w));
  }
  return out;
}

Outcome navigation_zero() {
  Outcome o;
  const auto runs = navigate(agents::AgentParams{});
  const double walk = 100.0 / 60.0;  // m/s
  const double contact = world::default_world().contact_radius;
  double worst = 0.0, literal = 0.0, arrive = 0.0, expect = 0.0;
  int trials = 0, perfect = 0;
  for (const auto& [c, ts] : runs) {
    o.check(ts.size() == 24, std::string(to_string(c)) + " has 24 trials");
    for (const auto& t : ts) {
      ++trials;
      perfect += t.cls == eval::TrialClass::Perfect ? 1 : 0;
      // a trial ends on contact, contact_radius short of the target cell
      worst = std::max(worst, std::abs(t.travel_distance - (t.shortest_distance - contact)));
      literal = std::max(literal, std::abs(t.travel_distance - t.shortest_distance));
      arrive += t.arrival_time;
      expect += t.shortest_distance / walk;
    }
  }
  o.check(perfect == trials, "Perfect = 100%");
  o.check(worst <= world::kStepLength, "|travel - (shortest - contact)| <= one step");
  const double ratio = arrive / expect;
  o.check(std::abs(ratio - 1.0) <= 0.10, "mean arrival within 10% of 100 m/min");
  o.detail = std::to_string(perfect) + "/" + std::to_string(trials) + " Perfect, worst |travel - (shortest - contact)| " +
             fmt("%.3f m", worst) + " (" + fmt("%.3f m", literal) + " to the cell center), arrival/expected " + fmt("%.3f", ratio);
  return o;
}

Outcome navigation_calibrated() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const auto runs = navigate(calibrated_agent());
  const double dt = seconds_since(t0);
  double miss_d = 0.0, perf_d = 0.0;
  int miss_n = 0, perf_n = 0, total = 0;
  std::string rates;
  for (const auto& [c, ts] : runs) {
    const auto k = eval::count_classes(ts);
    total += static_cast<int>(ts.size());
    const double p = ts.empty() ? 0.0 : static_cast<double>(k.perfect) / static_cast<double>(ts.size());
    o.check(p >= 0.70 && p <= 0.95, std::string(to_string(c)) + " Perfect in [0.70, 0.95]");
    rates += std::string(rates.empty() ? "" : " ") + std::string(to_string(c)) + "=" + fmt("%.2f", p);
    for (const auto& t : ts) {
      if (t.cls == eval::TrialClass::Miss) {
        miss_d += t.travel_distance;
        ++miss_n;
      } else if (t.cls == eval::TrialClass::Perfect) {
        perf_d += t.travel_distance;
        ++perf_n;
      }
    }
  }
  o.check(total == 96, "96 trials");
  o.check(miss_n > 0 && perf_n > 0 && miss_d / miss_n > perf_d / perf_n, "Miss distance > Perfect distance");
  o.check(dt < 60.0, "runtime < 60 s");
  o.detail = rates + "; Miss " + (miss_n ? fmt("%.1f m", miss_d / miss_n) : "-") + " vs Perfect " +
             (perf_n ? fmt("%.1f m", perf_d / perf_n) : "-") + "; " + std::to_string(total) + " trials in " +
             fmt("%.2f s", dt);
  return o;
}

// ---- dsp ----

dsp::AudioBuffer stereo_tone(double freq, double amp, double seconds) {
  dsp::AudioBuffer b(48000.0, 2, static_cast<std::size_t>(seconds * 48000.0));
  for (std::size_t i = 0; i < b.frames(); ++i) {
    const auto v = static_cast<float>(amp * std::sin(2.0 * kPi * freq * static_cast<double>(i) / 48000.0));
    b.samples[2 * i] = v;
    b.samples[2 * i + 1] = v;
  }
  return b;
}

Outcome dsp_checks() {
  Outcome o;
  const double fs = 48000.0;
  std::vector<double> sine(96000), square(96000);
  for (std::size_t i = 0; i < sine.size(); ++i) {
    sine[i] = std::sin(2.0 * kPi * 1000.0 * static_cast<double>(i) / fs);
    square[i] = (i % 960) < 480 ? 1.0 : -1.0;
  }
  const double thd_sine = dsp::thd(sine, fs);
  const double thd_square = dsp::thd(square, fs);
  // odd harmonics 3 and 5 of amplitude 1/k
  const double square_oracle = std::sqrt(1.0 / 9.0 + 1.0 / 25.0);
  o.check(thd_sine < 1e-6, "sine THD < 1e-6");
  o.check(std::abs(thd_square - 0.3887) <= 0.001 && std::abs(thd_square - square_oracle) <= 0.001, "square THD");

  dsp::TriaxialRecording rec;
  rec.sample_rate = 1000.0;
  const double amp = 2.5;
  for (int i = 0; i < 10000; ++i) {
    rec.x.push_back(amp * std::sin(2.0 * kPi * 50.0 * i / 1000.0));
    rec.y.push_back(0.0);
    rec.z.push_back(0.0);
  }
  const double acc = dsp::acc_rms(rec);
  o.check(std::abs(acc / (amp / std::sqrt(2.0)) - 1.0) <= 0.001, "ACC_RMS = A/sqrt(2)");

  double worst_norm = 0.0;
  for (double a : {0.01, 0.1, 0.5}) {
    const auto res = dsp::normalize_loudness(stereo_tone(440.0, a, 5.0), -14.0);
    worst_norm = std::max(worst_norm, std::abs(res.output_lufs + 14.0));
  }
  o.check(worst_norm <= 0.1, "normalized to -14 +- 0.1 LU");

  const auto base = stereo_tone(997.0, 0.2, 5.0);
  const double l0 = *dsp::integrated_loudness(base);
  double worst_shift = 0.0;
  for (double g : {0.25, 0.5, 2.0, 3.0}) {
    auto b = base;
    b.scale(g);
    const double l1 = *dsp::integrated_loudness(b);
    worst_shift = std::max(worst_shift, std::abs((l1 - l0) - 20.0 * std::log10(g)));
  }
  o.check(worst_shift <= 0.05, "gain shift = 20 log10 g +- 0.05 LU");
  o.detail = "sine " + fmt("%.1e", thd_sine) + ", square " + fmt("%.5f", thd_square) + ", ACC_RMS ratio " +
             fmt("%.5f", acc / (amp / std::sqrt(2.0))) + ", norm err " + fmt("%.3f LU", worst_norm) + ", gain err " +
             fmt("%.4f LU", worst_shift);
  return o;
}

// ---- statistics ----

// Independent enumeration oracles, doubled midranks keep sums integral.
std::vector<double> doubled_midranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double x : v) {
      less += x < v[i];
      equal += x == v[i];
    }
    r[i] = 2 * less + equal + 1.0;
  }
  return r;
}

double signed_rank_enum(const std::vector<double>& diffs) {
  std::vector<double> d, mag;
  for (double x : diffs) {
    if (x != 0.0) {
      d.push_back(x);
      mag.push_back(std::abs(x));
    }
  }
  if (d.empty()) return 1.0;
  const auto r = doubled_midranks(mag);
  double total = 0, obs = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    total += r[i];
    if (d[i] > 0) obs += r[i];
  }
  std::uint64_t lo = 0, hi = 0;
  const std::uint64_t all = 1ULL << d.size();
  for (std::uint64_t m = 0; m < all; ++m) {
    double s = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (m >> i & 1) s += r[i];
    }
    lo += s <= obs;
    hi += s >= obs;
  }
  (void)total;
  return std::min(1.0, 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(all));
}

double rank_sum_enum(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> all = a;
  all.insert(all.end(), b.begin(), b.end());
  const auto r = doubled_midranks(all);
  double obs = 0;
  for (std::size_t i = 0; i < a.size(); ++i) obs += r[i];
  std::uint64_t lo = 0, hi = 0, count = 0;
  for (std::uint64_t m = 0; m < (1ULL << all.size()); ++m) {
    if (static_cast<std::size_t>(__builtin_popcountll(m)) != a.size()) continue;
    ++count;
    double s = 0;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (m >> i & 1) s += r[i];
    }
    lo += s <= obs;
    hi += s >= obs;
  }
  return std::min(1.0, 2.0 * static_cast<double>(std::min(lo, hi)) / static_cast<double>(count));
}

Outcome statistics() {
  Outcome o;
  std::mt19937 gen(4242);
  int sr_bad = 0, rs_bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> d(static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 8)(gen)));
    for (auto& x : d) x = std::uniform_int_distribution<int>(-5, 5)(gen);
    sr_bad += eval::wilcoxon_signed_rank(d).p_value != signed_rank_enum(d);

    const int n = std::uniform_int_distribution<int>(2, 12)(gen);
    const int n1 = std::uniform_int_distribution<int>(1, n - 1)(gen);
    std::vector<double> a(static_cast<std::size_t>(n1)), b(static_cast<std::size_t>(n - n1));
    for (auto& x : a) x = std::uniform_int_distribution<int>(0, 7)(gen);
    for (auto& x : b) x = std::uniform_int_distribution<int>(0, 7)(gen);
    rs_bad += eval::wilcoxon_rank_sum(a, b).p_value != rank_sum_enum(a, b);
  }
  o.check(sr_bad == 0, "signed-rank matches enumeration");
  o.check(rs_bad == 0, "rank-sum matches enumeration");

  const std::vector<double> p = {0.01, 0.04};
  const auto h = eval::holm_correct(p);
  o.check(h[0] == 0.02 && h[1] == 0.04, "Holm [0.01, 0.04] -> [0.02, 0.04]");
  const auto hh = eval::holm_correct(h);
  o.check_infeasible(hh == h, "Holm idempotent");
  o.detail = std::to_string(sr_bad) + "+" + std::to_string(rs_bad) + " enumeration mismatches; holm(holm([0.01, 0.04])) = [" +
             fmt("%g", hh[0]) + ", " + fmt("%g", hh[1]) + "]";
  return o;
}

// ---- step detection ----

std::vector<double> trace(std::initializer_list<double> peaks) {
  std::vector<double> h(20, 1.0);
  for (double p : peaks) {
    for (int i = 0; i < 10; ++i) h.push_back(1.0 + p * std::sin(kPi * (i + 0.5) / 10.0));
    for (int i = 0; i < 10; ++i) h.push_back(1.0);
  }
  return h;
}

Outcome step_detection() {
  Outcome o;
  const double dt = 1.0 / 30.0;
  const auto one = world::detect_steps(trace({0.12}), 1.0, dt).size();
  const auto none = world::detect_steps(trace({0.09}), 1.0, dt).size();
  const auto two = world::detect_steps(trace({0.12, 0.12}), 1.0, dt).size();
  o.check(one == 1 && none == 0 && two == 2, "1/0/2 steps");

  world::SessionConfig cfg;
  const auto w = world::default_world();
  world::Session s(w, cfg, "acceptance");
  const auto start = s.last_sample().pose;
  s.tick({0.0, true, false});
  double moved = 0.0;
  long ticks = 1;
  for (; ticks < 200; ++ticks) {
    const auto& p = s.last_sample().pose;
    moved = std::hypot(p.x - start.x, p.y - start.y);
    if (std::abs(moved - world::kStepLength) < 1e-9) break;
    s.tick({});
  }
  const double took = static_cast<double>(ticks) * cfg.tick;
  o.check(std::abs(moved - world::kStepLength) < 1e-9, "step advances 1.17 m");
  o.check(std::abs(took - world::kStepDuration) <= cfg.tick, "step takes 0.7 s within one tick");
  o.detail = std::to_string(one) + "/" + std::to_string(none) + "/" + std::to_string(two) + " steps; " +
             fmt("%.4f m", moved) + " in " + std::to_string(ticks) + " ticks (" + fmt("%.3f s", took) + ")";
  return o;
}

// ---- determinism ----

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  Outcome o;
  const auto root = fs::temp_directory_path() / ("hapnav-acceptance-" + std::to_string(::getpid()));
  io::RunConfig rc;
  rc.agent = calibrated_agent();
  rc.seed = 7;
  const auto first = io::simulate(rc, world::default_world(), root / "a");
  const auto manifest = io::load_manifest(root / "a" / "manifest.json");
  const auto second = io::replay(manifest, root / "b");
  const auto third = io::replay(manifest, root / "c");
  std::size_t bytes = 0;
  for (const auto& out : first.outputs) {
    const auto a = slurp(root / "a" / out.log);
    o.check(!a.empty(), out.log + " written");
    o.check(a == slurp(root / "b" / out.log) && a == slurp(root / "c" / out.log), out.log + " byte-identical");
    bytes += a.size();
  }
  o.check(first == second && second == third, "manifests equal");
  fs::remove_all(root);
  o.detail = std::to_string(first.outputs.size()) + " logs, " + std::to_string(bytes) +
             " bytes, replayed twice; primary-only build";
  return o;
}

// ---- performance ----

Outcome performance() {
  Outcome o;
  BenchOptions opt;
  opt.sessions = 10;
  opt.sim_seconds = 60.0;
  const auto res = run_bench(world::default_world(), io::RunConfig{}, opt);
  o.check(res.min_speedup() >= 10.0, "every session >= 10x real time");
  o.detail = "10 sessions, min " + fmt("%.1fx", res.min_speedup()) + ", aggregate " +
             fmt("%.1fx", res.aggregate_speedup()) + " on " + std::to_string(std::thread::hardware_concurrency()) +
             " hardware threads";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"gain-law", gain_law},
      {"distance-floor", distance_floor},
      {"front-detect", front_detect},
      {"navigation-zero-noise", navigation_zero},
      {"navigation-calibrated", navigation_calibrated},
      {"dsp", dsp_checks},
      {"statistics", statistics},
      {"step-detection", step_detection},
      {"determinism", determinism},
      {"performance", performance},
  };
  int unexpected = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.check(false, std::string("threw: ") + e.what());
    }
    std::printf("%s %-22s %s", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    for (const auto& f : o.failed) std::printf(" [failed: %s]", f.c_str());
    for (const auto& f : o.known_infeasible) std::printf(" [known infeasible: %s]", f.c_str());
    std::printf("\n");
    if (!o.failed.empty()) ++unexpected;
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
