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

// hapnav: simulate | analyze | audio | serve | calibrate
//
// Exit codes: 0 ok, 1 domain error (bad config, corrupt log, failed check),
// 2 usage error.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hapnav/agents/runner.hpp"
#include "hapnav/dsp/loudness.hpp"
#include "hapnav/dsp/multitrack.hpp"
#include "hapnav/dsp/thd.hpp"
#include "hapnav/dsp/wav.hpp"
#include "hapnav/io/config.hpp"
#include "hapnav/io/manifest.hpp"
#include "hapnav/io/report.hpp"
#include "hapnav/io/server.hpp"

namespace fs = std::filesystem;
using namespace hapnav;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loads --config if given, else the built-in defaults. The world path in a
// config resolves relative to the config file.
std::pair<io::RunConfig, fs::path> config_from(const std::string& path) {
  if (path.empty()) return {io::RunConfig{}, fs::path{}};
  return {io::load_config(path), fs::path(path).parent_path()};
}

std::vector<Condition> parse_conditions(const std::vector<std::string>& names) {
  std::vector<Condition> out;
  for (const auto& n : names) {
    const auto c = parse_condition(n);
    if (!c) throw UsageError("unknown condition '" + n + "'");
    if (std::find(out.begin(), out.end(), *c) != out.end()) throw UsageError("condition '" + n + "' given twice");
    out.push_back(*c);
  }
  return out;
}

// ---- simulate ----

struct SimulateArgs {
  std::string config;
  std::string manifest;
  std::string out = "run";
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::vector<std::string> conditions;
  std::string mode;
};

int cmd_simulate(const SimulateArgs& a) {
  io::RunManifest m;
  if (!a.manifest.empty()) {
    if (!a.config.empty() || a.seed || a.trials || !a.conditions.empty() || !a.mode.empty()) {
      throw UsageError("--manifest replays a run as recorded; it takes no config overrides");
    }
    m = io::replay(io::load_manifest(a.manifest), a.out);
  } else {
    auto [rc, base] = config_from(a.config);
    if (a.seed) rc.seed = *a.seed;
    if (a.trials) {
      if (*a.trials < 1) throw io::ConfigError("--trials", 0, "/trial_count", "must be >= 1");
      rc.trial_count = *a.trials;
    }
    if (!a.conditions.empty()) rc.conditions = parse_conditions(a.conditions);
    if (!a.mode.empty()) {
      const auto md = parse_mode(a.mode);
      if (!md) throw UsageError("unknown mode '" + a.mode + "'");
      rc.mode = *md;
    }
    m = io::simulate(rc, io::resolve_world(rc, base), a.out);
  }
  for (const auto& o : m.outputs) {
    std::cout << to_string(o.condition) << "\t" << (fs::path(a.out) / o.log).string() << "\t"
              << (o.complete ? "complete" : "incomplete") << "\n";
  }
  std::cout << "manifest\t" << (fs::path(a.out) / "manifest.json").string() << "\n";
  return 0;
}

// ---- analyze ----

struct AnalyzeArgs {
  std::vector<std::string> inputs;
  std::string world;
  std::string json_out;
  std::string scores;
  std::vector<double> band;
};

int cmd_analyze(const AnalyzeArgs& a) {
  std::vector<fs::path> files;
  std::optional<world::WorldSpec> manifest_world;
  for (const auto& in : a.inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.path().extension() == ".ndjson") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
      if (!manifest_world && fs::exists(p / "manifest.json")) {
        manifest_world = world::parse_world(io::load_manifest(p / "manifest.json").world_text);
      }
    } else if (fs::exists(p)) {
      files.push_back(p);
    } else {
      throw std::runtime_error("no such file " + p.string());
    }
  }
  if (files.empty() && a.scores.empty()) throw UsageError("analyze: no logs given");
  if (!a.band.empty() && a.band.size() != 2) throw UsageError("--band takes LO,HI");

  const auto w = !a.world.empty() ? world::load_world(a.world) : manifest_world ? *manifest_world : world::default_world();
  std::vector<world::SessionLog> logs;
  for (const auto& f : files) logs.push_back(io::load_log(f));
  io::Report r;
  try {
    r = io::build_report(logs, w);
  } catch (const eval::MalformedLog& e) {
    throw eval::MalformedLog(std::string("analyze: ") + e.what());
  }
  if (!a.scores.empty()) r.score_tests = io::score_tests(io::parse_scores(read_text(a.scores), a.scores));

  std::cout << io::format_report(r);
  if (!a.json_out.empty()) {
    const auto text = io::to_json(r).dump(2) + "\n";
    if (a.json_out == "-") {
      std::cout << text;
    } else {
      std::ofstream(a.json_out, std::ios::binary) << text;
    }
  }
  if (a.band.size() == 2) {
    bool ok = !r.navigation.empty();
    for (const auto& row : r.navigation) {
      const double p = row.ratio(eval::TrialClass::Perfect);
      const bool in = p >= a.band[0] && p <= a.band[1];
      ok = ok && in;
      std::cout << "band " << to_string(row.condition) << " perfect " << io::detail::fixed(p, 3) << " in ["
                << a.band[0] << ", " << a.band[1] << "]: " << (in ? "ok" : "OUT") << "\n";
    }
    if (!ok) {
      std::cerr << "hapnav: Perfect ratio outside the band\n";
      return 1;
    }
  }
  return 0;
}

// ---- audio ----

struct AudioArgs {
  std::vector<std::string> tracks;
  bool generate = false;
  std::optional<double> tone;
  double duration = 8.0;
  std::uint64_t seed = 1;
  std::string out;
  bool normalize = false;
  double target = dsp::kDefaultTargetLufs;
  bool thd = false;
  std::string format = "f32";
};

dsp::SampleFormat sample_format(const std::string& s) {
  if (s == "s16") return dsp::SampleFormat::Int16;
  if (s == "s24") return dsp::SampleFormat::Int24;
  if (s == "f32") return dsp::SampleFormat::Float32;
  throw UsageError("--format must be s16, s24 or f32");
}

std::string lufs_text(const std::optional<double>& l) { return l ? io::detail::fixed(*l, 2) : "-inf"; }

int cmd_audio(const AudioArgs& a) {
  const auto fmt = sample_format(a.format);
  const int sources = (a.generate ? 1 : 0) + (a.tone ? 1 : 0) + (a.tracks.empty() ? 0 : 1);
  if (sources != 1) throw UsageError("audio: give track paths, --generate or --tone");
  if ((a.generate || a.tone || a.normalize) && a.out.empty()) throw UsageError("audio: --out DIR is required");
  if (!a.out.empty()) fs::create_directories(a.out);

  struct Named {
    std::string name;
    dsp::AudioBuffer buf;
  };
  std::vector<Named> tracks;

  if (a.generate) {
    dsp::SynthParams sp;
    sp.duration_s = a.duration;
    sp.seed = a.seed;
    auto mt = dsp::synthesize_multitrack(sp);
    if (a.normalize) mt = dsp::normalize_groups(std::move(mt), a.target);
    for (auto g : {dsp::Group::Vox, dsp::Group::Inst, dsp::Group::Mix}) {
      std::string name(dsp::to_string(g));
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::tolower(ch); });
      const auto path = fs::path(a.out) / (name + ".wav");
      dsp::write_wav(path, mt.group(g), fmt);
      tracks.push_back({path.string(), mt.group(g)});
    }
  } else if (a.tone) {
    if (!(*a.tone > 0.0)) throw UsageError("--tone must be > 0 Hz");
    dsp::AudioBuffer buf(48000.0, 1, static_cast<std::size_t>(a.duration * 48000.0));
    for (std::size_t i = 0; i < buf.samples.size(); ++i) {
      buf.samples[i] = static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * *a.tone * static_cast<double>(i) / 48000.0));
    }
    const auto path = fs::path(a.out) / "tone.wav";
    dsp::write_wav(path, buf, fmt);
    tracks.push_back({path.string(), buf});
  } else {
    for (const auto& t : a.tracks) {
      auto buf = dsp::read_wav(t);
      if (a.normalize) {
        auto res = dsp::normalize_loudness(buf, a.target);
        const auto path = fs::path(a.out) / fs::path(t).filename();
        dsp::write_wav(path, res.track, fmt);
        tracks.push_back({path.string(), std::move(res.track)});
      } else {
        tracks.push_back({t, std::move(buf)});
      }
    }
  }

  for (const auto& t : tracks) {
    std::cout << t.name << "\tlufs " << lufs_text(dsp::integrated_loudness(t.buf));
    if (a.thd) {
      std::vector<double> ch0(t.buf.frames());
      for (std::size_t i = 0; i < ch0.size(); ++i) {
        ch0[i] = t.buf.samples[i * static_cast<std::size_t>(t.buf.channels)];
      }
      const auto est = dsp::analyze_harmonics(ch0, t.buf.sample_rate);
      char buf[96];
      std::snprintf(buf, sizeof buf, "\tf0 %.2f Hz\tthd %.3e", est.fundamental_hz, est.thd);
      std::cout << buf;
    }
    std::cout << "\n";
  }
  return 0;
}

// ---- serve ----

std::atomic<bool> g_stop{false};

struct ServeArgs {
  std::string config;
  io::ServeOptions opt;
  std::string condition;
};

int cmd_serve(ServeArgs a) {
  auto [rc, base] = config_from(a.config);
  if (!a.condition.empty()) a.opt.condition = parse_conditions({a.condition}).front();
  if (!(a.opt.speed > 0.0)) throw UsageError("--speed must be > 0");
  io::SessionServer srv(io::resolve_world(rc, base), rc, a.opt);
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  srv.start();
  std::cout << "listening on ws://" << a.opt.address << ":" << srv.port() << std::endl;
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  srv.stop();
  const auto s = srv.stats();
  std::cout << "connections " << s.connections << ", frames sent " << s.frames_sent << ", dropped "
            << s.frames_dropped << ", logs " << s.logs_written << "\n";
  return 0;
}

// ---- calibrate ----

struct CalibrateArgs {
  std::string config;
  std::vector<double> grid{0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
  int trials = 200;
  double target = 20.0;
  std::string write;
  std::string condition = "HapDir";
};

int cmd_calibrate(const CalibrateArgs& a) {
  auto [rc, base] = config_from(a.config);
  if (a.trials < 1) throw UsageError("--trials must be >= 1");
  const auto c = parse_conditions({a.condition}).front();
  const auto w = io::resolve_world(rc, base);
  const auto res = agents::calibrate_amp_jnd(w, io::session_config(rc, c), rc.agent, a.grid, a.target, a.trials);
  std::cout << "amp_jnd   mean_abs  within30\n";
  for (const auto& p : res.sweep) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%7.3f  %8.2f  %8.3f%s\n", p.amp_jnd, p.summary.mean_abs, p.summary.pct_within_30,
                  p.amp_jnd == res.amp_jnd ? "  <" : "");
    std::cout << buf;
  }
  std::cout << "amp_jnd = " << res.amp_jnd << " (mean |error| " << io::detail::fixed(res.mean_abs, 2) << " deg)\n";
  if (!a.write.empty()) {
    rc.agent.amp_jnd = res.amp_jnd;
    std::ofstream(a.write, std::ios::binary) << io::format_config(rc);
    std::cout << "wrote " << a.write << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hapnav: haptic navigation simulator, analysis and live session server"};
  app.require_subcommand(1);
  app.set_version_flag("--version", HAPNAV_VERSION);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "run agent sessions and write logs plus a manifest");
  s->add_option("-c,--config", sim.config, "config file")->check(CLI::ExistingFile);
  s->add_option("-m,--manifest", sim.manifest, "re-run a recorded manifest")->check(CLI::ExistingFile);
  s->add_option("-o,--out", sim.out, "output directory")->capture_default_str();
  s->add_option("-s,--seed", sim.seed, "seed override");
  s->add_option("-n,--trials", sim.trials, "trials per condition");
  s->add_option("--condition", sim.conditions, "condition subset (repeatable)");
  s->add_option("--mode", sim.mode, "navigation or front_detect");

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "tabulate session logs");
  z->add_option("logs", an.inputs, "log files or directories");
  z->add_option("-w,--world", an.world, "world file (default: manifest world or built-in)")->check(CLI::ExistingFile);
  z->add_option("--json", an.json_out, "write records as JSON ('-' for stdout)");
  z->add_option("--scores", an.scores, "questionnaire score CSV")->check(CLI::ExistingFile);
  z->add_option("--band", an.band, "fail unless every Perfect ratio is in LO,HI")->delimiter(',');

  AudioArgs au;
  auto* d = app.add_subcommand("audio", "loudness, normalization and THD of audio tracks");
  d->add_option("tracks", au.tracks, "WAV files");
  d->add_flag("--generate", au.generate, "synthesize the stimulus multitrack");
  d->add_option("--tone", au.tone, "write a sine fixture at this frequency");
  d->add_option("--duration", au.duration, "seconds for --generate/--tone")->capture_default_str();
  d->add_option("--seed", au.seed, "seed for --generate")->capture_default_str();
  d->add_option("-o,--out", au.out, "output directory");
  d->add_flag("--normalize", au.normalize, "normalize to the target loudness");
  d->add_option("--target", au.target, "target LUFS")->capture_default_str();
  d->add_flag("--thd", au.thd, "report THD of the first channel");
  d->add_option("--format", au.format, "output encoding: s16, s24, f32")->capture_default_str();

  ServeArgs sv;
  auto* v = app.add_subcommand("serve", "live session endpoint over websocket");
  v->add_option("-c,--config", sv.config, "config file")->check(CLI::ExistingFile);
  v->add_option("--address", sv.opt.address)->capture_default_str();
  v->add_option("-p,--port", sv.opt.port, "port, 0 picks one")->capture_default_str();
  v->add_option("--speed", sv.opt.speed, "simulated seconds per wall second")->capture_default_str();
  v->add_option("--linger", sv.opt.linger, "seconds before a dropped session is finalized")->capture_default_str();
  v->add_option("--log-dir", sv.opt.log_dir, "where finalized logs go");
  v->add_option("--condition", sv.condition, "initial condition");

  CalibrateArgs cal;
  auto* k = app.add_subcommand("calibrate", "sweep the agent's amp_jnd against front-detect error");
  k->add_option("-c,--config", cal.config, "config file")->check(CLI::ExistingFile);
  k->add_option("--grid", cal.grid, "amp_jnd values")->delimiter(',');
  k->add_option("--trials", cal.trials)->capture_default_str();
  k->add_option("--target", cal.target, "target mean |error| in degrees")->capture_default_str();
  k->add_option("--condition", cal.condition)->capture_default_str();
  k->add_option("--write", cal.write, "write the config with the chosen amp_jnd");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (s->parsed()) return cmd_simulate(sim);
    if (z->parsed()) return cmd_analyze(an);
    if (d->parsed()) return cmd_audio(au);
    if (v->parsed()) return cmd_serve(sv);
    if (k->parsed()) return cmd_calibrate(cal);
  } catch (const UsageError& e) {
    std::cerr << "hapnav: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "hapnav: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
