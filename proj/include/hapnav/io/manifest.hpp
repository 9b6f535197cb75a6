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

#ifndef HAPNAV_IO_MANIFEST_HPP
#define HAPNAV_IO_MANIFEST_HPP

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hapnav/agents/runner.hpp"
#include "hapnav/io/config.hpp"
#include "hapnav/io/log_io.hpp"

#ifndef HAPNAV_VERSION
#define HAPNAV_VERSION "0.0.0"
#endif

namespace hapnav::io {

inline constexpr const char* kManifestFormat = "hapnav-manifest";
inline constexpr int kManifestVersion = 1;

struct RunOutput {
  Condition condition = Condition::HapDir;
  std::uint64_t seed = 0;  // session seed
  std::string log;         // path relative to the manifest
  bool complete = false;

  friend bool operator==(const RunOutput&, const RunOutput&) = default;
};

/// Everything needed to re-run a batch: the config snapshot, the world
/// text itself, and where the logs went.
struct RunManifest {
  RunConfig config;
  std::string world_text;
  std::string world_hash;
  std::string artifact_version = HAPNAV_VERSION;
  std::vector<RunOutput> outputs;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

/// File name of a condition's log, e.g. "navigation-NTHap.ndjson".
inline std::string log_file_name(Mode m, Condition c) {
  std::string cond;
  for (char ch : to_string(c)) {
    if (std::isalnum(static_cast<unsigned char>(ch))) cond += ch;
  }
  return std::string(to_string(m)) + "-" + cond + ".ndjson";
}

inline json to_json(const RunManifest& m) {
  json outs = json::array();
  for (const auto& o : m.outputs) {
    outs.push_back({{"condition", to_string(o.condition)}, {"seed", o.seed}, {"log", o.log}, {"complete", o.complete}});
  }
  return {{"format", kManifestFormat}, {"version", kManifestVersion}, {"artifact_version", m.artifact_version},
          {"seed", m.config.seed},     {"config", to_json(m.config)},    {"world_hash", m.world_hash},
          {"world", m.world_text},     {"outputs", outs}};
}

inline std::string format_manifest(const RunManifest& m) { return to_json(m).dump(2) + "\n"; }

inline RunManifest parse_manifest(const std::string& text, const std::string& source = "manifest") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ConfigError(source, 0, "", "manifest is not valid JSON");
  }
  auto need = [&](const char* key) -> const json& {
    if (!j.is_object() || !j.contains(key)) throw ConfigError(source, 0, std::string("/") + key, "missing");
    return j.at(key);
  };
  if (need("format") != kManifestFormat) throw ConfigError(source, 0, "/format", "not a run manifest");
  if (need("version") != kManifestVersion) throw ConfigError(source, 0, "/version", "unsupported version");
  RunManifest m;
  m.config = parse_config(need("config").dump(), source + "#config");
  m.world_text = need("world").get<std::string>();
  m.world_hash = need("world_hash").get<std::string>();
  m.artifact_version = need("artifact_version").get<std::string>();
  for (const auto& o : need("outputs")) {
    const auto c = parse_condition(o.at("condition").get<std::string>());
    if (!c) throw ConfigError(source, 0, "/outputs", "unknown condition");
    m.outputs.push_back({*c, o.at("seed").get<std::uint64_t>(), o.at("log").get<std::string>(),
                         o.at("complete").get<bool>()});
  }
  const auto w = world::parse_world(m.world_text);
  if (world::hex64(world::world_hash(w)) != m.world_hash) {
    throw ConfigError(source, 0, "/world_hash", "does not match the embedded world");
  }
  return m;
}

inline RunManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open manifest " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.string());
}

/// Runs one agent session per configured condition, writes each log and
/// the manifest into `out_dir`, and returns the manifest.
inline RunManifest simulate(const RunConfig& rc, const world::WorldSpec& w, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  RunManifest m;
  m.config = rc;
  m.world_text = world::format_world(w);
  m.world_hash = world::hex64(world::world_hash(w));
  for (auto c : rc.conditions) {
    const auto cfg = session_config(rc, c);
    const auto log = agents::run_session(w, cfg, rc.agent);
    const auto name = log_file_name(rc.mode, c);
    save_log(out_dir / name, log);
    m.outputs.push_back({c, cfg.rng_seed, name, log.complete});
  }
  std::ofstream(out_dir / "manifest.json", std::ios::binary) << format_manifest(m);
  return m;
}

/// Re-runs a manifest on its embedded world.
inline RunManifest replay(const RunManifest& m, const std::filesystem::path& out_dir) {
  return simulate(m.config, world::parse_world(m.world_text), out_dir);
}

}  // namespace hapnav::io

#endif  // HAPNAV_IO_MANIFEST_HPP
