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

#include "hapnav/io/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "hapnav/io/manifest.hpp"

namespace hapnav::io {
namespace {

const char* kMinimal = R"({"format": "hapnav-config", "version": 1})";

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("hapnav_config_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

ConfigError error_of(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "no error for " << text;
  return ConfigError("", 0, "", "");
}

TEST(Config, MinimalUsesDefaults) {
  const auto rc = parse_config(kMinimal);
  EXPECT_EQ(rc, RunConfig{});
  EXPECT_EQ(rc.conditions.size(), 4u);
  EXPECT_EQ(rc.trial_count, 24);
  EXPECT_DOUBLE_EQ(rc.modulation.alpha, 0.1);
}

TEST(Config, RoundTrip) {
  RunConfig rc;
  rc.world = "worlds/x.world";
  rc.mode = Mode::FrontDetect;
  rc.conditions = {Condition::NTHap, Condition::HapDirDist};
  rc.trial_count = 7;
  rc.seed = 99;
  rc.modulation.alpha = 0.25;
  rc.agent.amp_jnd = 1.0;
  rc.agent.front_back_confusion_p = 0.05;
  EXPECT_EQ(parse_config(format_config(rc)), rc);
}

TEST(Config, TrialCountZeroNamesFieldAndLine) {
  const auto e = error_of("{\n  \"format\": \"hapnav-config\",\n  \"version\": 1,\n  \"trial_count\": 0\n}\n");
  EXPECT_EQ(e.field(), "/trial_count");
  EXPECT_EQ(e.line(), 4);
  EXPECT_STREQ(e.what(), "t.json:4: /trial_count: must be >= 1");
}

TEST(Config, NestedFieldLine) {
  const auto e = error_of(
      "{\"format\": \"hapnav-config\", \"version\": 1,\n"
      " \"agent\": {\n"
      "   \"turn_rate\": 90,\n"
      "   \"amp_jnd\": -1\n"
      " }\n}");
  EXPECT_EQ(e.field(), "/agent/amp_jnd");
  EXPECT_EQ(e.line(), 4);
}

TEST(Config, ConditionArrayElement) {
  const auto e = error_of(
      "{\"format\": \"hapnav-config\", \"version\": 1,\n"
      " \"conditions\": [\n  \"NT\",\n  \"Loud\"\n ]}");
  EXPECT_EQ(e.field(), "/conditions/1");
  EXPECT_EQ(e.line(), 4);
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "conditions": ["NT", "NT"]})").field(),
            "/conditions/1");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "conditions": []})").field(), "/conditions");
}

TEST(Config, TypeAndUnknownFieldErrors) {
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "seed": "one"})").field(), "/seed");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "seed": -3})").field(), "/seed");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "tick": 0})").field(), "/tick");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "colour": 1})").field(), "/colour");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "agent": {"speed": 1}})").field(), "/agent/speed");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "modulation": 3})").field(), "/modulation");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "modulation": {"c_min": 2}})").field(),
            "/modulation");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 1, "mode": "run"})").field(), "/mode");
}

TEST(Config, FormatAndVersion) {
  EXPECT_EQ(error_of(R"({"version": 1})").field(), "/format");
  EXPECT_EQ(error_of(R"({"format": "hapnav-config", "version": 2})").field(), "/version");
  EXPECT_EQ(error_of("[1, 2]").field(), "");
}

TEST(Config, SyntaxErrorLine) {
  const auto e = error_of("{\n\"format\": \"hapnav-config\",\n\"version\": 1,,\n}");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.field(), "");
}

TEST(Config, LocateFields) {
  const auto m = detail::locate_fields("{\"a\": {\"b\": [1,\n 2, {\"c\": \"x,y\"}]},\n \"d/e\": null}");
  EXPECT_EQ(m.at("/a"), 1);
  EXPECT_EQ(m.at("/a/b/0"), 1);
  EXPECT_EQ(m.at("/a/b/1"), 2);
  EXPECT_EQ(m.at("/a/b/2/c"), 2);
  EXPECT_EQ(m.at("/d~1e"), 3);
}

TEST(Config, ConditionSeedsAreDistinctAndStable) {
  std::set<std::uint64_t> seen;
  for (auto c : kAllConditions) seen.insert(condition_seed(1, c));
  EXPECT_EQ(seen.size(), 4u);
  RunConfig rc;
  rc.conditions = {Condition::HapDir};
  EXPECT_EQ(session_config(rc, Condition::HapDir).rng_seed, condition_seed(1, Condition::HapDir));
}

TEST(Config, WorldResolution) {
  const auto dir = scratch("world");
  std::ofstream(dir / "w.world") << world::format_world(world::default_world());
  RunConfig rc;
  rc.world = "w.world";
  EXPECT_EQ(world::world_hash(resolve_world(rc, dir)), world::world_hash(world::default_world()));
  rc.world = "missing.world";
  EXPECT_ANY_THROW(resolve_world(rc, dir));
}

TEST(Manifest, SimulateWritesLogsAndReplaysByteIdentical) {
  RunConfig rc;
  rc.trial_count = 3;
  rc.agent.amp_jnd = 1.0;
  rc.agent.front_back_confusion_p = 0.05;
  const auto a = scratch("run_a"), b = scratch("run_b");
  const auto m = simulate(rc, world::default_world(), a);
  ASSERT_EQ(m.outputs.size(), 4u);
  for (const auto& o : m.outputs) {
    EXPECT_TRUE(std::filesystem::exists(a / o.log));
    EXPECT_TRUE(o.complete);
  }
  const auto back = load_manifest(a / "manifest.json");
  EXPECT_EQ(back, m);
  replay(back, b);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  for (const auto& o : m.outputs) EXPECT_EQ(slurp(a / o.log), slurp(b / o.log)) << o.log;
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
}

TEST(Manifest, RejectsTamperedWorld) {
  RunManifest m;
  m.world_text = world::format_world(world::default_world());
  m.world_hash = "0123456789abcdef";
  EXPECT_THROW(parse_manifest(format_manifest(m)), ConfigError);
  EXPECT_THROW(parse_manifest("{}"), ConfigError);
}

TEST(Manifest, LogFileNames) {
  EXPECT_EQ(log_file_name(Mode::Navigation, Condition::NTHap), "navigation-NTHap.ndjson");
  EXPECT_EQ(log_file_name(Mode::FrontDetect, Condition::HapDirDist), "front_detect-HapDirDist.ndjson");
}

}  // namespace
}  // namespace hapnav::io
