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

// hapnav-bench: parallel session loop with per-tick stimulus rendering.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hapnav/bench.hpp"

using namespace hapnav;

int main(int argc, char** argv) {
  CLI::App app{"hapnav-bench: real-time factor of the session loop"};
  std::string config;
  BenchOptions opt;
  double min_speedup = 10.0;
  app.add_option("-c,--config", config, "config file")->check(CLI::ExistingFile);
  app.add_option("--sessions", opt.sessions)->capture_default_str();
  app.add_option("--sim", opt.sim_seconds, "simulated seconds per session")->capture_default_str();
  app.add_option("--block", opt.block, "render block size")->capture_default_str();
  app.add_option("--min-speedup", min_speedup, "fail below this per-session factor")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    const auto rc = config.empty() ? io::RunConfig{} : io::load_config(config);
    const auto res = run_bench(io::resolve_world(rc, std::filesystem::path(config).parent_path()), rc, opt);
    std::cout << "session  condition   sim_s   wall_s   speedup\n";
    for (std::size_t i = 0; i < res.sessions.size(); ++i) {
      const auto& s = res.sessions[i];
      char buf[128];
      std::snprintf(buf, sizeof buf, "%7zu  %-10s %6.1f  %7.3f  %8.1fx\n", i, std::string(to_string(s.condition)).c_str(),
                    s.sim_seconds, s.wall_seconds, s.speedup());
      std::cout << buf;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "min %.1fx, aggregate %.1fx over %.3f s wall, %u hardware threads\n",
                  res.min_speedup(), res.aggregate_speedup(), res.wall_seconds, std::thread::hardware_concurrency());
    std::cout << buf;
    return res.min_speedup() >= min_speedup ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "hapnav-bench: " << e.what() << "\n";
    return 1;
  }
}
