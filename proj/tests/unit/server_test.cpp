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

#include "hapnav/io/server.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

namespace hapnav::io {
namespace {

namespace fs = std::filesystem;

class Client {
 public:
  explicit Client(unsigned short port, int rcvbuf = 0) : ws_(io_) {
    tcp::socket& sock = beast::get_lowest_layer(ws_);
    sock.open(tcp::v4());
    if (rcvbuf > 0) sock.set_option(net::socket_base::receive_buffer_size(rcvbuf));
    sock.connect({net::ip::make_address("127.0.0.1"), port});
    ws_.handshake("127.0.0.1", "/");
  }

  json read() {
    beast::flat_buffer buf;
    ws_.read(buf);
    return json::parse(beast::buffers_to_string(buf.data()));
  }

  // reads until a frame satisfies `pred`, failing after `limit` frames
  template <class P>
  json read_until(P pred, int limit = 5000) {
    for (int i = 0; i < limit; ++i) {
      auto f = read();
      if (pred(f)) return f;
    }
    ADD_FAILURE() << "frame not seen";
    return {};
  }

  void send(const std::string& text) { ws_.write(net::buffer(text)); }
  void close() { ws_.close(websocket::close_code::normal); }

 private:
  net::io_context io_;
  websocket::stream<tcp::socket> ws_;
};

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("hapnav_server_test_" + name);
  fs::remove_all(p);
  return p;
}

ServeOptions fast(double speed, const fs::path& logs = {}) {
  ServeOptions o;
  o.port = 0;
  o.speed = speed;
  o.linger = 0.05;
  o.log_dir = logs;
  return o;
}

bool is_state(const json& f) { return f["type"] == "state"; }

TEST(Server, GreetingThenStepMovesOneStepLength) {
  SessionServer srv(world::default_world(), RunConfig{}, fast(10.0));
  srv.start();
  Client c(srv.port());
  EXPECT_EQ(c.read()["type"], "hello");
  EXPECT_EQ(c.read()["type"], "config");
  const auto first = c.read_until(is_state);
  c.send(R"({"type":"input","step":true})");
  const double x0 = first["x"].get<double>();
  const auto moved = c.read_until([&](const json& f) {
    return is_state(f) && std::abs(f["x"].get<double>() - x0 - world::kStepLength) < 1e-9;
  });
  EXPECT_EQ(moved["y"], first["y"]);
  // no further motion without another step
  const auto later = c.read_until([&](const json& f) { return is_state(f) && f["k"] > moved["k"].get<long>() + 10; });
  EXPECT_EQ(later["x"], moved["x"]);
  c.close();
  srv.stop();
}

TEST(Server, MalformedMessageGetsErrorAndSessionContinues) {
  SessionServer srv(world::default_world(), RunConfig{}, fast(10.0));
  srv.start();
  Client c(srv.port());
  c.send("{oops");
  const auto err = c.read_until([](const json& f) { return f["type"] == "error"; });
  EXPECT_EQ(err["code"], "bad_json");
  const auto s1 = c.read_until(is_state);
  const auto s2 = c.read_until(is_state);
  EXPECT_GT(s2["k"].get<long>(), s1["k"].get<long>());
  c.close();
  srv.stop();
}

TEST(Server, StatesStreamAtTickRateWithoutInput) {
  SessionServer srv(world::default_world(), RunConfig{}, fast(1.0));
  srv.start();
  Client c(srv.port());
  const auto t0 = std::chrono::steady_clock::now();
  const auto first = c.read_until(is_state);
  long last = first["k"];
  while (std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(700)) last = c.read_until(is_state)["k"];
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double expected = wall / 0.033;
  EXPECT_NEAR(static_cast<double>(last), expected, 0.25 * expected);
  c.close();
  srv.stop();
}

TEST(Server, DisconnectWritesHumanLog) {
  const auto dir = scratch("logs");
  SessionServer srv(world::default_world(), RunConfig{}, fast(10.0, dir));
  srv.start();
  {
    Client c(srv.port());
    c.send(R"({"type":"input","turn_rate":30})");
    c.read_until([](const json& f) { return is_state(f) && f["k"] >= 20; });
    c.close();
  }
  for (int i = 0; i < 200 && srv.stats().logs_written == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  ASSERT_EQ(srv.stats().logs_written, 1u);
  const auto log = load_log(dir / "live-0-0.ndjson");
  EXPECT_EQ(log.header.source, "human");
  EXPECT_GE(log.ticks.size(), 21u);
  EXPECT_GT(log.ticks.back().pose.heading, 0.0);
  srv.stop();
}

TEST(Server, ConnectionsAreIndependent) {
  SessionServer srv(world::default_world(), RunConfig{}, fast(10.0));
  srv.start();
  Client a(srv.port()), b(srv.port());
  a.send(R"({"type":"input","turn_rate":90})");
  const auto sa = a.read_until([](const json& f) { return is_state(f) && f["k"] >= 15; });
  const auto sb = b.read_until([](const json& f) { return is_state(f) && f["k"] >= 15; });
  EXPECT_NE(sa["heading"], 0.0);
  EXPECT_EQ(sb["heading"], 0.0);
  EXPECT_EQ(srv.stats().connections, 2u);
  a.close();
  b.close();
  srv.stop();
}

TEST(Server, LaggingClientLosesFramesNotMemory) {
  auto opt = fast(400.0);
  opt.send_buffer = 4096;
  SessionServer srv(world::default_world(), RunConfig{}, opt);
  srv.start();
  Client c(srv.port(), 1024);
  std::this_thread::sleep_for(std::chrono::milliseconds(1500));
  const auto st = srv.stats();
  EXPECT_GT(st.frames_dropped, 0u);
  // the client still receives the latest state once it catches up
  const auto s = c.read_until([](const json& f) { return is_state(f) && f["k"] > 1000; }, 100000);
  EXPECT_EQ(s["type"], "state");
  c.close();
  srv.stop();
}

}  // namespace
}  // namespace hapnav::io
