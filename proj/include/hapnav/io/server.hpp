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

#ifndef HAPNAV_IO_SERVER_HPP
#define HAPNAV_IO_SERVER_HPP

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "hapnav/io/log_io.hpp"
#include "hapnav/io/protocol.hpp"

namespace hapnav::io {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

struct ServeOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8765;      // 0 picks a free port
  double speed = 1.0;              // simulated seconds per wall second
  double linger = 5.0;             // s a disconnected session waits before it is finalized
  std::filesystem::path log_dir;   // empty: logs are not written
  std::size_t queue_cap = 256;     // non-state frames held per connection
  int send_buffer = 0;             // socket send buffer in bytes, 0 keeps the OS default
  Condition condition = Condition::HapDir;
};

struct ServeStats {
  std::size_t connections = 0;
  std::size_t frames_sent = 0;
  std::size_t frames_dropped = 0;
  std::size_t logs_written = 0;
};

/// Websocket endpoint: each connection drives its own LiveSession, ticked
/// on the server's single io thread.
class SessionServer {
 public:
  SessionServer(world::WorldSpec w, RunConfig rc, ServeOptions opt)
      : world_(std::move(w)), rc_(std::move(rc)), opt_(std::move(opt)), acceptor_(io_) {
    const tcp::endpoint ep(net::ip::make_address(opt_.address), opt_.port);
    acceptor_.open(ep.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(ep);
    acceptor_.listen();
    port_ = acceptor_.local_endpoint().port();
    accept();
  }

  ~SessionServer() { stop(); }

  unsigned short port() const { return port_; }

  /// Serves on the calling thread until stop().
  void run() { io_.run(); }

  /// Serves on a background thread.
  void start() {
    thread_ = std::thread([this] { io_.run(); });
  }

  void stop() {
    net::post(io_, [this] {
      beast::error_code ec;
      acceptor_.close(ec);
    });
    io_.stop();
    if (thread_.joinable()) thread_.join();
  }

  ServeStats stats() const {
    std::lock_guard lock(stats_mu_);
    return stats_;
  }

 private:
  class Connection : public std::enable_shared_from_this<Connection> {
   public:
    Connection(SessionServer& srv, tcp::socket sock, std::size_t id)
        : srv_(srv),
          ws_(std::move(sock)),
          timer_(ws_.get_executor()),
          live_(srv.world_, srv.rc_, srv.opt_.condition),
          queue_(srv.opt_.queue_cap),
          id_(id) {}

    void start() {
      if (srv_.opt_.send_buffer > 0) {
        beast::error_code ec;
        beast::get_lowest_layer(ws_).socket().set_option(net::socket_base::send_buffer_size(srv_.opt_.send_buffer), ec);
      }
      ws_.text(true);
      ws_.async_accept([self = shared_from_this()](beast::error_code ec) {
        if (ec) return;
        for (auto& f : self->live_.greet()) self->queue_.push(std::move(f));
        self->flush();
        self->read();
        self->next_tick_ = std::chrono::steady_clock::now();
        self->schedule();
      });
    }

   private:
    void read() {
      ws_.async_read(in_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          self->disconnect();
          return;
        }
        const auto text = beast::buffers_to_string(self->in_.data());
        self->in_.consume(self->in_.size());
        for (auto& f : self->live_.on_message(text)) self->queue_.push(std::move(f));
        self->flush();
        self->read();
      });
    }

    void schedule() {
      const auto period = std::chrono::duration<double>(srv_.rc_.tick / srv_.opt_.speed);
      next_tick_ += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
      timer_.expires_at(next_tick_);
      timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
        if (ec || self->closed_) return;
        for (auto& f : self->live_.tick()) self->queue_.push(std::move(f));
        self->flush();
        if (!self->live_.finished()) self->schedule();
      });
    }

    void flush() {
      if (queue_.dropped() != reported_drops_) {
        srv_.count([&](ServeStats& s) { s.frames_dropped += queue_.dropped() - reported_drops_; });
        reported_drops_ = queue_.dropped();
      }
      if (writing_ || closed_) return;
      auto f = queue_.pop();
      if (!f) return;
      writing_ = true;
      out_ = f->dump();
      ws_.async_write(net::buffer(out_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
        self->writing_ = false;
        if (ec) {
          self->disconnect();
          return;
        }
        self->srv_.count([](ServeStats& s) { ++s.frames_sent; });
        self->flush();
      });
    }

    // the session pauses on disconnect and is finalized after the linger
    void disconnect() {
      if (closed_) return;
      closed_ = true;
      timer_.cancel();
      auto linger = std::make_shared<net::steady_timer>(ws_.get_executor());
      linger->expires_after(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(srv_.opt_.linger)));
      linger->async_wait([self = shared_from_this(), linger](beast::error_code) { self->finalize(); });
    }

    void finalize() {
      if (srv_.opt_.log_dir.empty()) return;
      std::filesystem::create_directories(srv_.opt_.log_dir);
      const auto logs = live_.logs();
      for (std::size_t i = 0; i < logs.size(); ++i) {
        const auto name = "live-" + std::to_string(id_) + "-" + std::to_string(i) + ".ndjson";
        save_log(srv_.opt_.log_dir / name, logs[i]);
        srv_.count([](ServeStats& s) { ++s.logs_written; });
      }
    }

    SessionServer& srv_;
    websocket::stream<beast::tcp_stream> ws_;
    net::steady_timer timer_;
    beast::flat_buffer in_;
    std::string out_;
    LiveSession live_;
    FrameQueue queue_;
    std::size_t id_;
    std::size_t reported_drops_ = 0;
    std::chrono::steady_clock::time_point next_tick_;
    bool writing_ = false;
    bool closed_ = false;
  };

  void accept() {
    acceptor_.async_accept(net::make_strand(io_), [this](beast::error_code ec, tcp::socket sock) {
      if (ec) return;
      std::size_t id = 0;
      count([&](ServeStats& s) { id = s.connections++; });
      std::make_shared<Connection>(*this, std::move(sock), id)->start();
      accept();
    });
  }

  template <class F>
  void count(F f) {
    std::lock_guard lock(stats_mu_);
    f(stats_);
  }

  world::WorldSpec world_;
  RunConfig rc_;
  ServeOptions opt_;
  net::io_context io_;
  tcp::acceptor acceptor_;
  unsigned short port_ = 0;
  std::thread thread_;
  mutable std::mutex stats_mu_;
  ServeStats stats_;
};

}  // namespace hapnav::io

#endif  // HAPNAV_IO_SERVER_HPP
