// Copyright 2026 The MotionStream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "motionstream/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include <json.hpp>

#include "motionstream/error.hpp"

namespace motionstream {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

std::string errno_text() { return std::strerror(errno); }

bool send_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    data.remove_prefix(static_cast<std::size_t>(n));
  }
  return true;
}

struct Client {
  int fd = -1;
  int id = 0;
  std::mutex write_mu;
  std::atomic<bool> open{true};

  ~Client() {
    if (fd >= 0) ::close(fd);
  }
  bool send(std::string_view line) {
    if (!open.load()) return false;
    std::lock_guard lock(write_mu);
    if (!send_all(fd, line)) {
      hang_up();
      return false;
    }
    return true;
  }
  void hang_up() {
    if (open.exchange(false)) ::shutdown(fd, SHUT_RDWR);
  }
};

}  // namespace

struct StreamServer::Impl {
  ServerConfig config;
  SkeletonSpec skeleton;
  std::shared_ptr<const MotionGenerator> generator;
  RawMotionFrame seed_pose;
  int block_frames = 0;
  Clock::duration frame_period{};
  Clock::duration block_period{};

  MotionBuffer buffer;
  Clock::time_point t0;
  std::atomic<bool> stopping{false};
  std::atomic<bool> started{false};
  std::atomic<long long> emitted{0};
  std::mutex wake_mu;
  std::condition_variable wake;

  // Pending command slot: last writer wins.
  std::mutex slot_mu;
  std::string slot_text;
  long long slot_seq = 0;

  std::mutex clients_mu;
  std::vector<std::shared_ptr<Client>> clients;
  std::vector<std::thread> readers;
  int next_client = 1;

  mutable std::mutex log_mu;
  std::vector<std::string> log_lines;
  std::ofstream log_file;

  int listen_fd = -1;
  std::thread accept_thread, generator_thread, emitter_thread;

  Impl(ServerConfig c, SkeletonSpec s, std::shared_ptr<const MotionGenerator> g, RawMotionFrame seed)
      : config(std::move(c)),
        skeleton(std::move(s)),
        generator(std::move(g)),
        seed_pose(std::move(seed)),
        buffer(StreamFrame{seed_pose, -1, config.idle_command}, config.buffer_blocks) {}

  double now_ms() const {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }

  void log(json event) {
    event["t_ms"] = now_ms();
    std::string line = event.dump(-1, ' ', false, json::error_handler_t::replace);
    std::lock_guard lock(log_mu);
    if (log_file.is_open()) log_file << line << '\n' << std::flush;
    log_lines.push_back(std::move(line));
  }

  // Sleeps until `t` or until stop is requested; false when stopping.
  bool sleep_until(Clock::time_point t) {
    std::unique_lock lock(wake_mu);
    return !wake.wait_until(lock, t, [&] { return stopping.load(); });
  }

  void broadcast(const std::string& line) {
    std::vector<std::shared_ptr<Client>> snapshot;
    {
      std::lock_guard lock(clients_mu);
      snapshot = clients;
    }
    for (const auto& c : snapshot) c->send(line);
  }

  void generator_loop() {
    RolloutState state = init_rollout(seed_pose, kHistoryFrames);
    std::mt19937_64 rng(config.seed);
    for (long long step = 0;; ++step) {
      if (!sleep_until(t0 + step * block_period)) return;
      std::string command;
      long long seq = 0;
      {
        std::lock_guard lock(slot_mu);
        command = slot_text;
        seq = slot_seq;
      }
      try {
        RolloutBlock block = rollout_step(state, *generator, command, rng);
        std::vector<StreamFrame> frames;
        for (std::size_t i = 0; i < block.raw.size(); ++i) {
          frames.push_back({block.raw[i], block.first_frame + static_cast<long long>(i), command});
        }
        buffer.push_block(std::move(frames));
        log({{"event", "step"},
             {"step", step},
             {"first_frame", block.first_frame},
             {"command", command},
             {"seq", seq},
             {"embed_ms", block.stats.embed_ms},
             {"generator_ms", block.stats.generator_ms}});
      } catch (const Error& e) {
        // The emitter keeps running on held frames; the failure is reported.
        log({{"event", "error"}, {"code", error_code_name(e.code())}, {"message", e.what()}});
        broadcast(error_message(e.code(), e.what()));
        return;
      }
    }
  }

  StatusInfo status(long long frame_index) const {
    return {buffer.depth_frames(), buffer.underrun_count(), buffer.overrun_count(),
            std::chrono::duration<double, std::milli>(block_period).count(), frame_index};
  }

  void emitter_loop() {
    std::string last_command;
    bool first = true;
    for (long long i = 0;; ++i) {
      if (!sleep_until(t0 + block_period + i * frame_period)) return;
      const PopResult pop = buffer.pop_frame();
      broadcast(frame_message({i, now_ms(), pop.frame, pop.held}));
      emitted.store(i + 1);
      if (pop.held) log({{"event", "underrun"}, {"frame_index", i}});
      if (!pop.held && (first || pop.frame.command != last_command)) {
        log({{"event", "command_active"},
             {"frame_index", i},
             {"motion_index", pop.frame.motion_index},
             {"command", pop.frame.command}});
        last_command = pop.frame.command;
        first = false;
      }
      if (config.status_every_frames > 0 && (i + 1) % config.status_every_frames == 0) {
        broadcast(status_message(status(i)));
      }
    }
  }

  void handle_line(const std::shared_ptr<Client>& client, std::string_view line) {
    try {
      const InboundMessage m = parse_inbound(line);
      if (m.type == InboundMessage::Type::kCommand) {
        long long seq = 0;
        {
          std::lock_guard lock(slot_mu);
          slot_text = m.text;
          seq = ++slot_seq;
        }
        json event = {{"event", "command_received"}, {"seq", seq}, {"text", m.text},
                      {"client", client->id}};
        if (m.client_time_ms) event["client_time_ms"] = *m.client_time_ms;
        log(std::move(event));
      } else {
        log({{"event", "ping"}, {"client", client->id}, {"nonce", json::parse(m.nonce)}});
        client->send(pong_message(m.nonce, now_ms()));
        log({{"event", "pong"}, {"client", client->id}, {"nonce", json::parse(m.nonce)}});
      }
    } catch (const Error& e) {
      log({{"event", "error"},
           {"client", client->id},
           {"code", error_code_name(e.code())},
           {"message", e.what()}});
      client->send(error_message(e.code(), e.what()));
    }
  }

  void reader_loop(std::shared_ptr<Client> client) {
    std::string pending;
    char buf[4096];
    while (!stopping.load() && client->open.load()) {
      pollfd p{client->fd, POLLIN, 0};
      const int r = ::poll(&p, 1, 100);
      if (r < 0 && errno != EINTR) break;
      if (r <= 0) continue;
      const ssize_t n = ::recv(client->fd, buf, sizeof buf, 0);
      if (n <= 0) break;
      pending.append(buf, static_cast<std::size_t>(n));
      std::size_t pos;
      while ((pos = pending.find('\n')) != std::string::npos) {
        std::string line = pending.substr(0, pos);
        pending.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) handle_line(client, line);
      }
      if (pending.size() > kMaxLineBytes) {
        client->send(error_message(ErrorCode::kFormat, "line exceeds " +
                                                           std::to_string(kMaxLineBytes) +
                                                           " bytes without a newline"));
        break;
      }
    }
    client->hang_up();
    std::lock_guard lock(clients_mu);
    std::erase(clients, client);
  }

  void accept_loop(const std::string& hello) {
    while (!stopping.load()) {
      pollfd p{listen_fd, POLLIN, 0};
      const int r = ::poll(&p, 1, 100);
      if (r <= 0) continue;
      const int fd = ::accept(listen_fd, nullptr, nullptr);
      if (fd < 0) continue;
      const int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      timeval tv{1, 0};
      ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
      auto client = std::make_shared<Client>();
      client->fd = fd;
      std::lock_guard lock(clients_mu);
      client->id = next_client++;
      if (!client->send(hello)) continue;
      clients.push_back(client);
      readers.emplace_back([this, client] { reader_loop(client); });
    }
  }

  int bind_listen() {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(config.port);
    const int rc = ::getaddrinfo(config.host.c_str(), port.c_str(), &hints, &res);
    require(rc == 0, ErrorCode::kNetwork,
            "cannot resolve " + config.host + ": " + ::gai_strerror(rc));
    std::string why = "no address";
    for (addrinfo* a = res; a; a = a->ai_next) {
      const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      const int one = 1;
      ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
      if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 16) == 0) {
        ::freeaddrinfo(res);
        listen_fd = fd;
        sockaddr_storage addr{};
        socklen_t len = sizeof addr;
        ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
        return ntohs(addr.ss_family == AF_INET6
                         ? reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port
                         : reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
      }
      why = errno_text();
      ::close(fd);
    }
    ::freeaddrinfo(res);
    fail(ErrorCode::kNetwork, "cannot listen on " + config.host + ":" + port + ": " + why);
  }
};

StreamServer::StreamServer(ServerConfig config, SkeletonSpec skeleton,
                           std::shared_ptr<const MotionGenerator> generator,
                           RawMotionFrame seed_pose) {
  require(generator != nullptr, ErrorCode::kInvalidArgument, "server needs a generator");
  require(config.frame_rate > 0, ErrorCode::kInvalidArgument, "frame rate must be positive");
  skeleton.validate();
  require(seed_pose.q.size() == skeleton.num_dofs(), ErrorCode::kDimensionMismatch,
          "seed pose does not match the skeleton");
  impl_ = std::make_unique<Impl>(std::move(config), std::move(skeleton), std::move(generator),
                                 std::move(seed_pose));
  impl_->slot_text = impl_->config.idle_command;
  impl_->block_frames = impl_->generator->future_frames();
  const auto frame_ns = std::chrono::nanoseconds(
      static_cast<long long>(std::llround(1e9 / impl_->config.frame_rate)));
  impl_->frame_period = frame_ns;
  impl_->block_period = frame_ns * impl_->block_frames;
}

StreamServer::~StreamServer() { stop(); }

void StreamServer::start() {
  Impl& s = *impl_;
  require(!s.started.exchange(true), ErrorCode::kInvalidArgument, "server already started");
  port_ = s.bind_listen();
  if (!s.config.log_path.empty()) {
    s.log_file.open(s.config.log_path, std::ios::trunc);
    require(s.log_file.is_open(), ErrorCode::kIo,
            "cannot open session log " + s.config.log_path.string());
  }
  s.t0 = Clock::now();
  s.log({{"event", "session_start"},
         {"seed", s.config.seed},
         {"frame_rate", s.config.frame_rate},
         {"block_frames", s.block_frames},
         {"idle_command", s.config.idle_command},
         {"port", port_}});
  const std::string hello =
      hello_message(s.skeleton, {s.config.frame_rate, s.block_frames, s.config.idle_command});
  s.generator_thread = std::thread([&s] { s.generator_loop(); });
  s.emitter_thread = std::thread([&s] { s.emitter_loop(); });
  s.accept_thread = std::thread([&s, hello] { s.accept_loop(hello); });
}

void StreamServer::stop() {
  if (!impl_ || !impl_->started.load()) return;
  Impl& s = *impl_;
  if (s.stopping.exchange(true)) return;
  s.wake.notify_all();
  if (s.generator_thread.joinable()) s.generator_thread.join();
  if (s.emitter_thread.joinable()) s.emitter_thread.join();
  if (s.accept_thread.joinable()) s.accept_thread.join();
  s.broadcast(status_message(s.status(s.emitted.load() - 1)));
  std::vector<std::thread> readers;
  {
    std::lock_guard lock(s.clients_mu);
    for (const auto& c : s.clients) c->hang_up();
    readers.swap(s.readers);
  }
  for (auto& t : readers) t.join();
  if (s.listen_fd >= 0) ::close(s.listen_fd);
  s.listen_fd = -1;
  s.log({{"event", "session_end"},
         {"frames", s.emitted.load()},
         {"underruns", s.buffer.underrun_count()},
         {"overruns", s.buffer.overrun_count()}});
  std::lock_guard lock(s.log_mu);
  if (s.log_file.is_open()) s.log_file.close();
}

double StreamServer::generator_period_ms() const {
  return std::chrono::duration<double, std::milli>(impl_->block_period).count();
}

long long StreamServer::frames_emitted() const { return impl_->emitted.load(); }

long long StreamServer::underruns() const { return impl_->buffer.underrun_count(); }

std::string StreamServer::session_log() const {
  std::lock_guard lock(impl_->log_mu);
  std::string out;
  for (const auto& l : impl_->log_lines) out += l + "\n";
  return out;
}

// ---- Log analysis ----------------------------------------------------------

namespace {

std::vector<json> parse_log(std::string_view text) {
  std::vector<json> events;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      json j = json::parse(line);
      require(j.is_object() && j.contains("event") && j.contains("t_ms"), ErrorCode::kFormat,
              "session log line " + std::to_string(line_no) + " lacks event or t_ms");
      events.push_back(std::move(j));
    } catch (const json::exception& e) {
      fail(ErrorCode::kFormat,
           "session log line " + std::to_string(line_no) + " is not JSON: " + e.what());
    }
  }
  return events;
}

StageStats stage_stats(const std::vector<double>& v) {
  StageStats s;
  s.n = static_cast<long long>(v.size());
  if (v.empty()) return s;
  for (const double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (const double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

LatencyReport measure_latency(std::string_view session_log, long long min_events) {
  const auto events = parse_log(session_log);
  std::vector<double> embed, gen, e2e;
  std::map<long long, double> received;        // seq -> receipt time
  std::map<long long, long long> step_seq;     // first motion frame -> latched seq
  LatencyReport report;
  try {
    for (const auto& e : events) {
      const std::string type = e["event"].get<std::string>();
      if (type == "step") {
        embed.push_back(e.at("embed_ms").get<double>());
        gen.push_back(e.at("generator_ms").get<double>());
        step_seq[e.at("first_frame").get<long long>()] = e.at("seq").get<long long>();
      } else if (type == "command_received") {
        received[e.at("seq").get<long long>()] = e["t_ms"].get<double>();
      } else if (type == "command_active") {
        const auto it = step_seq.find(e.at("motion_index").get<long long>());
        if (it == step_seq.end()) continue;
        const auto r = received.find(it->second);
        if (r == received.end()) continue;
        e2e.push_back(e["t_ms"].get<double>() - r->second);
        received.erase(r);
      } else if (type == "pong") {
        ++report.pongs;
      }
    }
  } catch (const json::exception& ex) {
    fail(ErrorCode::kFormat, std::string("session log event is missing a field: ") + ex.what());
  }
  require(static_cast<long long>(gen.size()) >= min_events, ErrorCode::kInvalidArgument,
          "latency needs at least " + std::to_string(min_events) + " generator steps, log has " +
              std::to_string(gen.size()));
  report.embed_ms = stage_stats(embed);
  report.generator_ms = stage_stats(gen);
  report.end_to_end_ms = stage_stats(e2e);
  return report;
}

SessionReplayInput replay_input_from_log(std::string_view session_log) {
  SessionReplayInput out;
  bool have_start = false;
  long long expected = 0;
  for (const auto& e : parse_log(session_log)) {
    const std::string type = e["event"].get<std::string>();
    if (type == "session_start") {
      out.seed = e.at("seed").get<std::uint64_t>();
      have_start = true;
    } else if (type == "step") {
      require(e.at("step").get<long long>() == expected, ErrorCode::kFormat,
              "session log skips generator step " + std::to_string(expected));
      out.step_commands.push_back(e.at("command").get<std::string>());
      ++expected;
    }
  }
  require(have_start, ErrorCode::kFormat, "session log has no session_start event");
  return out;
}

// ---- Line client -------------------------------------------------------------

LineClient::LineClient(const std::string& host, int port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
  require(rc == 0, ErrorCode::kNetwork, "cannot resolve " + host + ": " + ::gai_strerror(rc));
  for (addrinfo* a = res; a; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      fd_ = fd;
      break;
    }
    ::close(fd);
  }
  ::freeaddrinfo(res);
  require(fd_ >= 0, ErrorCode::kNetwork,
          "cannot connect to " + host + ":" + std::to_string(port) + ": " + errno_text());
}

LineClient::~LineClient() { close(); }

void LineClient::close() {
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
}

void LineClient::send_line(std::string_view line) {
  std::string data(line);
  if (data.empty() || data.back() != '\n') data.push_back('\n');
  require(fd_ >= 0 && send_all(fd_, data), ErrorCode::kNetwork, "send failed: " + errno_text());
}

std::string LineClient::read_line(std::chrono::milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (true) {
    const auto nl = pending_.find('\n');
    if (nl != std::string::npos) {
      std::string line = pending_.substr(0, nl);
      pending_.erase(0, nl + 1);
      return line;
    }
    require(fd_ >= 0, ErrorCode::kNetwork, "connection is closed");
    const auto left =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
    require(left > 0, ErrorCode::kNetwork, "timed out waiting for a line");
    pollfd p{fd_, POLLIN, 0};
    const int r = ::poll(&p, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    require(r > 0, ErrorCode::kNetwork, "timed out waiting for a line");
    char buf[4096];
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    require(n > 0, ErrorCode::kNetwork, "connection closed by peer");
    pending_.append(buf, static_cast<std::size_t>(n));
  }
}

}  // namespace motionstream
