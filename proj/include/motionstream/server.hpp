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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "motionstream/generator.hpp"
#include "motionstream/kinematics.hpp"
#include "motionstream/motion_buffer.hpp"
#include "motionstream/rollout.hpp"
#include "motionstream/wire.hpp"

namespace motionstream {

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 7878;  // 0 picks a free port
  double frame_rate = kFrameRate;
  std::string idle_command = kIdleCommand;
  std::uint64_t seed = 1;
  int buffer_blocks = kDefaultBufferBlocks;
  int status_every_frames = 50;
  std::filesystem::path log_path;  // JSONL session log; empty keeps it in memory only
};

// Serves one broadcast stream: the generator thread produces a block every
// block_frames / frame_rate seconds (one block ahead of the emitter), the
// emitter sends one frame per 1 / frame_rate seconds, and each connection
// has a reader thread. Commands from any client overwrite one pending slot
// that the generator latches at its next step.
class StreamServer {
 public:
  StreamServer(ServerConfig config, SkeletonSpec skeleton,
               std::shared_ptr<const MotionGenerator> generator, RawMotionFrame seed_pose);
  ~StreamServer();
  StreamServer(const StreamServer&) = delete;
  StreamServer& operator=(const StreamServer&) = delete;

  // Binds and starts all threads; throws kNetwork when binding fails.
  void start();
  // Sends a final status to every client, joins all threads and closes the log.
  void stop();

  int port() const { return port_; }
  double generator_period_ms() const;
  long long frames_emitted() const;
  long long underruns() const;
  std::string session_log() const;  // JSONL events so far

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = 0;
};

// ---- Session log analysis --------------------------------------------------
//
// Events (one JSON object per line, "event" tag, t_ms on the server's
// monotonic clock since session start):
//   session_start {seed, frame_rate, block_frames, idle_command}
//   command_received {seq, text, client, client_time_ms?}
//   step {step, first_frame, command, seq, embed_ms, generator_ms}
//   command_active {frame_index, motion_index, command}
//   underrun {frame_index}
//   ping {client, nonce}, pong {client, nonce}
//   error {client?, code, message}
//   session_end {frames, underruns, overruns}

struct StageStats {
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation; 0 for a single sample
  long long n = 0;
};

// End-to-end latency is command receipt to the first emitted frame that
// carries the command; it stops at frame emission (no client or robot
// time). Commands that were overwritten before latching, or that repeat the
// active command, have no such frame and are not counted.
struct LatencyReport {
  StageStats embed_ms;
  StageStats generator_ms;
  StageStats end_to_end_ms;
  long long pongs = 0;
};

// Needs at least `min_events` generator steps.
LatencyReport measure_latency(std::string_view session_log, long long min_events = 100);

struct SessionReplayInput {
  std::uint64_t seed = 0;
  std::vector<std::string> step_commands;
};

SessionReplayInput replay_input_from_log(std::string_view session_log);

// ---- Line client -------------------------------------------------------------

// Minimal blocking client for tests and tools.
class LineClient {
 public:
  LineClient(const std::string& host, int port);
  ~LineClient();
  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;

  void send_line(std::string_view line);  // appends '\n' if missing
  // Next line without its newline; throws kNetwork on timeout or close.
  std::string read_line(std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));
  void close();

 private:
  int fd_ = -1;
  std::string pending_;
};

}  // namespace motionstream
