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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motionstream/error.hpp"
#include "motionstream/kinematics.hpp"
#include "motionstream/motion_buffer.hpp"

namespace motionstream {

// Line-delimited JSON, one object per line with a "type" tag.
//
// Server to client:
//   hello  {protocol_version, frame_rate, block_frames, idle_command, n_q, n_c, skeleton}
//   frame  {frame_index, time_ms, root_position[3], root_quaternion[w x y z], q[n_q],
//           contacts[n_c], active_command, motion_index, held}
//   pong   {nonce, server_time_ms}
//   status {buffer_depth, underruns, overruns, generator_period_ms, frame_index}
//   error  {code, message}
// Client to server:
//   command {text, client_time_ms?}
//   ping    {nonce}
inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxLineBytes = 64 * 1024;

struct HelloInfo {
  double frame_rate = 0.0;
  int block_frames = 0;
  std::string idle_command;
};

struct StatusInfo {
  std::size_t buffer_depth = 0;
  long long underruns = 0;
  long long overruns = 0;
  double generator_period_ms = 0.0;
  long long frame_index = 0;
};

struct FrameMessage {
  long long frame_index = 0;
  double time_ms = 0.0;
  StreamFrame frame;  // frame.command is the active command
  bool held = false;
};

std::string hello_message(const SkeletonSpec& skeleton, const HelloInfo& info);
std::string frame_message(const FrameMessage& m);
// `nonce` is the JSON text of the client's nonce and is echoed verbatim.
std::string pong_message(std::string_view nonce, double server_time_ms);
std::string status_message(const StatusInfo& s);
std::string error_message(ErrorCode code, std::string_view message);

struct InboundMessage {
  enum class Type { kCommand, kPing };
  Type type = Type::kCommand;
  std::string text;                     // command
  std::optional<double> client_time_ms; // command, echoed into the log only
  std::string nonce;                    // ping, as JSON text
};

// Throws kFormat with a reason for malformed or unknown messages.
InboundMessage parse_inbound(std::string_view line);

// Client-side parsing of server messages.
std::string message_type(std::string_view line);
FrameMessage parse_frame_message(std::string_view line);
SkeletonSpec parse_hello_skeleton(std::string_view line);

// Skeleton description as carried by hello and the FK test vectors:
// {name, joints: [{name, parent, axis[3], offset[3]}], ankles[2], mirror[]}.
std::string skeleton_to_json(const SkeletonSpec& skeleton);
SkeletonSpec skeleton_from_json(std::string_view text);

// Shared FK test vectors for client implementations: the skeleton plus
// `count` random root poses and joint configurations with every link's
// position and orientation (w x y z).
std::string export_fk_vectors(const SkeletonSpec& skeleton, int count, std::uint64_t seed);

}  // namespace motionstream
