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

#include "motionstream/rollout.hpp"

#include <cmath>

#include "motionstream/error.hpp"

namespace motionstream {

RawMotionFrame stand_pose(const SkeletonSpec& skeleton, double height) {
  RawMotionFrame f;
  f.p = Vec3(0.0, 0.0, height);
  f.q = Eigen::VectorXd::Zero(skeleton.num_dofs());
  f.c = {1, 1};
  return f;
}

RolloutState init_rollout(const RawMotionFrame& seed, int history_frames) {
  require(history_frames >= 1, ErrorCode::kInvalidArgument, "init_rollout: need >= 1 history frame");
  const RawMotionFrame pair[2] = {seed, seed};
  const EncodedMotion enc = encode_features(pair);
  RolloutState s;
  s.history.assign(static_cast<std::size_t>(history_frames), enc.features.front());
  s.anchor = {seed.p, seed.R};
  return s;
}

RolloutBlock rollout_step(RolloutState& state, const MotionGenerator& generator,
                          const std::string& command, std::mt19937_64& rng) {
  require(!state.history.empty(), ErrorCode::kInvalidArgument,
          "rollout_step: state is not initialized");
  RolloutBlock block;
  block.first_frame = state.frame_index;
  block.command = command;
  try {
    block.features = generator.generate(state.history, command, rng, &block.stats);
  } catch (const Error& e) {
    throw Error(e.code(), "generator failed at frame " + std::to_string(state.frame_index) +
                              " (command '" + command + "'): " + e.what());
  }
  require(!block.features.empty() && block.features.size() >= state.history.size(),
          ErrorCode::kInternal, "generator returned fewer frames than the history length");
  block.raw = decode_features(block.features, state.anchor);

  // One integration step past the block gives the next anchor.
  const MotionFeatureFrame& lf = block.features.back();
  const RawMotionFrame& lr = block.raw.back();
  const double yaw = quat_to_euler(lr.R).angles.yaw;
  const Vec3 step = rot_z(yaw) * lf.dp_local;
  state.anchor.p0 = Vec3(lr.p.x() + step.x(), lr.p.y() + step.y(), lr.p.z());
  state.anchor.R0 = yaw_quat(yaw + lf.dyaw);

  state.history.assign(block.features.end() - static_cast<std::ptrdiff_t>(state.history.size()),
                       block.features.end());
  state.frame_index += static_cast<long long>(block.features.size());
  state.active_command = command;
  return block;
}

namespace {

void append_block(SessionResult& out, const RolloutBlock& block, long long frame_count) {
  for (const auto& f : block.raw) {
    if (frame_count >= 0 && static_cast<long long>(out.frames.size()) >= frame_count) break;
    out.frames.push_back(f);
    out.command_log.push_back(block.command);
  }
  out.step_commands.push_back(block.command);
  ++out.steps;
}

}  // namespace

SessionResult stream_session(const CommandTimeline& timeline, const MotionGenerator& generator,
                             double duration_s, std::mt19937_64& rng, const RawMotionFrame& seed,
                             double frame_rate) {
  require(duration_s > 0.0 && std::isfinite(duration_s), ErrorCode::kInvalidArgument,
          "stream_session: duration must be positive");
  require(frame_rate > 0.0, ErrorCode::kInvalidArgument, "stream_session: frame rate must be > 0");
  const auto frames = static_cast<long long>(std::llround(duration_s * frame_rate));
  const int block = generator.future_frames();
  RolloutState state = init_rollout(seed);
  SessionResult out;
  out.frames.reserve(static_cast<std::size_t>(frames));
  while (static_cast<long long>(out.frames.size()) < frames) {
    const double t = static_cast<double>(state.frame_index) / frame_rate;
    const RolloutBlock b = rollout_step(state, generator, timeline.command_at(t), rng);
    require(static_cast<int>(b.features.size()) == block, ErrorCode::kInternal,
            "generator block size changed mid-session");
    append_block(out, b, frames);
  }
  return out;
}

SessionResult replay_session(const std::vector<std::string>& step_commands,
                             const MotionGenerator& generator, std::mt19937_64& rng,
                             const RawMotionFrame& seed, long long frame_count) {
  RolloutState state = init_rollout(seed);
  SessionResult out;
  for (const auto& cmd : step_commands) append_block(out, rollout_step(state, generator, cmd, rng), frame_count);
  return out;
}

}  // namespace motionstream
