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

#include <random>
#include <string>
#include <vector>

#include "motionstream/generator.hpp"
#include "motionstream/kinematics.hpp"
#include "motionstream/motion_rep.hpp"
#include "motionstream/timeline.hpp"

namespace motionstream {

inline constexpr double kDefaultStandHeight = 0.793;

// Root at (0, 0, height), identity orientation, zero joint angles, both
// feet in contact.
RawMotionFrame stand_pose(const SkeletonSpec& skeleton, double height = kDefaultStandHeight);

struct RolloutState {
  std::vector<MotionFeatureFrame> history;  // last T_history frames
  InitialPose anchor;                       // pose the next block is decoded from
  long long frame_index = 0;                // frames produced so far
  std::string active_command;
};

// History holds T_history copies of the static feature frame of `seed`; the
// anchor is the seed pose.
RolloutState init_rollout(const RawMotionFrame& seed, int history_frames = kHistoryFrames);

struct RolloutBlock {
  std::vector<MotionFeatureFrame> features;
  RawMotion raw;
  long long first_frame = 0;
  std::string command;
  GenerationStats stats;
};

// Generates one block for `command`, decodes it from the anchor, moves the
// history to the block's last frames and advances the anchor one step past
// the block. Generator errors are rethrown with the frame index prepended.
RolloutBlock rollout_step(RolloutState& state, const MotionGenerator& generator,
                          const std::string& command, std::mt19937_64& rng);

struct SessionResult {
  RawMotion frames;
  std::vector<std::string> command_log;   // per frame
  std::vector<std::string> step_commands; // per generator step
  int steps = 0;
};

// Offline streaming session: round(duration * frame_rate) frames, one
// rollout step per block, each latching the command active at the block's
// start time. The last block is trimmed to the frame count.
SessionResult stream_session(const CommandTimeline& timeline, const MotionGenerator& generator,
                             double duration_s, std::mt19937_64& rng, const RawMotionFrame& seed,
                             double frame_rate = kFrameRate);

// Replays an explicit per-step command list (as recorded by a live server).
SessionResult replay_session(const std::vector<std::string>& step_commands,
                             const MotionGenerator& generator, std::mt19937_64& rng,
                             const RawMotionFrame& seed, long long frame_count = -1);

}  // namespace motionstream
