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

#include <atomic>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "motionstream/motion_rep.hpp"
#include "motionstream/primitives.hpp"
#include "motionstream/timeline.hpp"

namespace motionstream {

inline constexpr int kDefaultBufferBlocks = 3;

// A decoded frame as it travels from the generator loop to the emitter.
struct StreamFrame {
  RawMotionFrame frame;
  long long motion_index = -1;  // position in the generated sequence, -1 for the neutral frame
  std::string command;
};

struct PopResult {
  StreamFrame frame;
  bool held = false;  // true when the buffer was empty (underrun)
};

// Single-producer / single-consumer block FIFO. Capacity counts blocks,
// including a partially consumed front block. Popping from an empty buffer
// counts an underrun and repeats the last popped frame (the neutral frame
// before any pop). Pushing into a full buffer drops the oldest block and
// counts an overrun.
class MotionBuffer {
 public:
  explicit MotionBuffer(StreamFrame neutral, int capacity_blocks = kDefaultBufferBlocks);

  void push_block(std::vector<StreamFrame> block);
  PopResult pop_frame();

  std::size_t depth_frames() const;
  std::size_t depth_blocks() const;
  int capacity_blocks() const { return capacity_; }
  long long underrun_count() const { return underruns_.load(); }
  long long overrun_count() const { return overruns_.load(); }
  long long popped_count() const { return popped_.load(); }

 private:
  mutable std::mutex mu_;
  std::deque<std::vector<StreamFrame>> blocks_;
  std::size_t front_pos_ = 0;
  StreamFrame last_;
  int capacity_;
  std::atomic<long long> underruns_{0};
  std::atomic<long long> overruns_{0};
  std::atomic<long long> popped_{0};
};

// Discrete-event schedule of one producer (a block every block_frames /
// frame_rate seconds, starting at 0) and one consumer (a frame every
// 1 / frame_rate seconds, starting at 0), on an integer microsecond clock.
// Events at the same instant run producer first. Stalled periods skip the
// push for that producer tick.
struct BufferSimConfig {
  double duration_s = 60.0;
  double frame_rate = kFrameRate;
  int block_frames = kFutureFrames;
  int capacity_blocks = kDefaultBufferBlocks;
  std::set<long long> stalled_periods;
};

struct BufferSimResult {
  long long frames_emitted = 0;
  long long generator_steps = 0;
  long long underruns = 0;
  long long overruns = 0;
  std::vector<bool> held;  // per emitted frame
};

// `make_block(step)` supplies each produced block (block_frames frames).
BufferSimResult simulate_buffer(const BufferSimConfig& config,
                                const std::function<std::vector<StreamFrame>(long long)>& make_block);

}  // namespace motionstream
