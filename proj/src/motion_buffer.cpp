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

#include "motionstream/motion_buffer.hpp"

#include <cmath>

#include "motionstream/error.hpp"

namespace motionstream {

MotionBuffer::MotionBuffer(StreamFrame neutral, int capacity_blocks)
    : last_(std::move(neutral)), capacity_(capacity_blocks) {
  require(capacity_blocks >= 1, ErrorCode::kInvalidArgument, "MotionBuffer: capacity must be >= 1");
}

void MotionBuffer::push_block(std::vector<StreamFrame> block) {
  if (block.empty()) return;
  std::lock_guard lock(mu_);
  if (static_cast<int>(blocks_.size()) >= capacity_) {
    blocks_.pop_front();
    front_pos_ = 0;
    overruns_.fetch_add(1);
  }
  blocks_.push_back(std::move(block));
}

PopResult MotionBuffer::pop_frame() {
  std::lock_guard lock(mu_);
  popped_.fetch_add(1);
  if (blocks_.empty()) {
    underruns_.fetch_add(1);
    return {last_, true};
  }
  last_ = blocks_.front()[front_pos_++];
  if (front_pos_ == blocks_.front().size()) {
    blocks_.pop_front();
    front_pos_ = 0;
  }
  return {last_, false};
}

std::size_t MotionBuffer::depth_frames() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& b : blocks_) n += b.size();
  return n - front_pos_;
}

std::size_t MotionBuffer::depth_blocks() const {
  std::lock_guard lock(mu_);
  return blocks_.size();
}

BufferSimResult simulate_buffer(const BufferSimConfig& c,
                                const std::function<std::vector<StreamFrame>(long long)>& make_block) {
  require(c.duration_s > 0 && c.frame_rate > 0 && c.block_frames >= 1, ErrorCode::kInvalidArgument,
          "simulate_buffer: invalid configuration");
  const auto frame_us = static_cast<long long>(std::llround(1e6 / c.frame_rate));
  const long long block_us = frame_us * c.block_frames;
  const auto end_us = static_cast<long long>(std::llround(c.duration_s * 1e6));
  MotionBuffer buffer(StreamFrame{}, c.capacity_blocks);
  BufferSimResult r;
  long long next_produce = 0, next_consume = 0, period = 0;
  while (next_produce < end_us || next_consume < end_us) {
    if (next_produce < end_us && next_produce <= next_consume) {
      if (c.stalled_periods.count(period) == 0) {
        buffer.push_block(make_block(r.generator_steps));
        ++r.generator_steps;
      }
      ++period;
      next_produce += block_us;
    } else {
      r.held.push_back(buffer.pop_frame().held);
      ++r.frames_emitted;
      next_consume += frame_us;
    }
  }
  r.underruns = buffer.underrun_count();
  r.overruns = buffer.overrun_count();
  return r;
}

}  // namespace motionstream
