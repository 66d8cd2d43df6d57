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
#include <span>
#include <string>
#include <vector>

#include "motionstream/motion_rep.hpp"
#include "motionstream/timeline.hpp"

namespace motionstream {

inline constexpr int kHistoryFrames = 2;
inline constexpr int kFutureFrames = 8;
inline constexpr int kPrimitivesPerItem = 4;
inline constexpr double kRolloutProbabilityCap = 0.8;
inline constexpr double kTextDropProbability = 0.1;

struct MotionPrimitive {
  std::vector<MotionFeatureFrame> history;
  std::vector<MotionFeatureFrame> future;
};

// N consecutive primitives from one window of history + N * future frames.
struct CurriculumBatchItem {
  std::vector<MotionPrimitive> primitives;
  std::vector<bool> rollout_flags;  // true: replace history with the model's prediction
  std::string text;
  bool text_dropped = false;         // true: train this item unconditionally
  int start_frame = 0;               // window start within the source sequence
};

struct PrimitiveLayout {
  int history = kHistoryFrames;
  int future = kFutureFrames;
  int primitives = kPrimitivesPerItem;
  int span() const { return history + primitives * future; }
};

// Windows of layout.span() frames starting at 0, stride, 2 * stride, ...
// Each item's text is the first annotation covering the window midpoint
// (frame start + span / 2 at frame_rate), else `fallback_label`. Sequences
// shorter than one window give no items and append a warning.
std::vector<CurriculumBatchItem> segment_primitives(
    std::span<const MotionFeatureFrame> features, const std::vector<AnnotationSpan>& annotations,
    int stride, const std::string& fallback_label = {}, const PrimitiveLayout& layout = {},
    double frame_rate = kFrameRate, std::vector<std::string>* warnings = nullptr);

// min(cap, step / total_steps). Throws when total_steps is 0 or the
// arguments are out of range.
double curriculum_rollout_probability(long long step, long long total_steps,
                                      double cap = kRolloutProbabilityCap);

// Samples rollout flags independently per primitive with `probability`
// (the first primitive has no predecessor and is never replaced) and drops
// the text with `text_drop`.
void assign_curriculum_flags(CurriculumBatchItem& item, double probability, std::mt19937_64& rng,
                             double text_drop = kTextDropProbability);

}  // namespace motionstream
