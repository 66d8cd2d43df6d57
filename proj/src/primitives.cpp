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

#include "motionstream/primitives.hpp"

#include <cmath>

#include "motionstream/error.hpp"

namespace motionstream {

std::vector<CurriculumBatchItem> segment_primitives(
    std::span<const MotionFeatureFrame> features, const std::vector<AnnotationSpan>& annotations,
    int stride, const std::string& fallback_label, const PrimitiveLayout& layout,
    double frame_rate, std::vector<std::string>* warnings) {
  require(stride >= 1, ErrorCode::kInvalidArgument, "segment_primitives: stride must be >= 1");
  require(layout.history >= 1 && layout.future >= 1 && layout.primitives >= 1,
          ErrorCode::kInvalidArgument, "segment_primitives: invalid primitive layout");
  require(frame_rate > 0.0, ErrorCode::kInvalidArgument, "segment_primitives: frame rate must be > 0");
  const int span = layout.span();
  const int n = static_cast<int>(features.size());
  std::vector<CurriculumBatchItem> out;
  if (n < span) {
    if (warnings != nullptr) {
      warnings->push_back("sequence of " + std::to_string(n) + " frames is shorter than one " +
                          std::to_string(span) + "-frame window; no primitives produced");
    }
    return out;
  }
  for (int s = 0; s + span <= n; s += stride) {
    CurriculumBatchItem item;
    item.start_frame = s;
    for (int p = 0; p < layout.primitives; ++p) {
      const int h0 = s + p * layout.future;
      const int f0 = h0 + layout.history;
      MotionPrimitive prim;
      prim.history.assign(features.begin() + h0, features.begin() + f0);
      prim.future.assign(features.begin() + f0, features.begin() + f0 + layout.future);
      item.primitives.push_back(std::move(prim));
    }
    item.rollout_flags.assign(static_cast<std::size_t>(layout.primitives), false);
    const double mid = (s + span / 2.0) / frame_rate;
    const AnnotationSpan* a = span_at(annotations, mid);
    item.text = a != nullptr ? a->text : fallback_label;
    out.push_back(std::move(item));
  }
  return out;
}

double curriculum_rollout_probability(long long step, long long total_steps, double cap) {
  require(total_steps > 0, ErrorCode::kInvalidArgument,
          "curriculum_rollout_probability: total_steps must be positive");
  require(step >= 0 && step <= total_steps, ErrorCode::kInvalidArgument,
          "curriculum_rollout_probability: step must lie in [0, total_steps]");
  require(cap >= 0.0 && cap <= 1.0, ErrorCode::kInvalidArgument,
          "curriculum_rollout_probability: cap must lie in [0, 1]");
  return std::min(cap, static_cast<double>(step) / static_cast<double>(total_steps));
}

void assign_curriculum_flags(CurriculumBatchItem& item, double probability, std::mt19937_64& rng,
                             double text_drop) {
  require(probability >= 0.0 && probability <= 1.0 && text_drop >= 0.0 && text_drop <= 1.0,
          ErrorCode::kInvalidArgument, "assign_curriculum_flags: probabilities must lie in [0, 1]");
  std::bernoulli_distribution replace(probability);
  item.rollout_flags.assign(item.primitives.size(), false);
  for (std::size_t i = 1; i < item.primitives.size(); ++i) item.rollout_flags[i] = replace(rng);
  item.text_dropped = std::bernoulli_distribution(text_drop)(rng);
}

}  // namespace motionstream
