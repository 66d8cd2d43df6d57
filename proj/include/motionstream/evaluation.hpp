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
#include <vector>

#include <Eigen/Core>

#include "motionstream/corpus.hpp"
#include "motionstream/metrics.hpp"

namespace motionstream {

// Embedding-space metrics of a generated set against a real set. Rows are
// samples; generated motion row i pairs with generated text row i.
struct EmbeddingMetrics {
  long long real_count = 0;
  long long generated_count = 0;
  double fid = 0.0;
  std::optional<double> diversity_real;
  std::optional<double> diversity_generated;
  // R@1..3; batched over 32 pairs when at least 32 exist, otherwise over all
  // pairs with K capped at the pair count.
  std::vector<double> r_precision;
  int r_precision_batch = 0;
  double mm_dist = 0.0;
};

EmbeddingMetrics evaluate_embeddings(const Eigen::MatrixXd& real_motion,
                                     const Eigen::MatrixXd& generated_motion,
                                     const Eigen::MatrixXd& generated_text, std::uint64_t seed);

// Jerk statistics over transition clips of generated sequences. Boundaries
// are the starts of every span after the first.
struct JerkMetrics {
  long long transitions = 0;
  double j_avg = 0.0;      // baseline from the real clips
  double peak_jerk = 0.0;  // mean over transition clips
  double auj = 0.0;        // mean over transition clips
  std::vector<std::string> warnings;
};

struct GenerationReport {
  EmbeddingMetrics embedding;
  JerkMetrics jerk;
};

// Real and generated clips are cut into evaluation segments (span chunks of
// at most 200 frames) and embedded with `provider`.
GenerationReport evaluate_generation(const SyntheticCorpus& real, const SyntheticCorpus& generated,
                                     const EmbeddingProvider& provider, std::uint64_t seed,
                                     int half_window = 15);

// Report schema (structured text):
//   {"schema":"motionstream.generation_report/1", "real_segments", "generated_segments",
//    "fid", "diversity_real", "diversity_generated", "r_precision":[R@1,R@2,R@3],
//    "r_precision_batch", "mm_dist", "transitions", "j_avg", "peak_jerk", "auj", "warnings"}
// Missing values (too few samples) are null.
std::string generation_report_json(const GenerationReport& report);
std::string embedding_report_json(const EmbeddingMetrics& metrics);

struct TrackingReport {
  long long pairs = 0;
  long long frames = 0;
  TrackingMetrics mean;  // frame-weighted over pairs
  double success_rate = 0.0;
  double threshold = kDefaultSuccessThreshold;
};

// Policy clip i is compared with reference clip i after FK on `skeleton`.
TrackingReport evaluate_tracking(const std::vector<MotionClip>& policy,
                                 const std::vector<MotionClip>& reference,
                                 const SkeletonSpec& skeleton,
                                 double threshold = kDefaultSuccessThreshold);

//   {"schema":"motionstream.tracking_report/1", "pairs", "frames", "g_mpjpe_mm", "mpjpe_mm",
//    "e_vel_mm_per_frame", "e_acc_mm_per_frame2", "success_rate", "threshold_m"}
std::string tracking_report_json(const TrackingReport& report);

}  // namespace motionstream
