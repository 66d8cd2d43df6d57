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
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "motionstream/codec.hpp"
#include "motionstream/kinematics.hpp"
#include "motionstream/metrics.hpp"
#include "motionstream/motion_rep.hpp"
#include "motionstream/primitives.hpp"
#include "motionstream/timeline.hpp"

namespace motionstream {

// ---- Clip files ------------------------------------------------------------
//
// Layout: 8-byte magic "MSTRMCLP", u32 header length, UTF-8 JSON header
// {version, skeleton_hash, frame_rate, frame_count, n_q, n_c}, then one
// record per frame of little-endian f64: p[3], R[w x y z], q[n_q], c[n_c],
// then a u64 FNV-1a checksum of every preceding byte.

inline constexpr std::uint32_t kClipVersion = 1;

struct MotionClip {
  std::uint64_t skeleton_hash = 0;
  double frame_rate = kFrameRate;
  RawMotion frames;
};

std::string serialize_clip(const MotionClip& clip);
// With `skeleton`, the stored hash and DoF count must match it.
MotionClip parse_clip(std::string_view bytes, const SkeletonSpec* skeleton = nullptr);
void save_clip(const MotionClip& clip, const std::filesystem::path& path);
MotionClip load_clip(const std::filesystem::path& path, const SkeletonSpec* skeleton = nullptr);

// Structured-text export for debugging: header fields plus a "frames" array.
std::string export_clip_json(const MotionClip& clip);

struct ValidationIssue {
  int frame = -1;  // -1 for clip-level issues
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
};

// Checks frame rate, skeleton hash and DoF count, finiteness, unit
// quaternions (1e-6) and contact flags in {0, 1}. Clips store raw frames
// only, so there is no stored dq to cross-check.
ValidationReport validate_clip(const MotionClip& clip, const SkeletonSpec& skeleton);

MotionClip slice_clip(const MotionClip& clip, int start, int length);

// ---- Segmentation and evaluation sets --------------------------------------

struct SegmentationConfig {
  int min_len = 100;
  int max_len = 2000;
  int overlap_min = 50;
  int overlap_max = 200;
};

struct ClipSegment {
  std::size_t source = 0;
  int start = 0;
  int length = 0;
};

// Sources shorter than min_len pass through whole with a warning; sources
// up to max_len stay whole. Longer sources are cut into pieces of length in
// [min_len, max_len] whose neighbors overlap by [overlap_min, overlap_max]
// frames. Each cut is drawn so the remainder is never below min_len.
std::vector<ClipSegment> segment_dataset(const std::vector<int>& source_lengths,
                                         const SegmentationConfig& config, std::mt19937_64& rng,
                                         std::vector<std::string>* warnings = nullptr);

struct EvalSegment {
  int start = 0;
  int length = 0;
  std::string text;
};

// Each annotation span (frames [round(t_start * rate), round(t_end * rate))
// clipped to the clip) is chunked into pieces of at most max_len frames.
std::vector<EvalSegment> build_eval_segments(int clip_frames,
                                             const std::vector<AnnotationSpan>& annotations,
                                             int max_len = 200, double frame_rate = kFrameRate);

struct TextStream {
  std::vector<AnnotationSpan> spans;  // stand, 3-5 commands, stand; back to back
  CommandTimeline timeline;
  double duration = 0.0;
};

inline constexpr double kStandPaddingSeconds = 2.0;

// 2 s idle, then 3-5 commands drawn with replacement from `vocabulary`, each
// lasting 6-10 whole seconds, then 2 s idle.
TextStream build_random_text_stream(const std::vector<std::string>& vocabulary,
                                    std::mt19937_64& rng, const std::string& idle = kIdleCommand);

// ---- Synthetic corpus --------------------------------------------------------

const std::vector<std::string>& synthetic_labels();

struct SyntheticCorpusSpec {
  std::vector<std::string> labels = synthetic_labels();
  int clips_per_label = 4;
  int min_frames = 200;
  int max_frames = 300;
  // One clip per ordered label pair that switches from the first label to
  // the second halfway through.
  bool transitions = true;
  int blend_frames = 10;
  double noise = 0.005;  // uniform joint-angle noise amplitude, rad
  std::uint64_t seed = 7;
};

struct LabeledClip {
  MotionClip clip;
  std::vector<AnnotationSpan> spans;
};

struct SyntheticCorpus {
  std::vector<std::string> labels;
  std::vector<LabeledClip> clips;
};

// Noise-free motion of one label starting at phase 0 with identity yaw.
// Needs a skeleton with the humanoid's leg, waist and arm joint names.
RawMotion synthetic_template(const std::string& label, const SkeletonSpec& skeleton, int frames);

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                          const SkeletonSpec& skeleton);

// Corpus directory: labels.txt (one label per line) and, per clip,
// clip_NNNN.msclip with its annotation spans in clip_NNNN.spans. Without
// labels.txt, labels are the span texts in order of first appearance.
void save_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);
SyntheticCorpus load_corpus(const std::filesystem::path& dir,
                            const SkeletonSpec* skeleton = nullptr);

// Embeds label k as the basis vector e_k and a motion as the basis vector of
// the template whose descriptor (per-joint mean and standard deviation of
// q, mean planar speed) is nearest. Texts outside the label set embed to 0.
class OracleEmbedder final : public EmbeddingProvider {
 public:
  OracleEmbedder(std::vector<std::string> labels, const SkeletonSpec& skeleton,
                 int template_frames = 200);
  int dim() const override { return static_cast<int>(labels_.size()); }
  Eigen::VectorXd embed_motion(std::span<const MotionFeatureFrame> motion) const override;
  Eigen::VectorXd embed_text(std::string_view text) const override;
  int classify(std::span<const MotionFeatureFrame> motion) const;
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  std::vector<std::string> labels_;
  std::vector<Eigen::VectorXd> descriptors_;
};

Eigen::VectorXd motion_descriptor(std::span<const MotionFeatureFrame> motion);

// History/future windows of every clip (stride frames apart) with the text
// of the span covering each window's midpoint.
struct TrainingWindows {
  std::vector<FeatureWindow> windows;
  std::vector<std::string> texts;
};

TrainingWindows corpus_windows(const SyntheticCorpus& corpus, int stride,
                               int history = kHistoryFrames, int future = kFutureFrames);

}  // namespace motionstream
