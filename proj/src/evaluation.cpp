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

#include "motionstream/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <json.hpp>

#include "motionstream/error.hpp"

namespace motionstream {
namespace {

using nlohmann::json;

struct SegmentSet {
  Eigen::MatrixXd motion;
  Eigen::MatrixXd text;
};

SegmentSet embed_segments(const SyntheticCorpus& corpus, const EmbeddingProvider& provider) {
  std::vector<Eigen::VectorXd> motion, text;
  for (const auto& c : corpus.clips) {
    const auto segments = build_eval_segments(static_cast<int>(c.clip.frames.size()), c.spans,
                                              200, c.clip.frame_rate);
    for (const auto& s : segments) {
      // Features need two raw frames; shorter chunks carry no motion.
      if (s.length < 2) continue;
      const std::span<const RawMotionFrame> raw(c.clip.frames.data() + s.start,
                                                static_cast<std::size_t>(s.length));
      motion.push_back(provider.embed_motion(encode_features(raw).features));
      text.push_back(provider.embed_text(s.text));
    }
  }
  SegmentSet out;
  out.motion.resize(static_cast<Eigen::Index>(motion.size()), provider.dim());
  out.text.resize(static_cast<Eigen::Index>(text.size()), provider.dim());
  for (std::size_t i = 0; i < motion.size(); ++i) {
    out.motion.row(static_cast<Eigen::Index>(i)) = motion[i].transpose();
    out.text.row(static_cast<Eigen::Index>(i)) = text[i].transpose();
  }
  return out;
}

std::optional<double> maybe_diversity(const Eigen::MatrixXd& e, std::mt19937_64& rng) {
  if (e.rows() < 2) return std::nullopt;
  return diversity(e, 0, rng);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string dump(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace

EmbeddingMetrics evaluate_embeddings(const Eigen::MatrixXd& real_motion,
                                     const Eigen::MatrixXd& generated_motion,
                                     const Eigen::MatrixXd& generated_text, std::uint64_t seed) {
  require(real_motion.rows() >= 1 && generated_motion.rows() >= 1, ErrorCode::kInvalidArgument,
          "evaluate_embeddings: real and generated sets must be non-empty");
  require(real_motion.cols() == generated_motion.cols() &&
              generated_text.cols() == generated_motion.cols(),
          ErrorCode::kDimensionMismatch, "evaluate_embeddings: embedding dimensions differ");
  require(generated_text.rows() == generated_motion.rows(), ErrorCode::kDimensionMismatch,
          "evaluate_embeddings: " + std::to_string(generated_motion.rows()) +
              " generated motions but " + std::to_string(generated_text.rows()) + " texts");
  EmbeddingMetrics m;
  m.real_count = real_motion.rows();
  m.generated_count = generated_motion.rows();
  m.fid = fid(FeatureStats::from_samples(generated_motion), FeatureStats::from_samples(real_motion));
  std::mt19937_64 rng(seed);
  m.diversity_real = maybe_diversity(real_motion, rng);
  m.diversity_generated = maybe_diversity(generated_motion, rng);
  const auto n = static_cast<int>(generated_motion.rows());
  m.r_precision_batch = n >= 32 ? 32 : n;
  for (int k = 1; k <= 3; ++k) {
    const int kk = std::min(k, m.r_precision_batch);
    m.r_precision.push_back(n >= 32 ? r_precision_batched(generated_motion, generated_text, kk, 32)
                                    : r_precision(generated_motion, generated_text, kk));
  }
  m.mm_dist = mm_dist(generated_motion, generated_text);
  return m;
}

GenerationReport evaluate_generation(const SyntheticCorpus& real, const SyntheticCorpus& generated,
                                     const EmbeddingProvider& provider, std::uint64_t seed,
                                     int half_window) {
  const SegmentSet r = embed_segments(real, provider);
  const SegmentSet g = embed_segments(generated, provider);
  require(r.motion.rows() > 0, ErrorCode::kInvalidArgument, "real set has no annotated segments");
  require(g.motion.rows() > 0, ErrorCode::kInvalidArgument,
          "generated set has no annotated segments");
  GenerationReport report;
  report.embedding = evaluate_embeddings(r.motion, g.motion, g.text, seed);

  std::vector<Eigen::MatrixXd> real_traj;
  for (const auto& c : real.clips) {
    if (c.clip.frames.size() >= 4) real_traj.push_back(joint_trajectories(c.clip.frames));
  }
  require(!real_traj.empty(), ErrorCode::kInvalidArgument,
          "real set needs a clip of at least 4 frames for the jerk baseline");
  JerkMetrics& j = report.jerk;
  j.j_avg = jerk_baseline(real_traj);
  for (const auto& c : generated.clips) {
    std::vector<int> boundaries;
    for (std::size_t s = 1; s < c.spans.size(); ++s) {
      boundaries.push_back(static_cast<int>(std::lround(c.spans[s].t_start * c.clip.frame_rate)));
    }
    const Eigen::MatrixXd traj = joint_trajectories(c.clip.frames);
    for (const auto& t : transition_clips(static_cast<int>(c.clip.frames.size()), boundaries,
                                          half_window, &j.warnings)) {
      const Eigen::MatrixXd clip = traj.middleCols(t.start, t.length);
      j.peak_jerk += peak_jerk(clip);
      j.auj += auj(clip, j.j_avg);
      ++j.transitions;
    }
  }
  if (j.transitions > 0) {
    j.peak_jerk /= static_cast<double>(j.transitions);
    j.auj /= static_cast<double>(j.transitions);
  }
  return report;
}

std::string embedding_report_json(const EmbeddingMetrics& m) {
  json j = {{"schema", "motionstream.embedding_report/1"},
            {"real_segments", m.real_count},
            {"generated_segments", m.generated_count},
            {"fid", m.fid},
            {"diversity_real", optional_json(m.diversity_real)},
            {"diversity_generated", optional_json(m.diversity_generated)},
            {"r_precision", m.r_precision},
            {"r_precision_batch", m.r_precision_batch},
            {"mm_dist", m.mm_dist}};
  return dump(j);
}

std::string generation_report_json(const GenerationReport& report) {
  json j = json::parse(embedding_report_json(report.embedding));
  j["schema"] = "motionstream.generation_report/1";
  const JerkMetrics& k = report.jerk;
  j["transitions"] = k.transitions;
  j["j_avg"] = k.j_avg;
  j["peak_jerk"] = k.transitions > 0 ? json(k.peak_jerk) : json(nullptr);
  j["auj"] = k.transitions > 0 ? json(k.auj) : json(nullptr);
  j["warnings"] = k.warnings;
  return dump(j);
}

TrackingReport evaluate_tracking(const std::vector<MotionClip>& policy,
                                 const std::vector<MotionClip>& reference,
                                 const SkeletonSpec& skeleton, double threshold) {
  require(!policy.empty(), ErrorCode::kInvalidArgument, "evaluate_tracking: no clips");
  require(policy.size() == reference.size(), ErrorCode::kDimensionMismatch,
          "evaluate_tracking: " + std::to_string(policy.size()) + " policy clips but " +
              std::to_string(reference.size()) + " reference clips");
  TrackingReport report;
  report.threshold = threshold;
  std::vector<TrajectoryPair> pairs;
  for (std::size_t i = 0; i < policy.size(); ++i) {
    require(policy[i].frames.size() == reference[i].frames.size(), ErrorCode::kDimensionMismatch,
            "evaluate_tracking: pair " + std::to_string(i) + " differs in length");
    pairs.push_back({body_trajectory(skeleton, policy[i].frames),
                     body_trajectory(skeleton, reference[i].frames)});
    const TrackingMetrics m = tracking_metrics(pairs.back());
    const auto w = static_cast<double>(policy[i].frames.size());
    report.mean.g_mpjpe += w * m.g_mpjpe;
    report.mean.mpjpe += w * m.mpjpe;
    report.mean.e_vel += w * m.e_vel;
    report.mean.e_acc += w * m.e_acc;
    report.frames += static_cast<long long>(policy[i].frames.size());
  }
  const auto total = static_cast<double>(report.frames);
  report.mean.g_mpjpe /= total;
  report.mean.mpjpe /= total;
  report.mean.e_vel /= total;
  report.mean.e_acc /= total;
  report.pairs = static_cast<long long>(pairs.size());
  report.success_rate = success_rate(pairs, threshold);
  return report;
}

std::string tracking_report_json(const TrackingReport& r) {
  json j = {{"schema", "motionstream.tracking_report/1"},
            {"pairs", r.pairs},
            {"frames", r.frames},
            {"g_mpjpe_mm", r.mean.g_mpjpe},
            {"mpjpe_mm", r.mean.mpjpe},
            {"e_vel_mm_per_frame", r.mean.e_vel},
            {"e_acc_mm_per_frame2", r.mean.e_acc},
            {"success_rate", r.success_rate},
            {"threshold_m", r.threshold}};
  return dump(j);
}

}  // namespace motionstream
