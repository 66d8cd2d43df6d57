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
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "motionstream/kinematics.hpp"
#include "motionstream/motion_rep.hpp"

namespace motionstream {

// ---- Generation quality ----------------------------------------------------

// Shared motion/text embedding space used by FID, Diversity, R@K and MM-Dist.
// Implementations must be deterministic with a fixed output dimension.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual int dim() const = 0;
  virtual Eigen::VectorXd embed_motion(std::span<const MotionFeatureFrame> motion) const = 0;
  virtual Eigen::VectorXd embed_text(std::string_view text) const = 0;
};

// Mean and covariance of a feature set; covariance normalized by 1/n so a
// single sample is valid.
struct FeatureStats {
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;
  long long n = 0;

  static FeatureStats from_samples(const Eigen::MatrixXd& rows);  // one sample per row
};

// Mergeable accumulator (sum, outer-product sum, count) for map-reduce.
class PartialStats {
 public:
  explicit PartialStats(int dim = 0);
  void add(const Eigen::VectorXd& x);
  void merge(const PartialStats& other);
  long long count() const { return n_; }
  FeatureStats finalize() const;

 private:
  Eigen::VectorXd sum_;
  Eigen::MatrixXd outer_;
  long long n_ = 0;
};

// |mu_g - mu_r|^2 + Tr(S_g + S_r - 2 (S_g S_r)^{1/2}). The square-root trace
// is taken from the eigenvalues of S_r^{1/2} S_g S_r^{1/2}. Inputs are
// symmetrized; eigenvalues in [-1e-10 * scale, 0) are clipped to 0 and more
// negative ones are rejected as not PSD.
double fid(const FeatureStats& g, const FeatureStats& r);

// Shuffles indices 0..N-1 with Fisher-Yates (swap i with rng() % (i + 1),
// for i from N-1 down to 1), then pairs positions [0, D) with [D, 2D) and
// averages the pair distances. D <= 0 selects min(32, N / 2).
double diversity(const Eigen::MatrixXd& embeddings, int subset_size, std::mt19937_64& rng);

// Fraction of texts (queries) whose own motion is among the K motions
// nearest in Euclidean distance. Ranking is by (distance, index), so ties
// favor the lower index.
double r_precision(const Eigen::MatrixXd& motion_emb, const Eigen::MatrixXd& text_emb, int k);
// Mean of r_precision over consecutive batches of `batch` pairs; a final
// partial batch is dropped (an error if no full batch exists).
double r_precision_batched(const Eigen::MatrixXd& motion_emb, const Eigen::MatrixXd& text_emb,
                           int k, int batch = 32);
double mm_dist(const Eigen::MatrixXd& motion_emb, const Eigen::MatrixXd& text_emb);

// Third backward difference along time, per frame:
// j(t) = x(t) - 3 x(t-1) + 3 x(t-2) - x(t-3) for t = 3..L-1.
// Input is K joints x L frames; output is K x (L - 3).
Eigen::MatrixXd jerk(const Eigen::MatrixXd& joint_trajectories);
double peak_jerk(const Eigen::MatrixXd& joint_trajectories);
// Sum over jerk samples of max_i |j_i(t) - j_avg|.
double auj(const Eigen::MatrixXd& joint_trajectories, double j_avg);
// Mean |j| over all joints, jerk samples and clips.
double jerk_baseline(std::span<const Eigen::MatrixXd> clips);

// q trajectories of a raw motion as K x L.
Eigen::MatrixXd joint_trajectories(std::span<const RawMotionFrame> motion);

struct TransitionClip {
  int boundary = 0;
  int start = 0;  // first frame, boundary - half_window
  int length = 0;
};

// Clips [b - h, b + h) for each boundary b; boundaries closer than h to
// either end are skipped with a warning.
std::vector<TransitionClip> transition_clips(int sequence_length, const std::vector<int>& boundaries,
                                             int half_window = 15,
                                             std::vector<std::string>* warnings = nullptr);

// ---- Tracking fidelity -----------------------------------------------------

struct TrajectoryPair {
  std::vector<BodyPose> policy;
  std::vector<BodyPose> reference;
};

// Position metrics use the non-root links 1..J. g-MPJPE and MPJPE are in
// millimeters. E_vel and E_acc compare per-link finite differences
// (v_t = p_{t+1} - p_t, a_t = v_{t+1} - v_t) averaged over links and time,
// in mm/frame and mm/frame^2.
struct TrackingMetrics {
  double g_mpjpe = 0.0;
  double mpjpe = 0.0;
  double e_vel = 0.0;
  double e_acc = 0.0;
};

TrackingMetrics tracking_metrics(const TrajectoryPair& pair);
// max over t of the mean over non-root links of the root-relative error, in meters.
double max_root_relative_error(const TrajectoryPair& pair);
inline constexpr double kDefaultSuccessThreshold = 0.3;
double success_rate(std::span<const TrajectoryPair> pairs, double theta = kDefaultSuccessThreshold);

// Runs FK on every frame of a raw motion.
std::vector<BodyPose> body_trajectory(const SkeletonSpec& skeleton,
                                      std::span<const RawMotionFrame> motion);

}  // namespace motionstream
