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

#include "motionstream/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "motionstream/error.hpp"

namespace motionstream {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  require(m.allFinite(), ErrorCode::kNumerical, std::string("fid: non-finite ") + what);
}

// Eigenvalues of a symmetric matrix with small negatives clipped to zero.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> psd_eigen(const Eigen::MatrixXd& m,
                                                         const char* what) {
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  require(eig.info() == Eigen::Success, ErrorCode::kNumerical,
          std::string("fid: eigendecomposition of ") + what + " failed");
  const double scale = std::max(1.0, eig.eigenvalues().cwiseAbs().maxCoeff());
  require(eig.eigenvalues().minCoeff() >= -1e-10 * scale, ErrorCode::kNumerical,
          std::string("fid: ") + what + " is not positive semidefinite");
  return eig;
}

void require_pairs(const Eigen::MatrixXd& motion, const Eigen::MatrixXd& text) {
  require(motion.rows() == text.rows() && motion.cols() == text.cols(),
          ErrorCode::kDimensionMismatch,
          "motion and text embeddings differ in shape: " + std::to_string(motion.rows()) + "x" +
              std::to_string(motion.cols()) + " vs " + std::to_string(text.rows()) + "x" +
              std::to_string(text.cols()));
  require(motion.rows() >= 1, ErrorCode::kInvalidArgument, "no embedding pairs");
}

void require_same_length(const TrajectoryPair& pair) {
  require(pair.policy.size() == pair.reference.size(), ErrorCode::kDimensionMismatch,
          "trajectory lengths differ: policy " + std::to_string(pair.policy.size()) +
              ", reference " + std::to_string(pair.reference.size()));
  require(!pair.policy.empty(), ErrorCode::kInvalidArgument, "empty trajectory");
  const std::size_t links = pair.reference[0].link_positions.size();
  require(links >= 2, ErrorCode::kInvalidArgument, "trajectory needs at least one non-root link");
  for (std::size_t t = 0; t < pair.policy.size(); ++t) {
    require(pair.policy[t].link_positions.size() == links &&
                pair.reference[t].link_positions.size() == links,
            ErrorCode::kDimensionMismatch,
            "link count differs at frame " + std::to_string(t));
  }
}

// Mean over non-root links of |f(pol, t, j) - f(ref, t, j)|.
template <typename F>
double mean_link_error(const TrajectoryPair& pair, std::size_t t, F&& f) {
  const std::size_t links = pair.reference[0].link_positions.size();
  double sum = 0.0;
  for (std::size_t j = 1; j < links; ++j) {
    sum += (f(pair.policy, t, j) - f(pair.reference, t, j)).norm();
  }
  return sum / static_cast<double>(links - 1);
}

}  // namespace

FeatureStats FeatureStats::from_samples(const Eigen::MatrixXd& rows) {
  require(rows.rows() >= 1, ErrorCode::kInvalidArgument, "FeatureStats: no samples");
  PartialStats p(static_cast<int>(rows.cols()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) p.add(rows.row(i).transpose());
  return p.finalize();
}

PartialStats::PartialStats(int dim)
    : sum_(Eigen::VectorXd::Zero(dim)), outer_(Eigen::MatrixXd::Zero(dim, dim)) {}

void PartialStats::add(const Eigen::VectorXd& x) {
  require(x.size() == sum_.size(), ErrorCode::kDimensionMismatch,
          "PartialStats: sample has " + std::to_string(x.size()) + " entries, expected " +
              std::to_string(sum_.size()));
  sum_ += x;
  outer_.noalias() += x * x.transpose();
  ++n_;
}

void PartialStats::merge(const PartialStats& other) {
  require(other.sum_.size() == sum_.size(), ErrorCode::kDimensionMismatch,
          "PartialStats: merge of different dimensions");
  sum_ += other.sum_;
  outer_ += other.outer_;
  n_ += other.n_;
}

FeatureStats PartialStats::finalize() const {
  require(n_ >= 1, ErrorCode::kInvalidArgument, "FeatureStats: no samples");
  FeatureStats s;
  const double n = static_cast<double>(n_);
  s.mu = sum_ / n;
  s.sigma = outer_ / n - s.mu * s.mu.transpose();
  s.sigma = 0.5 * (s.sigma + s.sigma.transpose());
  s.n = n_;
  return s;
}

double fid(const FeatureStats& g, const FeatureStats& r) {
  const Eigen::Index d = g.mu.size();
  require(r.mu.size() == d && g.sigma.rows() == d && g.sigma.cols() == d &&
              r.sigma.rows() == d && r.sigma.cols() == d,
          ErrorCode::kDimensionMismatch, "fid: statistics differ in dimension");
  require_finite(g.mu, "mean");
  require_finite(r.mu, "mean");
  require_finite(g.sigma, "covariance");
  require_finite(r.sigma, "covariance");

  const auto er = psd_eigen(r.sigma, "reference covariance");
  const Eigen::VectorXd sqrt_vals = er.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::MatrixXd sr_half =
      er.eigenvectors() * sqrt_vals.asDiagonal() * er.eigenvectors().transpose();
  const Eigen::MatrixXd sg = 0.5 * (g.sigma + g.sigma.transpose());
  const auto em = psd_eigen(sr_half * sg * sr_half, "covariance product");
  const double tr_sqrt = em.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

  const double value =
      (g.mu - r.mu).squaredNorm() + sg.trace() + r.sigma.trace() - 2.0 * tr_sqrt;
  require(std::isfinite(value), ErrorCode::kNumerical, "fid: non-finite result");
  return std::max(value, 0.0);
}

double diversity(const Eigen::MatrixXd& embeddings, int subset_size, std::mt19937_64& rng) {
  const auto n = static_cast<int>(embeddings.rows());
  const int d = subset_size > 0 ? subset_size : std::min(32, n / 2);
  require(d >= 1 && n >= 2 * d, ErrorCode::kInvalidArgument,
          "diversity needs N >= 2D, got N = " + std::to_string(n) + ", D = " + std::to_string(d));
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i >= 1; --i) {
    const auto j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  double sum = 0.0;
  for (int i = 0; i < d; ++i) {
    sum += (embeddings.row(idx[static_cast<std::size_t>(i)]) -
            embeddings.row(idx[static_cast<std::size_t>(i + d)]))
               .norm();
  }
  return sum / d;
}

double r_precision(const Eigen::MatrixXd& motion_emb, const Eigen::MatrixXd& text_emb, int k) {
  require_pairs(motion_emb, text_emb);
  const auto m = static_cast<int>(motion_emb.rows());
  require(k >= 1 && k <= m, ErrorCode::kInvalidArgument,
          "R@K needs 1 <= K <= M, got K = " + std::to_string(k) + ", M = " + std::to_string(m));
  int hits = 0;
  for (int q = 0; q < m; ++q) {
    const double own = (text_emb.row(q) - motion_emb.row(q)).norm();
    // Rank of the true motion under (distance, index) ordering.
    int ahead = 0;
    for (int j = 0; j < m; ++j) {
      if (j == q) continue;
      const double dist = (text_emb.row(q) - motion_emb.row(j)).norm();
      if (dist < own || (dist == own && j < q)) ++ahead;
    }
    if (ahead < k) ++hits;
  }
  return static_cast<double>(hits) / m;
}

double r_precision_batched(const Eigen::MatrixXd& motion_emb, const Eigen::MatrixXd& text_emb,
                           int k, int batch) {
  require_pairs(motion_emb, text_emb);
  require(batch >= 1, ErrorCode::kInvalidArgument, "R@K batch size must be positive");
  const auto batches = static_cast<int>(motion_emb.rows()) / batch;
  require(batches >= 1, ErrorCode::kInvalidArgument,
          "R@K needs at least one full batch of " + std::to_string(batch) + " pairs, got " +
              std::to_string(motion_emb.rows()));
  double sum = 0.0;
  for (int b = 0; b < batches; ++b) {
    sum += r_precision(motion_emb.middleRows(b * batch, batch),
                       text_emb.middleRows(b * batch, batch), k);
  }
  return sum / batches;
}

double mm_dist(const Eigen::MatrixXd& motion_emb, const Eigen::MatrixXd& text_emb) {
  require_pairs(motion_emb, text_emb);
  return (motion_emb - text_emb).rowwise().norm().mean();
}

Eigen::MatrixXd jerk(const Eigen::MatrixXd& x) {
  require(x.cols() >= 4, ErrorCode::kInvalidArgument,
          "jerk needs at least 4 frames, got " + std::to_string(x.cols()));
  const Eigen::Index n = x.cols() - 3;
  return x.rightCols(n) - 3.0 * x.middleCols(2, n) + 3.0 * x.middleCols(1, n) - x.leftCols(n);
}

double peak_jerk(const Eigen::MatrixXd& x) { return jerk(x).cwiseAbs().maxCoeff(); }

double auj(const Eigen::MatrixXd& x, double j_avg) {
  const Eigen::MatrixXd j = jerk(x);
  return (j.array() - j_avg).abs().colwise().maxCoeff().sum();
}

double jerk_baseline(std::span<const Eigen::MatrixXd> clips) {
  require(!clips.empty(), ErrorCode::kInvalidArgument, "jerk baseline needs a non-empty dataset");
  double sum = 0.0;
  double count = 0.0;
  for (const auto& c : clips) {
    const Eigen::MatrixXd j = jerk(c);
    sum += j.cwiseAbs().sum();
    count += static_cast<double>(j.size());
  }
  require(count > 0, ErrorCode::kInvalidArgument, "jerk baseline: clips have no joints");
  return sum / count;
}

Eigen::MatrixXd joint_trajectories(std::span<const RawMotionFrame> motion) {
  require(!motion.empty(), ErrorCode::kInvalidArgument, "joint_trajectories: empty motion");
  const Eigen::Index k = motion[0].q.size();
  Eigen::MatrixXd out(k, static_cast<Eigen::Index>(motion.size()));
  for (std::size_t t = 0; t < motion.size(); ++t) {
    require(motion[t].q.size() == k, ErrorCode::kDimensionMismatch,
            "joint_trajectories: DoF count differs at frame " + std::to_string(t));
    out.col(static_cast<Eigen::Index>(t)) = motion[t].q;
  }
  return out;
}

std::vector<TransitionClip> transition_clips(int sequence_length, const std::vector<int>& boundaries,
                                             int half_window, std::vector<std::string>* warnings) {
  require(half_window >= 1, ErrorCode::kInvalidArgument, "half window must be positive");
  std::vector<TransitionClip> out;
  for (const int b : boundaries) {
    if (b - half_window < 0 || b + half_window > sequence_length) {
      if (warnings) {
        warnings->push_back("transition at frame " + std::to_string(b) + " lies within " +
                            std::to_string(half_window) + " frames of an edge of a " +
                            std::to_string(sequence_length) + "-frame sequence; skipped");
      }
      continue;
    }
    out.push_back({b, b - half_window, 2 * half_window});
  }
  return out;
}

TrackingMetrics tracking_metrics(const TrajectoryPair& pair) {
  require_same_length(pair);
  const std::size_t n = pair.policy.size();
  require(n >= 3, ErrorCode::kInvalidArgument,
          "acceleration error needs at least 3 frames, got " + std::to_string(n));
  auto global = [](const std::vector<BodyPose>& p, std::size_t t, std::size_t j) -> Vec3 {
    return p[t].link_positions[j];
  };
  auto relative = [](const std::vector<BodyPose>& p, std::size_t t, std::size_t j) -> Vec3 {
    return p[t].link_positions[j] - p[t].link_positions[0];
  };
  auto vel = [](const std::vector<BodyPose>& p, std::size_t t, std::size_t j) -> Vec3 {
    return p[t + 1].link_positions[j] - p[t].link_positions[j];
  };
  auto acc = [](const std::vector<BodyPose>& p, std::size_t t, std::size_t j) -> Vec3 {
    return p[t + 2].link_positions[j] - 2.0 * p[t + 1].link_positions[j] + p[t].link_positions[j];
  };

  TrackingMetrics m;
  for (std::size_t t = 0; t < n; ++t) {
    m.g_mpjpe += mean_link_error(pair, t, global);
    m.mpjpe += mean_link_error(pair, t, relative);
    if (t + 1 < n) m.e_vel += mean_link_error(pair, t, vel);
    if (t + 2 < n) m.e_acc += mean_link_error(pair, t, acc);
  }
  const double T = static_cast<double>(n);
  m.g_mpjpe *= 1000.0 / T;
  m.mpjpe *= 1000.0 / T;
  m.e_vel *= 1000.0 / (T - 1.0);
  m.e_acc *= 1000.0 / (T - 2.0);
  return m;
}

double max_root_relative_error(const TrajectoryPair& pair) {
  require_same_length(pair);
  auto relative = [](const std::vector<BodyPose>& p, std::size_t t, std::size_t j) -> Vec3 {
    return p[t].link_positions[j] - p[t].link_positions[0];
  };
  double worst = 0.0;
  for (std::size_t t = 0; t < pair.policy.size(); ++t) {
    worst = std::max(worst, mean_link_error(pair, t, relative));
  }
  return worst;
}

double success_rate(std::span<const TrajectoryPair> pairs, double theta) {
  require(!pairs.empty(), ErrorCode::kInvalidArgument, "success rate needs at least one trajectory");
  require(theta >= 0.0, ErrorCode::kInvalidArgument, "success threshold must be non-negative");
  int ok = 0;
  for (const auto& p : pairs) {
    if (max_root_relative_error(p) <= theta) ++ok;
  }
  return static_cast<double>(ok) / static_cast<double>(pairs.size());
}

std::vector<BodyPose> body_trajectory(const SkeletonSpec& skeleton,
                                      std::span<const RawMotionFrame> motion) {
  std::vector<BodyPose> out;
  out.reserve(motion.size());
  for (const auto& f : motion) out.push_back(forward_kinematics(skeleton, f.p, f.R, f.q));
  return out;
}

}  // namespace motionstream
