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

#include "motionstream/losses.hpp"

#include <cmath>

#include "motionstream/error.hpp"

namespace motionstream {

double huber(double r, double delta) {
  const double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

double huber_sum(const Eigen::Ref<const Eigen::VectorXd>& residual, double delta) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < residual.size(); ++i) s += huber(residual[i], delta);
  return s;
}

double kl_to_standard_normal(const DiagonalGaussian& dist) {
  require(dist.mean.size() == dist.stddev.size(), ErrorCode::kDimensionMismatch,
          "KL: mean and stddev sizes differ");
  require((dist.stddev.array() > 0.0).all(), ErrorCode::kInvalidArgument,
          "KL: stddev must be positive");
  double s = 0.0;
  for (Eigen::Index i = 0; i < dist.mean.size(); ++i) {
    const double sd = dist.stddev[i], m = dist.mean[i];
    s += 0.5 * (sd * sd + m * m - 1.0 - 2.0 * std::log(sd));
  }
  return s;
}

double LossBreakdown::value(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t.value;
  }
  fail(ErrorCode::kNotFound, "no loss term '" + name + "'");
}

double LossBreakdown::weighted(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t.weighted();
  }
  fail(ErrorCode::kNotFound, "no loss term '" + name + "'");
}

namespace {

void check_shapes(std::span<const MotionFeatureFrame> pred,
                  std::span<const MotionFeatureFrame> target) {
  require(!pred.empty(), ErrorCode::kInvalidArgument, "loss: empty frame sequence");
  require(pred.size() == target.size(), ErrorCode::kDimensionMismatch,
          "loss: predicted and target sequences differ in length (" +
              std::to_string(pred.size()) + " vs " + std::to_string(target.size()) + ")");
  for (std::size_t t = 0; t < pred.size(); ++t) {
    require(pred[t].num_dofs() == target[t].num_dofs() &&
                pred[t].num_contacts() == target[t].num_contacts(),
            ErrorCode::kDimensionMismatch, "loss: frame " + std::to_string(t) + " shapes differ");
  }
}

double reconstruction(std::span<const MotionFeatureFrame> pred,
                      std::span<const MotionFeatureFrame> target) {
  double s = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) s += huber_sum(pred[t].flatten() - target[t].flatten());
  return s / static_cast<double>(pred.size());
}

void finish(LossBreakdown& b) {
  b.total = 0.0;
  for (const auto& t : b.terms) b.total += t.weighted();
}

}  // namespace

LossBreakdown geometric_loss(std::span<const MotionFeatureFrame> pred,
                             std::span<const MotionFeatureFrame> target,
                             const SkeletonSpec& skeleton, const LossWeights& w,
                             const InitialPose& anchor) {
  check_shapes(pred, target);
  require(pred[0].num_dofs() == skeleton.num_dofs(), ErrorCode::kDimensionMismatch,
          "loss: frames have " + std::to_string(pred[0].num_dofs()) + " DoFs, skeleton has " +
              std::to_string(skeleton.num_dofs()));
  const RawMotion rp = decode_features(pred, anchor);
  const RawMotion rt = decode_features(target, anchor);
  double trans = 0, rot = 0, dof = 0, vel = 0, contact = 0;
  for (std::size_t t = 0; t < rp.size(); ++t) {
    const BodyPose bp = forward_kinematics(skeleton, rp[t].p, rp[t].R, rp[t].q);
    const BodyPose bt = forward_kinematics(skeleton, rt[t].p, rt[t].R, rt[t].q);
    for (std::size_t l = 1; l < bp.link_positions.size(); ++l) {
      trans += huber_sum(bp.link_positions[l] - bt.link_positions[l]);
      rot += huber(quat_geodesic(bp.link_orientations[l], bt.link_orientations[l]));
    }
    dof += huber_sum(pred[t].q - target[t].q);
    vel += huber_sum(pred[t].dq - target[t].dq);
    for (int foot = 0; foot < 2; ++foot) {
      if (foot < target[t].num_contacts() && target[t].c[foot] >= 0.5) {
        const auto link = static_cast<std::size_t>(skeleton.ankle_joints[static_cast<std::size_t>(foot)] + 1);
        contact += huber_sum(bp.link_positions[link] - bt.link_positions[link]);
      }
    }
  }
  const double n = static_cast<double>(rp.size());
  LossBreakdown b;
  b.terms = {{"body_trans", trans / n, w.trans}, {"body_rot", rot / n, w.rot},
             {"dof", dof / n, w.dof},            {"dof_vel", vel / n, w.vel},
             {"contact", contact / n, w.contact}};
  finish(b);
  return b;
}

LossBreakdown vae_loss(std::span<const MotionFeatureFrame> pred,
                       std::span<const MotionFeatureFrame> target, const DiagonalGaussian& dist,
                       const SkeletonSpec& skeleton, const LossWeights& w,
                       const InitialPose& anchor) {
  LossBreakdown b = geometric_loss(pred, target, skeleton, w, anchor);
  b.terms.insert(b.terms.begin(), {{"rec", reconstruction(pred, target), w.rec},
                                   {"kl", kl_to_standard_normal(dist), w.kl}});
  finish(b);
  return b;
}

LossBreakdown ldm_loss(const Latent& z0_hat, const Latent& z0,
                       std::span<const MotionFeatureFrame> pred,
                       std::span<const MotionFeatureFrame> target, const SkeletonSpec& skeleton,
                       const LossWeights& w, const InitialPose& anchor) {
  require(z0_hat.size() == z0.size(), ErrorCode::kDimensionMismatch,
          "ldm_loss: latent sizes differ");
  LossBreakdown b = geometric_loss(pred, target, skeleton, w, anchor);
  b.terms.insert(b.terms.begin(), {{"simple", huber_sum(z0_hat - z0), w.simple},
                                   {"rec", reconstruction(pred, target), w.rec}});
  finish(b);
  return b;
}

}  // namespace motionstream
