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

#include <span>
#include <string>
#include <vector>

#include "motionstream/diffusion.hpp"
#include "motionstream/kinematics.hpp"
#include "motionstream/motion_rep.hpp"

namespace motionstream {

struct LossWeights {
  double rec = 1.0;
  double kl = 1e-4;
  double simple = 1.0;
  double trans = 0.05;
  double rot = 1e-2;
  double dof = 0.03;
  double vel = 1e-5;
  double contact = 0.01;
};

inline constexpr double kHuberDelta = 1.0;

// Huber (smooth L1) with transition point delta, for one residual.
double huber(double residual, double delta = kHuberDelta);
// Sum of elementwise Huber over a residual vector.
double huber_sum(const Eigen::Ref<const Eigen::VectorXd>& residual, double delta = kHuberDelta);

// Encoder output distribution N(mean, diag(stddev^2)).
struct DiagonalGaussian {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};

// KL(N(mean, diag(stddev^2)) || N(0, I)), summed over dimensions.
double kl_to_standard_normal(const DiagonalGaussian& dist);

struct LossTerm {
  std::string name;
  double value = 0.0;   // unweighted
  double weight = 1.0;
  double weighted() const { return weight * value; }
};

struct LossBreakdown {
  std::vector<LossTerm> terms;
  double total = 0.0;
  // Unweighted value of a named term; throws kNotFound if absent.
  double value(const std::string& name) const;
  double weighted(const std::string& name) const;
};

// Frame-wise terms are summed over components within a frame and averaged
// over frames. Geometric terms decode both sequences from the same anchor,
// then compare non-root link positions (body_trans), link orientation
// geodesic angles (body_rot), q (dof), dq (dof_vel) and ankle positions at
// frames where the target contact flag is set (contact; normalized by the
// frame count).
LossBreakdown geometric_loss(std::span<const MotionFeatureFrame> pred,
                             std::span<const MotionFeatureFrame> target,
                             const SkeletonSpec& skeleton, const LossWeights& weights = {},
                             const InitialPose& anchor = {});

// lambda_rec L_rec + lambda_KL L_KL + L_geo.
LossBreakdown vae_loss(std::span<const MotionFeatureFrame> pred,
                       std::span<const MotionFeatureFrame> target, const DiagonalGaussian& dist,
                       const SkeletonSpec& skeleton, const LossWeights& weights = {},
                       const InitialPose& anchor = {});

// lambda_simple Huber(z0_hat, z0) + lambda_rec L_rec + L_geo.
LossBreakdown ldm_loss(const Latent& z0_hat, const Latent& z0,
                       std::span<const MotionFeatureFrame> pred,
                       std::span<const MotionFeatureFrame> target, const SkeletonSpec& skeleton,
                       const LossWeights& weights = {}, const InitialPose& anchor = {});

}  // namespace motionstream
