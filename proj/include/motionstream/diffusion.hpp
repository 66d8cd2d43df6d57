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
#include <vector>

#include <Eigen/Core>

#include "motionstream/motion_rep.hpp"

namespace motionstream {

using Latent = Eigen::VectorXd;

inline constexpr int kDefaultDiffusionSteps = 5;
inline constexpr double kDefaultGuidanceScale = 5.0;
inline constexpr double kCosineScheduleOffset = 0.008;
inline constexpr double kMaxBeta = 0.999;

// DDPM noise schedule. Steps are 1-based in the formulas; index k - 1 here.
struct NoiseSchedule {
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;

  int steps() const { return static_cast<int>(beta.size()); }
  double beta_at(int k) const { return beta.at(static_cast<std::size_t>(k - 1)); }
  double alpha_at(int k) const { return alpha.at(static_cast<std::size_t>(k - 1)); }
  double alpha_bar_at(int k) const { return alpha_bar.at(static_cast<std::size_t>(k - 1)); }
};

// Improved-DDPM cosine schedule: alpha_bar(k) = f(k) / f(0) with
// f(k) = cos^2(((k / K + s) / (1 + s)) * pi / 2), s = 0.008, and
// beta_k = 1 - alpha_bar(k) / alpha_bar(k - 1) clipped to 0.999. alpha_bar is
// then re-accumulated from the clipped betas so alpha_bar = prod(alpha).
NoiseSchedule cosine_schedule(int steps);

// z_k = sqrt(alpha_bar_k) z_0 + sqrt(1 - alpha_bar_k) eps.
Latent add_noise(const Latent& z0, int k, const NoiseSchedule& schedule, const Latent& eps);

// eps_theta = (z_k - sqrt(alpha_bar_k) z0_hat) / sqrt(1 - alpha_bar_k).
Latent predicted_noise(const Latent& z_k, const Latent& z0_hat, int k,
                       const NoiseSchedule& schedule);

// Unit-norm text embedding. A null pointer in the denoiser contract is the
// unconditional branch.
struct TextEmbedding {
  Eigen::VectorXd values;

  // Normalizes `v`; throws on a zero or non-finite vector.
  static TextEmbedding from_vector(const Eigen::VectorXd& v);
  int dim() const { return static_cast<int>(values.size()); }
};

// Predicts the clean latent z0_hat from (z_k, k, history, text).
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Latent predict(const Latent& z_k, int k, std::span<const MotionFeatureFrame> history,
                         const TextEmbedding* text) const = 0;
};

// z0_hat = F(null) + sigma * (F(e) - F(null)), combined on clean-latent
// predictions.
Latent cfg_predict(const Denoiser& denoiser, const Latent& z_k, int k,
                   std::span<const MotionFeatureFrame> history, const TextEmbedding& text,
                   double guidance_scale);

struct SamplerOptions {
  double guidance_scale = kDefaultGuidanceScale;
  // When false the last reverse step (k = 1) adds no noise. True reproduces
  // the loop that adds sigma_k * eps at every step.
  bool terminal_noise = false;
};

// Ancestral DDPM sampling from z_K ~ N(0, I) down to z_0, with sigma_k^2 =
// beta_k. `text` may be null for purely unconditional sampling. Throws
// Error(kNumerical) naming the step if a NaN or Inf appears.
Latent ddpm_sample(const Denoiser& denoiser, std::span<const MotionFeatureFrame> history,
                   const TextEmbedding* text, const NoiseSchedule& schedule, int latent_dim,
                   std::mt19937_64& rng, const SamplerOptions& options = {});

Latent standard_normal(int dim, std::mt19937_64& rng);

// Bayes-optimal clean-latent predictor for a diagonal Gaussian prior
// z0 ~ N(mu, diag(var)). With a = alpha_bar_k, per dimension
//
//   E[z0 | z_k] = (sqrt(a) var z_k + (1 - a) mu) / (a var + 1 - a).
//
// Ignores history and text.
class LinearGaussianDenoiser final : public Denoiser {
 public:
  LinearGaussianDenoiser(Latent mean, Eigen::VectorXd variance, NoiseSchedule schedule);

  Latent predict(const Latent& z_k, int k, std::span<const MotionFeatureFrame> history,
                 const TextEmbedding* text) const override;

  // Same posterior mean for an explicit alpha_bar, for limit checks.
  Latent posterior_mean(const Latent& z_k, double alpha_bar) const;

 private:
  Latent mean_;
  Eigen::VectorXd variance_;
  NoiseSchedule schedule_;
};

}  // namespace motionstream
