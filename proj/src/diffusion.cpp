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

#include "motionstream/diffusion.hpp"

#include <cmath>
#include <numbers>

#include "motionstream/error.hpp"

namespace motionstream {

NoiseSchedule cosine_schedule(int steps) {
  require(steps >= 1, ErrorCode::kInvalidArgument, "cosine_schedule needs at least one step");
  const double s = kCosineScheduleOffset;
  auto f = [&](double k) {
    const double c = std::cos(((k / steps + s) / (1.0 + s)) * std::numbers::pi / 2.0);
    return c * c;
  };
  const double f0 = f(0.0);
  NoiseSchedule out;
  double prev_bar = 1.0;
  double cumulative = 1.0;
  for (int k = 1; k <= steps; ++k) {
    const double bar = f(k) / f0;
    const double beta = std::min(1.0 - bar / prev_bar, kMaxBeta);
    prev_bar = bar;
    const double alpha = 1.0 - beta;
    cumulative *= alpha;
    out.beta.push_back(beta);
    out.alpha.push_back(alpha);
    out.alpha_bar.push_back(cumulative);
  }
  return out;
}

Latent add_noise(const Latent& z0, int k, const NoiseSchedule& schedule, const Latent& eps) {
  require(z0.size() == eps.size(), ErrorCode::kDimensionMismatch,
          "add_noise: latent and noise dimensions differ");
  require(k >= 1 && k <= schedule.steps(), ErrorCode::kInvalidArgument,
          "add_noise: step out of range");
  const double a = schedule.alpha_bar_at(k);
  return std::sqrt(a) * z0 + std::sqrt(1.0 - a) * eps;
}

Latent predicted_noise(const Latent& z_k, const Latent& z0_hat, int k,
                       const NoiseSchedule& schedule) {
  require(z_k.size() == z0_hat.size(), ErrorCode::kDimensionMismatch,
          "predicted_noise: dimension mismatch");
  const double a = schedule.alpha_bar_at(k);
  return (z_k - std::sqrt(a) * z0_hat) / std::sqrt(1.0 - a);
}

TextEmbedding TextEmbedding::from_vector(const Eigen::VectorXd& v) {
  const double n = v.norm();
  require(std::isfinite(n) && n > 0.0, ErrorCode::kInvalidArgument,
          "text embedding must be finite and non-zero");
  return TextEmbedding{v / n};
}

Latent cfg_predict(const Denoiser& denoiser, const Latent& z_k, int k,
                   std::span<const MotionFeatureFrame> history, const TextEmbedding& text,
                   double guidance_scale) {
  const Latent uncond = denoiser.predict(z_k, k, history, nullptr);
  const Latent cond = denoiser.predict(z_k, k, history, &text);
  require(uncond.size() == cond.size(), ErrorCode::kDimensionMismatch,
          "cfg_predict: branch outputs differ in dimension");
  // Written as (1 - s) u + s c so that s = 0 and s = 1 return a branch
  // bit-for-bit.
  return (1.0 - guidance_scale) * uncond + guidance_scale * cond;
}

Latent standard_normal(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Latent z(dim);
  for (int i = 0; i < dim; ++i) z[i] = n(rng);
  return z;
}

Latent ddpm_sample(const Denoiser& denoiser, std::span<const MotionFeatureFrame> history,
                   const TextEmbedding* text, const NoiseSchedule& schedule, int latent_dim,
                   std::mt19937_64& rng, const SamplerOptions& options) {
  Latent z = standard_normal(latent_dim, rng);
  for (int k = schedule.steps(); k >= 1; --k) {
    const Latent z0_hat =
        text != nullptr ? cfg_predict(denoiser, z, k, history, *text, options.guidance_scale)
                        : denoiser.predict(z, k, history, nullptr);
    require(z0_hat.size() == latent_dim, ErrorCode::kDimensionMismatch,
            "ddpm_sample: denoiser returned a latent of the wrong size");
    const double alpha = schedule.alpha_at(k);
    const double alpha_bar = schedule.alpha_bar_at(k);
    const Latent eps_theta = predicted_noise(z, z0_hat, k, schedule);
    Latent next = (z - ((1.0 - alpha) / std::sqrt(1.0 - alpha_bar)) * eps_theta) / std::sqrt(alpha);
    if (k > 1 || options.terminal_noise) {
      next += std::sqrt(schedule.beta_at(k)) * standard_normal(latent_dim, rng);
    }
    if (!next.allFinite()) {
      fail(ErrorCode::kNumerical, "ddpm_sample: non-finite latent at step k = " + std::to_string(k));
    }
    z = std::move(next);
  }
  return z;
}

LinearGaussianDenoiser::LinearGaussianDenoiser(Latent mean, Eigen::VectorXd variance,
                                               NoiseSchedule schedule)
    : mean_(std::move(mean)), variance_(std::move(variance)), schedule_(std::move(schedule)) {
  require(mean_.size() == variance_.size(), ErrorCode::kDimensionMismatch,
          "LinearGaussianDenoiser: mean and variance sizes differ");
  require((variance_.array() > 0.0).all(), ErrorCode::kInvalidArgument,
          "LinearGaussianDenoiser: variances must be positive");
}

Latent LinearGaussianDenoiser::posterior_mean(const Latent& z_k, double a) const {
  require(z_k.size() == mean_.size(), ErrorCode::kDimensionMismatch,
          "LinearGaussianDenoiser: latent size mismatch");
  const Eigen::ArrayXd var = variance_.array();
  return ((std::sqrt(a) * var * z_k.array() + (1.0 - a) * mean_.array()) /
          (a * var + (1.0 - a)))
      .matrix();
}

Latent LinearGaussianDenoiser::predict(const Latent& z_k, int k,
                                       std::span<const MotionFeatureFrame> /*history*/,
                                       const TextEmbedding* /*text*/) const {
  return posterior_mean(z_k, schedule_.alpha_bar_at(k));
}

}  // namespace motionstream
