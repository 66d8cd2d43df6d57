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

#include "motionstream/generator.hpp"

#include <chrono>

#include "motionstream/error.hpp"

namespace motionstream {

namespace {
double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}
}  // namespace

HoldGenerator::HoldGenerator(int future_frames) : future_frames_(future_frames) {
  require(future_frames >= 1, ErrorCode::kInvalidArgument, "HoldGenerator: need >= 1 frame");
}

std::vector<MotionFeatureFrame> HoldGenerator::generate(std::span<const MotionFeatureFrame> history,
                                                        const std::string& /*command*/,
                                                        std::mt19937_64& /*rng*/,
                                                        GenerationStats* stats) const {
  require(!history.empty(), ErrorCode::kInvalidArgument, "HoldGenerator: empty history");
  MotionFeatureFrame f = history.back();
  f.dyaw = 0.0;
  f.dp_local.setZero();
  f.dq.setZero();
  if (stats != nullptr) *stats = {};
  return std::vector<MotionFeatureFrame>(static_cast<std::size_t>(future_frames_), f);
}

LatentDiffusionGenerator::LatentDiffusionGenerator(std::shared_ptr<const LatentCodec> codec,
                                                   std::shared_ptr<const Denoiser> denoiser,
                                                   NoiseSchedule schedule,
                                                   std::shared_ptr<const TextEmbedder> embedder,
                                                   SamplerOptions options)
    : codec_(std::move(codec)),
      denoiser_(std::move(denoiser)),
      schedule_(std::move(schedule)),
      embedder_(std::move(embedder)),
      options_(options) {
  require(codec_ && denoiser_ && embedder_, ErrorCode::kInvalidArgument,
          "LatentDiffusionGenerator: codec, denoiser and embedder are required");
  require(schedule_.steps() >= 1, ErrorCode::kInvalidArgument,
          "LatentDiffusionGenerator: empty noise schedule");
}

std::vector<MotionFeatureFrame> LatentDiffusionGenerator::generate(
    std::span<const MotionFeatureFrame> history, const std::string& command, std::mt19937_64& rng,
    GenerationStats* stats) const {
  auto t0 = std::chrono::steady_clock::now();
  const auto e = embedder_->embed(command);
  const double embed_ms = ms_since(t0);
  t0 = std::chrono::steady_clock::now();
  const Latent z = ddpm_sample(*denoiser_, history, e ? &*e : nullptr, schedule_,
                               codec_->latent_dim(), rng, options_);
  auto block = codec_->decode(history, z);
  if (stats != nullptr) *stats = {embed_ms, ms_since(t0)};
  return block;
}

}  // namespace motionstream
