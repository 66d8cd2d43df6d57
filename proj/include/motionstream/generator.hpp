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

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "motionstream/codec.hpp"
#include "motionstream/diffusion.hpp"
#include "motionstream/primitives.hpp"
#include "motionstream/text.hpp"

namespace motionstream {

struct GenerationStats {
  double embed_ms = 0.0;
  double generator_ms = 0.0;  // sampling plus decoding
};

// Produces the next block of future frames from the history and a command.
class MotionGenerator {
 public:
  virtual ~MotionGenerator() = default;
  virtual int future_frames() const = 0;
  virtual std::vector<MotionFeatureFrame> generate(std::span<const MotionFeatureFrame> history,
                                                   const std::string& command,
                                                   std::mt19937_64& rng,
                                                   GenerationStats* stats = nullptr) const = 0;
};

// Repeats the last history frame with zero yaw, translation and joint
// increments, so the decoded pose stays where it is.
class HoldGenerator final : public MotionGenerator {
 public:
  explicit HoldGenerator(int future_frames = kFutureFrames);
  int future_frames() const override { return future_frames_; }
  std::vector<MotionFeatureFrame> generate(std::span<const MotionFeatureFrame> history,
                                           const std::string& command, std::mt19937_64& rng,
                                           GenerationStats* stats) const override;

 private:
  int future_frames_;
};

// Embeds the command, samples a latent with guided DDPM and decodes it.
class LatentDiffusionGenerator final : public MotionGenerator {
 public:
  LatentDiffusionGenerator(std::shared_ptr<const LatentCodec> codec,
                           std::shared_ptr<const Denoiser> denoiser, NoiseSchedule schedule,
                           std::shared_ptr<const TextEmbedder> embedder,
                           SamplerOptions options = {});
  int future_frames() const override { return codec_->future_frames(); }
  std::vector<MotionFeatureFrame> generate(std::span<const MotionFeatureFrame> history,
                                           const std::string& command, std::mt19937_64& rng,
                                           GenerationStats* stats) const override;

 private:
  std::shared_ptr<const LatentCodec> codec_;
  std::shared_ptr<const Denoiser> denoiser_;
  NoiseSchedule schedule_;
  std::shared_ptr<const TextEmbedder> embedder_;
  SamplerOptions options_;
};

}  // namespace motionstream
