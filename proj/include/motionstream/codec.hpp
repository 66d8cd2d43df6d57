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

#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "motionstream/container.hpp"
#include "motionstream/diffusion.hpp"
#include "motionstream/motion_rep.hpp"

namespace motionstream {

// History and future frames of one motion primitive.
struct FeatureWindow {
  std::vector<MotionFeatureFrame> history;
  std::vector<MotionFeatureFrame> future;
};

// Maps the future frames of a primitive to a latent and back, conditioned
// on the history.
class LatentCodec {
 public:
  virtual ~LatentCodec() = default;
  virtual int latent_dim() const = 0;
  virtual int future_frames() const = 0;
  virtual Latent encode(std::span<const MotionFeatureFrame> history,
                        std::span<const MotionFeatureFrame> future) const = 0;
  virtual std::vector<MotionFeatureFrame> decode(std::span<const MotionFeatureFrame> history,
                                                 const Latent& z) const = 0;
};

// Linear codec from principal components of the flattened future frames.
// History is accepted but not used.
class PcaCodec final : public LatentCodec {
 public:
  // Needs at least latent_dim + 1 windows and latent_dim <= flattened future
  // dimension. Throws kRankDeficient, naming the achievable rank, when the
  // centered data has nonzero rank below latent_dim. Constant data (rank 0)
  // is accepted: every latent is zero and decode returns the mean.
  static PcaCodec fit(std::span<const FeatureWindow> windows, int latent_dim);

  int latent_dim() const override { return static_cast<int>(basis_.cols()); }
  int future_frames() const override { return future_frames_; }
  int num_dofs() const { return n_q_; }
  int num_contacts() const { return n_c_; }

  Latent encode(std::span<const MotionFeatureFrame> history,
                std::span<const MotionFeatureFrame> future) const override;
  std::vector<MotionFeatureFrame> decode(std::span<const MotionFeatureFrame> history,
                                         const Latent& z) const override;

  Latent encode_flat(const Eigen::VectorXd& flat_future) const;
  Eigen::VectorXd decode_flat(const Latent& z) const;

  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& basis() const { return basis_; }
  // Eigenvalues of the fitting covariance (1/N normalization), descending,
  // for every direction of the flattened space.
  const Eigen::VectorXd& spectrum() const { return spectrum_; }

  BinaryContainer to_container() const;
  static PcaCodec from_container(const BinaryContainer& c);
  void save(const std::filesystem::path& path) const;
  static PcaCodec load(const std::filesystem::path& path);

 private:
  int n_q_ = 0;
  int n_c_ = 0;
  int future_frames_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd basis_;  // flat_dim x latent_dim, orthonormal columns
  Eigen::VectorXd spectrum_;
};

Eigen::VectorXd flatten_frames(std::span<const MotionFeatureFrame> frames);

}  // namespace motionstream
