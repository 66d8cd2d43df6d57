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

#include "motionstream/codec.hpp"

#include <Eigen/Eigenvalues>

#include "motionstream/error.hpp"

namespace motionstream {

Eigen::VectorXd flatten_frames(std::span<const MotionFeatureFrame> frames) {
  require(!frames.empty(), ErrorCode::kInvalidArgument, "flatten_frames: no frames");
  const int d = frames[0].dim();
  Eigen::VectorXd out(static_cast<Eigen::Index>(frames.size()) * d);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    require(frames[t].dim() == d, ErrorCode::kDimensionMismatch,
            "flatten_frames: frames differ in dimension");
    out.segment(static_cast<Eigen::Index>(t) * d, d) = frames[t].flatten();
  }
  return out;
}

PcaCodec PcaCodec::fit(std::span<const FeatureWindow> windows, int latent_dim) {
  require(latent_dim >= 1, ErrorCode::kInvalidArgument, "PCA latent dimension must be positive");
  require(static_cast<int>(windows.size()) >= latent_dim + 1, ErrorCode::kInvalidArgument,
          "PCA fit needs at least latent_dim + 1 = " + std::to_string(latent_dim + 1) +
              " windows, got " + std::to_string(windows.size()));
  const auto& first = windows[0].future;
  require(!first.empty(), ErrorCode::kInvalidArgument, "PCA fit: empty future window");

  PcaCodec codec;
  codec.n_q_ = first[0].num_dofs();
  codec.n_c_ = first[0].num_contacts();
  codec.future_frames_ = static_cast<int>(first.size());
  const Eigen::Index flat_dim = static_cast<Eigen::Index>(first.size()) * first[0].dim();
  require(latent_dim <= flat_dim, ErrorCode::kInvalidArgument,
          "PCA latent dimension " + std::to_string(latent_dim) +
              " exceeds flattened future dimension " + std::to_string(flat_dim));

  const auto n = static_cast<Eigen::Index>(windows.size());
  Eigen::MatrixXd data(n, flat_dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& w = windows[static_cast<std::size_t>(i)].future;
    require(static_cast<int>(w.size()) == codec.future_frames_, ErrorCode::kDimensionMismatch,
            "PCA fit: windows differ in future length");
    data.row(i) = flatten_frames(w).transpose();
  }
  codec.mean_ = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - codec.mean_.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  require(eig.info() == Eigen::Success, ErrorCode::kNumerical, "PCA eigendecomposition failed");
  // Eigen returns ascending order.
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();
  codec.spectrum_ = values.cwiseMax(0.0);

  // Relative cut for small directions, plus an absolute floor at the
  // round-off level of centering so constant data reads as rank 0.
  const double scale = std::max(values[0], 0.0);
  const double floor = 1e-20 * (1.0 + data.cwiseAbs2().mean());
  const double tol = std::max(scale * 1e-12 * static_cast<double>(flat_dim), floor);
  int rank = 0;
  while (rank < values.size() && values[rank] > tol && values[rank] > 0.0) ++rank;
  if (rank > 0 && rank < latent_dim) {
    fail(ErrorCode::kRankDeficient, "PCA data has rank " + std::to_string(rank) +
                                        ", below the requested latent dimension " +
                                        std::to_string(latent_dim) + "; achievable rank is " +
                                        std::to_string(rank));
  }
  codec.basis_ = vectors.leftCols(latent_dim);
  return codec;
}

Latent PcaCodec::encode_flat(const Eigen::VectorXd& flat_future) const {
  require(flat_future.size() == mean_.size(), ErrorCode::kDimensionMismatch,
          "PcaCodec::encode: flattened future has " + std::to_string(flat_future.size()) +
              " entries, expected " + std::to_string(mean_.size()));
  return basis_.transpose() * (flat_future - mean_);
}

Eigen::VectorXd PcaCodec::decode_flat(const Latent& z) const {
  require(z.size() == basis_.cols(), ErrorCode::kDimensionMismatch,
          "PcaCodec::decode: latent has " + std::to_string(z.size()) + " entries, expected " +
              std::to_string(basis_.cols()));
  return mean_ + basis_ * z;
}

Latent PcaCodec::encode(std::span<const MotionFeatureFrame> /*history*/,
                        std::span<const MotionFeatureFrame> future) const {
  return encode_flat(flatten_frames(future));
}

std::vector<MotionFeatureFrame> PcaCodec::decode(std::span<const MotionFeatureFrame> /*history*/,
                                                 const Latent& z) const {
  const Eigen::VectorXd flat = decode_flat(z);
  const int d = feature_dim(n_q_, n_c_);
  std::vector<MotionFeatureFrame> out;
  out.reserve(static_cast<std::size_t>(future_frames_));
  for (int t = 0; t < future_frames_; ++t) {
    out.push_back(MotionFeatureFrame::unflatten(flat.segment(t * d, d), n_q_, n_c_));
  }
  return out;
}

BinaryContainer PcaCodec::to_container() const {
  BinaryContainer c;
  c.kind = "pca_codec";
  c.set_scalar("n_q", n_q_);
  c.set_scalar("n_c", n_c_);
  c.set_scalar("future_frames", future_frames_);
  c.matrices["mean"] = mean_;
  c.matrices["basis"] = basis_;
  c.matrices["spectrum"] = spectrum_;
  return c;
}

PcaCodec PcaCodec::from_container(const BinaryContainer& c) {
  require(c.kind == "pca_codec", ErrorCode::kFormat, "container is not a pca_codec");
  PcaCodec codec;
  codec.n_q_ = static_cast<int>(c.scalar("n_q"));
  codec.n_c_ = static_cast<int>(c.scalar("n_c"));
  codec.future_frames_ = static_cast<int>(c.scalar("future_frames"));
  codec.mean_ = c.matrix("mean");
  codec.basis_ = c.matrix("basis");
  codec.spectrum_ = c.matrix("spectrum");
  require(codec.mean_.size() == static_cast<Eigen::Index>(codec.future_frames_) *
                                    feature_dim(codec.n_q_, codec.n_c_) &&
              codec.basis_.rows() == codec.mean_.size(),
          ErrorCode::kFormat, "pca_codec dimensions are inconsistent");
  return codec;
}

void PcaCodec::save(const std::filesystem::path& path) const {
  save_container(to_container(), path);
}

PcaCodec PcaCodec::load(const std::filesystem::path& path) {
  return from_container(load_container(path, "pca_codec"));
}

}  // namespace motionstream
