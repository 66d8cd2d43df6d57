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
#include <string>
#include <vector>

#include <Eigen/Core>

#include "motionstream/codec.hpp"
#include "motionstream/container.hpp"
#include "motionstream/diffusion.hpp"
#include "motionstream/text.hpp"

namespace motionstream {

// One stored primitive: its key (history summary and text embedding), the
// clean latent of its future, a label, and the flattened future frames used
// for nearest-label lookups.
struct RetrievalEntry {
  Eigen::VectorXd history_summary;
  Eigen::VectorXd text;  // zero vector for the null text
  Latent latent;
  std::string label;
  Eigen::VectorXd future;
};

// The history summary is the flattened history frames.
Eigen::VectorXd history_summary(std::span<const MotionFeatureFrame> history);

class RetrievalIndex {
 public:
  // All entries must share the dimensions of the first.
  void add(RetrievalEntry entry);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const RetrievalEntry& entry(std::size_t i) const { return entries_.at(i); }
  const std::vector<RetrievalEntry>& entries() const { return entries_; }

  // Index minimizing w_h * |summary - key_h| + w_e * |text - key_e|, where a
  // null text is the zero vector. Ties go to the lower insertion index.
  // Throws kNotFound on an empty index.
  std::size_t nearest(const Eigen::VectorXd& summary, const TextEmbedding* text,
                      double w_h = 1.0, double w_e = 1.0) const;

  // Label of the entry whose stored future is closest (Euclidean) to the
  // flattened frames; ties go to the lower index.
  const std::string& nearest_label(const Eigen::VectorXd& future_flat) const;

  BinaryContainer to_container() const;
  static RetrievalIndex from_container(const BinaryContainer& c);
  void save(const std::filesystem::path& path) const;
  static RetrievalIndex load(const std::filesystem::path& path);

 private:
  std::vector<RetrievalEntry> entries_;
};

// Encodes each window with the codec and stores it under its text.
RetrievalIndex build_retrieval_index(std::span<const FeatureWindow> windows,
                                     std::span<const std::string> texts,
                                     const LatentCodec& codec, const TextEmbedder& embedder);

// Returns the clean latent of the nearest stored entry; z_k and k are
// ignored.
class RetrievalDenoiser final : public Denoiser {
 public:
  explicit RetrievalDenoiser(const RetrievalIndex& index, double w_h = 1.0, double w_e = 1.0);
  Latent predict(const Latent& z_k, int k, std::span<const MotionFeatureFrame> history,
                 const TextEmbedding* text) const override;

 private:
  const RetrievalIndex& index_;
  double w_h_, w_e_;
};

}  // namespace motionstream
