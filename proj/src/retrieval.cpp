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

#include "motionstream/retrieval.hpp"

#include <limits>

#include "motionstream/error.hpp"

namespace motionstream {

Eigen::VectorXd history_summary(std::span<const MotionFeatureFrame> history) {
  return flatten_frames(history);
}

void RetrievalIndex::add(RetrievalEntry entry) {
  if (!entries_.empty()) {
    const auto& f = entries_.front();
    require(entry.history_summary.size() == f.history_summary.size() &&
                entry.text.size() == f.text.size() && entry.latent.size() == f.latent.size() &&
                entry.future.size() == f.future.size(),
            ErrorCode::kDimensionMismatch, "retrieval entry dimensions differ from the index");
  }
  entries_.push_back(std::move(entry));
}

std::size_t RetrievalIndex::nearest(const Eigen::VectorXd& summary, const TextEmbedding* text,
                                    double w_h, double w_e) const {
  require(!entries_.empty(), ErrorCode::kNotFound, "retrieval index is empty");
  const auto& f = entries_.front();
  require(summary.size() == f.history_summary.size(), ErrorCode::kDimensionMismatch,
          "retrieval query history has " + std::to_string(summary.size()) +
              " entries, index expects " + std::to_string(f.history_summary.size()));
  const Eigen::VectorXd e = text != nullptr ? text->values : Eigen::VectorXd::Zero(f.text.size());
  require(e.size() == f.text.size(), ErrorCode::kDimensionMismatch,
          "retrieval query text dimension differs from the index");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& en = entries_[i];
    const double d =
        w_h * (summary - en.history_summary).norm() + w_e * (e - en.text).norm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

const std::string& RetrievalIndex::nearest_label(const Eigen::VectorXd& future_flat) const {
  require(!entries_.empty(), ErrorCode::kNotFound, "retrieval index is empty");
  require(future_flat.size() == entries_.front().future.size(), ErrorCode::kDimensionMismatch,
          "nearest_label: future dimension differs from the index");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double d = (future_flat - entries_[i].future).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return entries_[best].label;
}

namespace {

Eigen::MatrixXd stack(const std::vector<RetrievalEntry>& es,
                      const Eigen::VectorXd RetrievalEntry::*field) {
  if (es.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(es.size()), (es.front().*field).size());
  for (std::size_t i = 0; i < es.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = (es[i].*field).transpose();
  }
  return m;
}

}  // namespace

BinaryContainer RetrievalIndex::to_container() const {
  BinaryContainer c;
  c.kind = "retrieval_index";
  c.matrices["history_summary"] = stack(entries_, &RetrievalEntry::history_summary);
  c.matrices["text"] = stack(entries_, &RetrievalEntry::text);
  c.matrices["latent"] = stack(entries_, &RetrievalEntry::latent);
  c.matrices["future"] = stack(entries_, &RetrievalEntry::future);
  auto& labels = c.strings["label"];
  for (const auto& e : entries_) labels.push_back(e.label);
  return c;
}

RetrievalIndex RetrievalIndex::from_container(const BinaryContainer& c) {
  require(c.kind == "retrieval_index", ErrorCode::kFormat, "container is not a retrieval_index");
  const auto& h = c.matrix("history_summary");
  const auto& t = c.matrix("text");
  const auto& z = c.matrix("latent");
  const auto& f = c.matrix("future");
  const auto& labels = c.string_list("label");
  const auto n = static_cast<Eigen::Index>(labels.size());
  require(h.rows() == n && t.rows() == n && z.rows() == n && f.rows() == n, ErrorCode::kFormat,
          "retrieval_index entry counts are inconsistent");
  RetrievalIndex index;
  for (Eigen::Index i = 0; i < n; ++i) {
    index.add({h.row(i).transpose(), t.row(i).transpose(), z.row(i).transpose(),
               labels[static_cast<std::size_t>(i)], f.row(i).transpose()});
  }
  return index;
}

void RetrievalIndex::save(const std::filesystem::path& path) const {
  save_container(to_container(), path);
}

RetrievalIndex RetrievalIndex::load(const std::filesystem::path& path) {
  return from_container(load_container(path, "retrieval_index"));
}

RetrievalIndex build_retrieval_index(std::span<const FeatureWindow> windows,
                                     std::span<const std::string> texts,
                                     const LatentCodec& codec, const TextEmbedder& embedder) {
  require(windows.size() == texts.size(), ErrorCode::kDimensionMismatch,
          "build_retrieval_index: one text per window required");
  RetrievalIndex index;
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto& w = windows[i];
    const auto e = embedder.embed(texts[i]);
    index.add({history_summary(w.history),
               e ? e->values : Eigen::VectorXd::Zero(embedder.dim()),
               codec.encode(w.history, w.future), texts[i], flatten_frames(w.future)});
  }
  return index;
}

RetrievalDenoiser::RetrievalDenoiser(const RetrievalIndex& index, double w_h, double w_e)
    : index_(index), w_h_(w_h), w_e_(w_e) {
  require(!index.empty(), ErrorCode::kNotFound, "retrieval denoiser needs a non-empty index");
}

Latent RetrievalDenoiser::predict(const Latent& /*z_k*/, int /*k*/,
                                  std::span<const MotionFeatureFrame> history,
                                  const TextEmbedding* text) const {
  return index_.entry(index_.nearest(history_summary(history), text, w_h_, w_e_)).latent;
}

}  // namespace motionstream
