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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "motionstream/diffusion.hpp"

namespace motionstream {

inline constexpr int kDefaultTextEmbeddingDim = 64;

// Maps a command string to a unit text embedding. An empty result is the
// unconditional (null) text.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual int dim() const = 0;
  virtual std::optional<TextEmbedding> embed(std::string_view text) const = 0;
};

// Lowercased maximal runs of ASCII letters and digits.
std::vector<std::string> tokenize(std::string_view text);

// Hashed bag of words: each token adds +-1 to one bucket chosen by its
// 64-bit FNV-1a hash (bucket = hash mod dim, sign from the top bit), then the
// vector is L2-normalized. Text without tokens, or whose tokens cancel, maps
// to the null embedding.
class HashedTextEmbedder final : public TextEmbedder {
 public:
  explicit HashedTextEmbedder(int dim = kDefaultTextEmbeddingDim);
  int dim() const override { return dim_; }
  std::optional<TextEmbedding> embed(std::string_view text) const override;

 private:
  int dim_;
};

}  // namespace motionstream
