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

#include "motionstream/text.hpp"

#include <cctype>

#include "motionstream/error.hpp"
#include "util.hpp"

namespace motionstream {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (u < 128 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

HashedTextEmbedder::HashedTextEmbedder(int dim) : dim_(dim) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "text embedding dimension must be positive");
}

std::optional<TextEmbedding> HashedTextEmbedder::embed(std::string_view text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  for (const auto& token : tokenize(text)) {
    const std::uint64_t h = detail::fnv1a64(token);
    v[static_cast<Eigen::Index>(h % static_cast<std::uint64_t>(dim_))] += (h >> 63) ? -1.0 : 1.0;
  }
  if (v.squaredNorm() == 0.0) return std::nullopt;
  return TextEmbedding::from_vector(v);
}

}  // namespace motionstream
