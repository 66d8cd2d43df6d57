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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace motionstream {

// Versioned binary container for codecs, retrieval indices, feature
// sequences and embeddings. Layout (all integers and floats little-endian):
//
//   char[8]  magic "MSTRMBIN"
//   u32      format version (1)
//   u32      kind length, then kind bytes (e.g. "pca_codec")
//   u32      entry count
//   entries, each:
//     u8     tag (0 = matrix, 1 = string list)
//     u32    name length, then name bytes
//     matrix:      u64 rows, u64 cols, rows * cols f64 in row-major order
//     string list: u64 count, then per string u32 length + bytes
//
// Entries are written in name order.
struct BinaryContainer {
  std::string kind;
  std::map<std::string, Eigen::MatrixXd> matrices;
  std::map<std::string, std::vector<std::string>> strings;

  const Eigen::MatrixXd& matrix(const std::string& name) const;
  const std::vector<std::string>& string_list(const std::string& name) const;
  double scalar(const std::string& name) const;
  void set_scalar(const std::string& name, double value);
};

inline constexpr std::string_view kContainerMagic = "MSTRMBIN";
inline constexpr std::uint32_t kContainerVersion = 1;

std::string serialize_container(const BinaryContainer& c);
// Throws kFormat (bad magic or tag), kVersionMismatch, or kTruncated with the
// byte offset where data ran out.
BinaryContainer parse_container(std::string_view bytes);

void save_container(const BinaryContainer& c, const std::filesystem::path& path);
BinaryContainer load_container(const std::filesystem::path& path,
                               std::string_view expected_kind = {});

}  // namespace motionstream
