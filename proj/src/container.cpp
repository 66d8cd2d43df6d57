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

#include "motionstream/container.hpp"

#include "byte_io.hpp"
#include "motionstream/error.hpp"
#include "util.hpp"

namespace motionstream {

namespace {
constexpr std::uint8_t kTagMatrix = 0;
constexpr std::uint8_t kTagStrings = 1;
}  // namespace

const Eigen::MatrixXd& BinaryContainer::matrix(const std::string& name) const {
  auto it = matrices.find(name);
  if (it == matrices.end()) {
    fail(ErrorCode::kFormat, "container '" + kind + "' has no matrix '" + name + "'");
  }
  return it->second;
}

const std::vector<std::string>& BinaryContainer::string_list(const std::string& name) const {
  auto it = strings.find(name);
  if (it == strings.end()) {
    fail(ErrorCode::kFormat, "container '" + kind + "' has no string list '" + name + "'");
  }
  return it->second;
}

double BinaryContainer::scalar(const std::string& name) const {
  const Eigen::MatrixXd& m = matrix(name);
  require(m.size() == 1, ErrorCode::kFormat, "entry '" + name + "' is not a scalar");
  return m(0, 0);
}

void BinaryContainer::set_scalar(const std::string& name, double value) {
  matrices[name] = Eigen::MatrixXd::Constant(1, 1, value);
}

std::string serialize_container(const BinaryContainer& c) {
  detail::ByteWriter w;
  w.put_bytes(kContainerMagic);
  w.put<std::uint32_t>(kContainerVersion);
  w.put_string(c.kind);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(c.matrices.size() + c.strings.size()));
  for (const auto& [name, m] : c.matrices) {
    w.put<std::uint8_t>(kTagMatrix);
    w.put_string(name);
    w.put<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    w.put<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index col = 0; col < m.cols(); ++col) w.put<double>(m(r, col));
    }
  }
  for (const auto& [name, list] : c.strings) {
    w.put<std::uint8_t>(kTagStrings);
    w.put_string(name);
    w.put<std::uint64_t>(list.size());
    for (const auto& s : list) w.put_string(s);
  }
  return std::move(w.str());
}

BinaryContainer parse_container(std::string_view bytes) {
  detail::ByteReader r(bytes);
  const auto magic = r.get_bytes(kContainerMagic.size(), "magic");
  require(magic == kContainerMagic, ErrorCode::kFormat, "not a motionstream container (bad magic)");
  const auto version = r.get<std::uint32_t>("version");
  require(version == kContainerVersion, ErrorCode::kVersionMismatch,
          "unsupported container version " + std::to_string(version));
  BinaryContainer c;
  c.kind = r.get_string("kind");
  const auto count = r.get<std::uint32_t>("entry count");
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto tag = r.get<std::uint8_t>("entry tag");
    std::string name = r.get_string("entry name");
    if (tag == kTagMatrix) {
      const auto rows = r.get<std::uint64_t>("rows");
      const auto cols = r.get<std::uint64_t>("cols");
      // Guard the allocation against corrupt dimensions before reading data.
      require(cols == 0 || rows <= r.remaining() / 8 / cols, ErrorCode::kTruncated,
              "truncated at byte offset " + std::to_string(r.offset()) + ": matrix '" + name +
                  "' declares " + std::to_string(rows) + "x" + std::to_string(cols) +
                  " but only " + std::to_string(r.remaining()) + " bytes remain");
      Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (Eigen::Index row = 0; row < m.rows(); ++row) {
        for (Eigen::Index col = 0; col < m.cols(); ++col) m(row, col) = r.get<double>("matrix data");
      }
      c.matrices.emplace(std::move(name), std::move(m));
    } else if (tag == kTagStrings) {
      const auto n = r.get<std::uint64_t>("string count");
      require(n <= r.remaining() / 4, ErrorCode::kTruncated,
              "truncated at byte offset " + std::to_string(r.offset()) + ": string list '" +
                  name + "' declares " + std::to_string(n) + " entries");
      std::vector<std::string> list;
      list.reserve(n);
      for (std::uint64_t k = 0; k < n; ++k) list.push_back(r.get_string("string"));
      c.strings.emplace(std::move(name), std::move(list));
    } else {
      fail(ErrorCode::kFormat, "unknown container entry tag " + std::to_string(tag) +
                                   " at byte offset " + std::to_string(r.offset() - 1));
    }
  }
  require(r.remaining() == 0, ErrorCode::kFormat,
          "trailing bytes after container at offset " + std::to_string(r.offset()));
  return c;
}

void save_container(const BinaryContainer& c, const std::filesystem::path& path) {
  detail::write_file(path, serialize_container(c));
}

BinaryContainer load_container(const std::filesystem::path& path, std::string_view expected_kind) {
  BinaryContainer c = parse_container(detail::read_file(path));
  if (!expected_kind.empty() && c.kind != expected_kind) {
    fail(ErrorCode::kFormat, "'" + path.string() + "' holds a '" + c.kind + "', expected '" +
                                 std::string(expected_kind) + "'");
  }
  return c;
}

}  // namespace motionstream
