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

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace motionstream::detail {

inline std::uint64_t fnv1a64(std::string_view data,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

std::vector<std::string_view> split_ws(std::string_view line);
std::vector<std::string_view> split_lines(std::string_view text);
std::string_view trim(std::string_view s);

// Shortest round-trip decimal form.
std::string format_double(double v);
// Parses the whole token or throws Error(kFormat) mentioning `what`.
double parse_double(std::string_view token, std::string_view what);
long long parse_int(std::string_view token, std::string_view what);

}  // namespace motionstream::detail
