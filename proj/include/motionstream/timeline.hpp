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
#include <string>
#include <string_view>
#include <vector>

namespace motionstream {

inline constexpr double kFrameRate = 50.0;
inline constexpr const char* kIdleCommand = "stand";

// A text label over [t_start, t_end) seconds.
struct AnnotationSpan {
  double t_start = 0.0;
  double t_end = 0.0;
  std::string text;
};

// Long-form labels are wrapped in U+27E8 / U+27E9 angle markers.
std::string wrap_long_form(std::string_view label);
bool is_long_form(std::string_view text);

// Span file, shared by annotations and text streams:
//
//   #version 1
//   <t_start>\t<t_end>\t<text>
//   ...
//
// Blank lines are ignored. Parse errors name the line. Spans must satisfy
// 0 <= t_start < t_end; they may overlap.
std::vector<AnnotationSpan> parse_spans(std::string_view text);
std::string format_spans(const std::vector<AnnotationSpan>& spans);
std::vector<AnnotationSpan> load_spans(const std::filesystem::path& path);
void save_spans(const std::vector<AnnotationSpan>& spans, const std::filesystem::path& path);

// First span (in file order) with t_start <= t < t_end, or null.
const AnnotationSpan* span_at(const std::vector<AnnotationSpan>& spans, double t);

struct CommandEvent {
  double time = 0.0;
  std::string text;
};

// Time-sorted command events. The command active at time t is the text of
// the last event with time <= t, or the idle command before the first.
class CommandTimeline {
 public:
  CommandTimeline() = default;
  // Throws if times are negative or not sorted.
  explicit CommandTimeline(std::vector<CommandEvent> events, std::string idle = kIdleCommand);

  // Events at every span start; where a span ends before the next begins
  // (and after the last), the idle command resumes.
  static CommandTimeline from_spans(const std::vector<AnnotationSpan>& spans,
                                    std::string idle = kIdleCommand);

  const std::string& command_at(double t) const;
  const std::vector<CommandEvent>& events() const { return events_; }
  const std::string& idle() const { return idle_; }
  // Time of the last event, 0 for an empty timeline.
  double last_event_time() const;

 private:
  std::vector<CommandEvent> events_;
  std::string idle_ = kIdleCommand;
};

}  // namespace motionstream
