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

#include "motionstream/timeline.hpp"

#include <cmath>

#include "motionstream/error.hpp"
#include "util.hpp"

namespace motionstream {

namespace {
constexpr std::string_view kOpen = "\xE2\x9F\xA8";   // U+27E8
constexpr std::string_view kClose = "\xE2\x9F\xA9";  // U+27E9
constexpr std::string_view kVersionLine = "#version 1";
}  // namespace

std::string wrap_long_form(std::string_view label) {
  if (is_long_form(label)) return std::string(label);
  return std::string(kOpen) + std::string(label) + std::string(kClose);
}

bool is_long_form(std::string_view text) {
  return text.size() >= kOpen.size() + kClose.size() && text.substr(0, kOpen.size()) == kOpen &&
         text.substr(text.size() - kClose.size()) == kClose;
}

std::vector<AnnotationSpan> parse_spans(std::string_view text) {
  const auto lines = detail::split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && detail::trim(lines[i]).empty()) ++i;
  require(i < lines.size(), ErrorCode::kFormat, "span file is empty (missing '#version 1')");
  const auto header = detail::trim(lines[i]);
  if (header != kVersionLine) {
    if (header.rfind("#version", 0) == 0) {
      fail(ErrorCode::kVersionMismatch, "unsupported span file version '" + std::string(header) + "'");
    }
    fail(ErrorCode::kFormat, "span file must start with '#version 1'");
  }
  std::vector<AnnotationSpan> out;
  for (++i; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(i + 1);
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string_view::npos ? tab1 : line.find('\t', tab1 + 1);
    require(tab2 != std::string_view::npos, ErrorCode::kFormat,
            where + ": expected start<TAB>end<TAB>text");
    AnnotationSpan s;
    s.t_start = detail::parse_double(detail::trim(line.substr(0, tab1)), where + " start");
    s.t_end = detail::parse_double(detail::trim(line.substr(tab1 + 1, tab2 - tab1 - 1)), where + " end");
    s.text = std::string(line.substr(tab2 + 1));
    require(std::isfinite(s.t_start) && std::isfinite(s.t_end) && s.t_start >= 0.0 &&
                s.t_start < s.t_end,
            ErrorCode::kFormat, where + ": need 0 <= start < end");
    out.push_back(std::move(s));
  }
  return out;
}

std::string format_spans(const std::vector<AnnotationSpan>& spans) {
  std::string out(kVersionLine);
  out += '\n';
  for (const auto& s : spans) {
    require(s.text.find('\n') == std::string::npos && s.text.find('\t') == std::string::npos,
            ErrorCode::kInvalidArgument, "span text may not contain tabs or newlines");
    out += detail::format_double(s.t_start) + '\t' + detail::format_double(s.t_end) + '\t' +
           s.text + '\n';
  }
  return out;
}

std::vector<AnnotationSpan> load_spans(const std::filesystem::path& path) {
  try {
    return parse_spans(detail::read_file(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_spans(const std::vector<AnnotationSpan>& spans, const std::filesystem::path& path) {
  detail::write_file(path, format_spans(spans));
}

const AnnotationSpan* span_at(const std::vector<AnnotationSpan>& spans, double t) {
  for (const auto& s : spans) {
    if (s.t_start <= t && t < s.t_end) return &s;
  }
  return nullptr;
}

CommandTimeline::CommandTimeline(std::vector<CommandEvent> events, std::string idle)
    : events_(std::move(events)), idle_(std::move(idle)) {
  for (std::size_t i = 0; i < events_.size(); ++i) {
    require(std::isfinite(events_[i].time) && events_[i].time >= 0.0,
            ErrorCode::kInvalidArgument, "command event times must be finite and >= 0");
    require(i == 0 || events_[i - 1].time <= events_[i].time, ErrorCode::kInvalidArgument,
            "command events must be time-sorted");
  }
}

CommandTimeline CommandTimeline::from_spans(const std::vector<AnnotationSpan>& spans,
                                            std::string idle) {
  std::vector<CommandEvent> events;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    require(i == 0 || spans[i - 1].t_start <= spans[i].t_start, ErrorCode::kInvalidArgument,
            "text stream spans must be sorted by start time");
    events.push_back({spans[i].t_start, spans[i].text});
    const bool gap = i + 1 == spans.size() || spans[i + 1].t_start > spans[i].t_end;
    if (gap) events.push_back({spans[i].t_end, idle});
  }
  return CommandTimeline(std::move(events), std::move(idle));
}

const std::string& CommandTimeline::command_at(double t) const {
  const std::string* cur = &idle_;
  for (const auto& e : events_) {
    if (e.time > t) break;
    cur = &e.text;
  }
  return *cur;
}

double CommandTimeline::last_event_time() const {
  return events_.empty() ? 0.0 : events_.back().time;
}

}  // namespace motionstream
