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

#include "motionstream/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <json.hpp>

#include "byte_io.hpp"
#include "motionstream/error.hpp"
#include "motionstream/rollout.hpp"
#include "util.hpp"

namespace motionstream {

namespace {

constexpr std::string_view kClipMagic = "MSTRMCLP";
constexpr double kTwoPi = 2.0 * std::numbers::pi;

int clip_dofs(const MotionClip& clip) {
  return clip.frames.empty() ? 0 : static_cast<int>(clip.frames[0].q.size());
}

int clip_contacts(const MotionClip& clip) {
  return clip.frames.empty() ? kNumContacts : static_cast<int>(clip.frames[0].c.size());
}

}  // namespace

std::string serialize_clip(const MotionClip& clip) {
  const int n_q = clip_dofs(clip);
  const int n_c = clip_contacts(clip);
  const nlohmann::json header = {{"version", kClipVersion},
                                 {"skeleton_hash", clip.skeleton_hash},
                                 {"frame_rate", clip.frame_rate},
                                 {"frame_count", clip.frames.size()},
                                 {"n_q", n_q},
                                 {"n_c", n_c}};
  const std::string text = header.dump();
  detail::ByteWriter w;
  w.put_bytes(kClipMagic);
  w.put_string(text);
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    const auto& f = clip.frames[t];
    require(f.q.size() == n_q && static_cast<int>(f.c.size()) == n_c,
            ErrorCode::kDimensionMismatch,
            "serialize_clip: frame " + std::to_string(t) + " differs in size from frame 0");
    for (int i = 0; i < 3; ++i) w.put<double>(f.p[i]);
    w.put<double>(f.R.w());
    w.put<double>(f.R.x());
    w.put<double>(f.R.y());
    w.put<double>(f.R.z());
    for (Eigen::Index i = 0; i < f.q.size(); ++i) w.put<double>(f.q[i]);
    for (const auto c : f.c) w.put<double>(static_cast<double>(c));
  }
  w.put<std::uint64_t>(detail::fnv1a64(w.str()));
  return std::move(w.str());
}

MotionClip parse_clip(std::string_view bytes, const SkeletonSpec* skeleton) {
  detail::ByteReader r(bytes);
  require(r.get_bytes(kClipMagic.size(), "magic") == kClipMagic, ErrorCode::kFormat,
          "not a motion clip file (bad magic)");
  const std::string text = r.get_string("header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("clip header is not valid JSON: ") + e.what());
  }
  MotionClip clip;
  std::uint64_t frame_count = 0;
  int n_q = 0, n_c = 0;
  try {
    const auto version = header.at("version").get<std::uint32_t>();
    require(version == kClipVersion, ErrorCode::kVersionMismatch,
            "clip version " + std::to_string(version) + " is not supported (expected " +
                std::to_string(kClipVersion) + ")");
    clip.skeleton_hash = header.at("skeleton_hash").get<std::uint64_t>();
    clip.frame_rate = header.at("frame_rate").get<double>();
    frame_count = header.at("frame_count").get<std::uint64_t>();
    n_q = header.at("n_q").get<int>();
    n_c = header.at("n_c").get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, std::string("clip header field missing or mistyped: ") + e.what());
  }
  require(clip.frame_rate > 0 && std::isfinite(clip.frame_rate), ErrorCode::kFormat,
          "clip frame rate must be positive");
  require(n_q >= 0 && n_q < 100000 && n_c >= 0 && n_c < 1000, ErrorCode::kFormat,
          "clip header dimensions are out of range");
  if (skeleton) {
    require(clip.skeleton_hash == skeleton->hash(), ErrorCode::kHashMismatch,
            "clip skeleton hash " + std::to_string(clip.skeleton_hash) +
                " does not match skeleton '" + skeleton->name + "' (" +
                std::to_string(skeleton->hash()) + ")");
    require(n_q == skeleton->num_dofs(), ErrorCode::kDimensionMismatch,
            "clip has " + std::to_string(n_q) + " DoF, skeleton has " +
                std::to_string(skeleton->num_dofs()));
  }
  // Frames are appended as they are read so a bogus count fails with the
  // truncation offset instead of a huge allocation.
  const std::size_t record = sizeof(double) * static_cast<std::size_t>(7 + n_q + n_c);
  clip.frames.reserve(static_cast<std::size_t>(
      std::min<std::uint64_t>(frame_count, r.remaining() / record + 1)));
  for (std::uint64_t t = 0; t < frame_count; ++t) {
    RawMotionFrame f;
    const std::string what = "frame " + std::to_string(t);
    for (int i = 0; i < 3; ++i) f.p[i] = r.get<double>(what);
    const double w = r.get<double>(what), x = r.get<double>(what), y = r.get<double>(what),
                 z = r.get<double>(what);
    f.R = Quat(w, x, y, z);
    f.q.resize(n_q);
    for (int i = 0; i < n_q; ++i) f.q[i] = r.get<double>(what);
    f.c.resize(static_cast<std::size_t>(n_c));
    for (int i = 0; i < n_c; ++i) {
      const double v = r.get<double>(what);
      require(v == 0.0 || v == 1.0, ErrorCode::kFormat,
              what + ": contact flag " + detail::format_double(v) + " is not 0 or 1");
      f.c[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v);
    }
    clip.frames.push_back(std::move(f));
  }
  const std::size_t body = r.offset();
  const auto checksum = r.get<std::uint64_t>("checksum");
  require(r.remaining() == 0, ErrorCode::kFormat,
          std::to_string(r.remaining()) + " trailing bytes after the checksum");
  require(checksum == detail::fnv1a64(bytes.substr(0, body)), ErrorCode::kFormat,
          "clip checksum mismatch (file is corrupted)");
  return clip;
}

void save_clip(const MotionClip& clip, const std::filesystem::path& path) {
  detail::write_file(path, serialize_clip(clip));
}

MotionClip load_clip(const std::filesystem::path& path, const SkeletonSpec* skeleton) {
  const std::string bytes = detail::read_file(path);
  try {
    return parse_clip(bytes, skeleton);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string export_clip_json(const MotionClip& clip) {
  nlohmann::json j = {{"version", kClipVersion},
                      {"skeleton_hash", clip.skeleton_hash},
                      {"frame_rate", clip.frame_rate},
                      {"frame_count", clip.frames.size()},
                      {"n_q", clip_dofs(clip)},
                      {"n_c", clip_contacts(clip)}};
  nlohmann::json frames = nlohmann::json::array();
  for (const auto& f : clip.frames) {
    frames.push_back({{"p", {f.p.x(), f.p.y(), f.p.z()}},
                      {"R", {f.R.w(), f.R.x(), f.R.y(), f.R.z()}},
                      {"q", std::vector<double>(f.q.data(), f.q.data() + f.q.size())},
                      {"c", f.c}});
  }
  j["frames"] = std::move(frames);
  return j.dump(1);
}

ValidationReport validate_clip(const MotionClip& clip, const SkeletonSpec& skeleton) {
  ValidationReport report;
  auto issue = [&](int frame, std::string msg) { report.issues.push_back({frame, std::move(msg)}); };
  if (!(clip.frame_rate > 0) || !std::isfinite(clip.frame_rate)) issue(-1, "frame rate must be positive");
  if (clip.skeleton_hash != skeleton.hash()) issue(-1, "skeleton hash does not match");
  if (clip.frames.empty()) issue(-1, "clip has no frames");
  for (std::size_t t = 0; t < clip.frames.size(); ++t) {
    const auto& f = clip.frames[t];
    const int i = static_cast<int>(t);
    if (f.q.size() != skeleton.num_dofs()) {
      issue(i, "has " + std::to_string(f.q.size()) + " joint angles, skeleton has " +
                   std::to_string(skeleton.num_dofs()));
    }
    if (!f.p.allFinite() || !f.R.coeffs().allFinite() || !f.q.allFinite()) {
      issue(i, "has non-finite values");
      continue;
    }
    const double norm = f.R.norm();
    if (std::abs(norm - 1.0) > 1e-6) {
      issue(i, "root quaternion norm is " + detail::format_double(norm));
    }
    if (f.c.size() != static_cast<std::size_t>(kNumContacts)) {
      issue(i, "has " + std::to_string(f.c.size()) + " contact flags");
    }
    for (const auto c : f.c) {
      if (c > 1) issue(i, "contact flag " + std::to_string(c) + " is not 0 or 1");
    }
  }
  return report;
}

MotionClip slice_clip(const MotionClip& clip, int start, int length) {
  require(start >= 0 && length >= 0 &&
              static_cast<std::size_t>(start) + static_cast<std::size_t>(length) <=
                  clip.frames.size(),
          ErrorCode::kInvalidArgument,
          "slice [" + std::to_string(start) + ", " + std::to_string(start + length) +
              ") is outside a " + std::to_string(clip.frames.size()) + "-frame clip");
  MotionClip out{clip.skeleton_hash, clip.frame_rate, {}};
  out.frames.assign(clip.frames.begin() + start, clip.frames.begin() + start + length);
  return out;
}

std::vector<ClipSegment> segment_dataset(const std::vector<int>& source_lengths,
                                         const SegmentationConfig& cfg, std::mt19937_64& rng,
                                         std::vector<std::string>* warnings) {
  require(cfg.min_len >= 1 && cfg.min_len <= cfg.max_len && cfg.overlap_min >= 0 &&
              cfg.overlap_min <= cfg.overlap_max &&
              cfg.max_len + 1 + cfg.overlap_min - std::max(cfg.min_len, cfg.overlap_max + 1) >=
                  std::max(cfg.min_len, 2 * cfg.overlap_max + 1),
          ErrorCode::kInvalidArgument, "segmentation ranges are inconsistent");
  using Dist = std::uniform_int_distribution<int>;
  std::vector<ClipSegment> out;
  for (std::size_t s = 0; s < source_lengths.size(); ++s) {
    const int n = source_lengths[s];
    require(n >= 0, ErrorCode::kInvalidArgument, "negative source length");
    if (n == 0) continue;
    if (n < cfg.min_len) {
      if (warnings) {
        warnings->push_back("source " + std::to_string(s) + " has " + std::to_string(n) +
                            " frames, below the minimum " + std::to_string(cfg.min_len) +
                            "; kept whole");
      }
      out.push_back({s, 0, n});
      continue;
    }
    // Each piece is longer than its two overlaps together, so only
    // neighbors share frames, and the remainder stays >= min_len and longer
    // than its overlap.
    int start = 0;
    int prev_overlap = 0;
    while (n - start > cfg.max_len) {
      const int overlap = Dist(cfg.overlap_min, cfg.overlap_max)(rng);
      const int lo = std::max(cfg.min_len, prev_overlap + overlap + 1);
      const int hi =
          std::min(cfg.max_len, n - start + overlap - std::max(cfg.min_len, overlap + 1));
      const int len = Dist(lo, hi)(rng);
      out.push_back({s, start, len});
      start += len - overlap;
      prev_overlap = overlap;
    }
    out.push_back({s, start, n - start});
  }
  return out;
}

std::vector<EvalSegment> build_eval_segments(int clip_frames,
                                             const std::vector<AnnotationSpan>& annotations,
                                             int max_len, double frame_rate) {
  require(max_len >= 1, ErrorCode::kInvalidArgument, "eval segment length must be positive");
  require(frame_rate > 0, ErrorCode::kInvalidArgument, "frame rate must be positive");
  std::vector<EvalSegment> out;
  for (const auto& span : annotations) {
    const int a = std::clamp(static_cast<int>(std::lround(span.t_start * frame_rate)), 0, clip_frames);
    const int b = std::clamp(static_cast<int>(std::lround(span.t_end * frame_rate)), 0, clip_frames);
    for (int s = a; s < b; s += max_len) out.push_back({s, std::min(max_len, b - s), span.text});
  }
  return out;
}

TextStream build_random_text_stream(const std::vector<std::string>& vocabulary,
                                    std::mt19937_64& rng, const std::string& idle) {
  require(!vocabulary.empty(), ErrorCode::kInvalidArgument, "text stream needs a vocabulary");
  using Dist = std::uniform_int_distribution<int>;
  TextStream out;
  double t = 0.0;
  out.spans.push_back({t, t + kStandPaddingSeconds, idle});
  t += kStandPaddingSeconds;
  const int count = Dist(3, 5)(rng);
  for (int i = 0; i < count; ++i) {
    const auto& word = vocabulary[static_cast<std::size_t>(
        Dist(0, static_cast<int>(vocabulary.size()) - 1)(rng))];
    const double d = Dist(6, 10)(rng);
    out.spans.push_back({t, t + d, word});
    t += d;
  }
  out.spans.push_back({t, t + kStandPaddingSeconds, idle});
  out.duration = t + kStandPaddingSeconds;
  out.timeline = CommandTimeline::from_spans(out.spans, idle);
  return out;
}

// ---- Synthetic corpus ------------------------------------------------------

const std::vector<std::string>& synthetic_labels() {
  static const std::vector<std::string> labels{"stand", "walk", "wave left hand",
                                               "wave right hand", "punch"};
  return labels;
}

namespace {

struct JointMap {
  int hip_pitch[2], knee[2], ankle_pitch[2], shoulder_pitch[2], shoulder_roll[2], elbow[2];
  int waist_yaw;

  explicit JointMap(const SkeletonSpec& s) {
    const char* side[2] = {"left_", "right_"};
    auto idx = [&](const std::string& name) {
      const int i = s.joint_index(name);
      require(i >= 0, ErrorCode::kInvalidArgument,
              "synthetic corpus needs joint '" + name + "' in skeleton '" + s.name + "'");
      return i;
    };
    for (int k = 0; k < 2; ++k) {
      const std::string p = side[k];
      hip_pitch[k] = idx(p + "hip_pitch");
      knee[k] = idx(p + "knee");
      ankle_pitch[k] = idx(p + "ankle_pitch");
      shoulder_pitch[k] = idx(p + "shoulder_pitch");
      shoulder_roll[k] = idx(p + "shoulder_roll");
      elbow[k] = idx(p + "elbow");
    }
    waist_yaw = idx("waist_yaw");
  }
};

struct LabelPose {
  Eigen::VectorXd q;
  double speed = 0.0;  // forward, m/s
};

int label_id(const std::string& label) {
  const auto& all = synthetic_labels();
  const auto it = std::find(all.begin(), all.end(), label);
  require(it != all.end(), ErrorCode::kNotFound, "no synthetic generator for label '" + label + "'");
  return static_cast<int>(it - all.begin());
}

// Pose of one label at time t seconds.
LabelPose label_pose(int id, const SkeletonSpec& s, const JointMap& j, double t) {
  LabelPose out{Eigen::VectorXd::Zero(s.num_dofs()), 0.0};
  auto& q = out.q;
  switch (id) {
    case 0:  // stand
      break;
    case 1: {  // walk: one stride per second, swing leg lifted above the contact height
      const double ph = std::sin(kTwoPi * t);
      const double lift[2] = {std::max(0.0, ph), std::max(0.0, -ph)};
      for (int k = 0; k < 2; ++k) {
        q[j.hip_pitch[k]] = -1.0 * lift[k];
        q[j.knee[k]] = 2.0 * lift[k];
        q[j.ankle_pitch[k]] = -1.0 * lift[k];
        q[j.shoulder_pitch[k]] = (k == 0 ? 0.35 : -0.35) * ph;
        q[j.elbow[k]] = 0.3;
      }
      out.speed = 0.8;
      break;
    }
    case 2:
    case 3: {  // wave: raised arm, forearm oscillating at 1.5 Hz
      const double w = std::sin(kTwoPi * 1.5 * t);
      q[j.shoulder_pitch[0]] = -2.0;
      q[j.shoulder_roll[0]] = 0.4 + 0.25 * w;
      q[j.elbow[0]] = 0.9 + 0.4 * w;
      if (id == 3) q = mirror_joint_angles(s, q);
      break;
    }
    case 4: {  // punch: alternating straight punches, one per arm per second
      const double ph = std::sin(kTwoPi * t);
      const double pulse[2] = {std::pow(std::max(0.0, -ph), 2), std::pow(std::max(0.0, ph), 2)};
      for (int k = 0; k < 2; ++k) {
        q[j.shoulder_pitch[k]] = -0.4 - 1.1 * pulse[k];
        q[j.elbow[k]] = 1.7 * (1.0 - pulse[k]);
      }
      q[j.waist_yaw] = 0.35 * (pulse[1] - pulse[0]);
      break;
    }
    default:
      fail(ErrorCode::kInternal, "label id out of range");
  }
  return out;
}

double smoothstep(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

// Integrates the root along the heading and labels contacts with the
// extractor on the ankle trajectories.
RawMotion build_motion(const SkeletonSpec& s, const std::vector<LabelPose>& poses, double yaw,
                       const Vec3& start) {
  RawMotion raw(poses.size());
  Vec3 p = start;
  for (std::size_t t = 0; t < poses.size(); ++t) {
    raw[t].p = p;
    raw[t].R = yaw_quat(yaw);
    raw[t].q = poses[t].q;
    p += rot_z(yaw) * Vec3(poses[t].speed / kFrameRate, 0.0, 0.0);
  }
  if (raw.size() >= 2) {
    std::vector<Vec3> ankle[2];
    for (const auto& f : raw) {
      const BodyPose body = forward_kinematics(s, f.p, f.R, f.q);
      for (int k = 0; k < 2; ++k) {
        ankle[k].push_back(body.link_positions[static_cast<std::size_t>(s.ankle_joints[k] + 1)]);
      }
    }
    const auto contacts = extract_foot_contacts(ankle[0], ankle[1]);
    for (std::size_t t = 0; t < raw.size(); ++t) raw[t].c = {contacts[t][0], contacts[t][1]};
  } else {
    for (auto& f : raw) f.c = {1, 1};
  }
  return raw;
}

}  // namespace

RawMotion synthetic_template(const std::string& label, const SkeletonSpec& skeleton, int frames) {
  require(frames >= 1, ErrorCode::kInvalidArgument, "template needs at least one frame");
  const JointMap j(skeleton);
  const int id = label_id(label);
  std::vector<LabelPose> poses;
  for (int t = 0; t < frames; ++t) poses.push_back(label_pose(id, skeleton, j, t / kFrameRate));
  return build_motion(skeleton, poses, 0.0, Vec3(0, 0, kDefaultStandHeight));
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticCorpusSpec& spec,
                                          const SkeletonSpec& skeleton) {
  require(!spec.labels.empty(), ErrorCode::kInvalidArgument, "synthetic corpus needs labels");
  require(spec.min_frames >= 2 && spec.min_frames <= spec.max_frames, ErrorCode::kInvalidArgument,
          "synthetic clip length range is invalid");
  require(spec.noise >= 0.0 && spec.blend_frames >= 1, ErrorCode::kInvalidArgument,
          "synthetic noise and blend must be non-negative and positive");
  const JointMap joints(skeleton);
  std::vector<int> ids;
  for (const auto& l : spec.labels) ids.push_back(label_id(l));

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> length(spec.min_frames, spec.max_frames);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> noise(-spec.noise, spec.noise);

  SyntheticCorpus corpus;
  corpus.labels = spec.labels;
  auto make_clip = [&](int first, int second) {
    const int n = length(rng);
    const double phase = 2.0 * unit(rng);
    const double yaw = std::numbers::pi * (2.0 * unit(rng) - 1.0);
    const Vec3 start(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0, kDefaultStandHeight);
    const int switch_frame = second < 0 ? n : n / 2;
    std::vector<LabelPose> poses;
    for (int t = 0; t < n; ++t) {
      const double time = phase + t / kFrameRate;
      LabelPose pose = label_pose(ids[static_cast<std::size_t>(first)], skeleton, joints, time);
      if (t >= switch_frame) {
        const LabelPose next =
            label_pose(ids[static_cast<std::size_t>(second)], skeleton, joints, time);
        const double w = smoothstep(static_cast<double>(t - switch_frame + 1) / spec.blend_frames);
        pose.q = (1.0 - w) * pose.q + w * next.q;
        pose.speed = (1.0 - w) * pose.speed + w * next.speed;
      }
      for (Eigen::Index i = 0; i < pose.q.size(); ++i) pose.q[i] += noise(rng);
      poses.push_back(std::move(pose));
    }
    LabeledClip clip;
    clip.clip = {skeleton.hash(), kFrameRate, build_motion(skeleton, poses, yaw, start)};
    const double end = n / kFrameRate;
    if (second < 0) {
      clip.spans.push_back({0.0, end, spec.labels[static_cast<std::size_t>(first)]});
    } else {
      const double mid = switch_frame / kFrameRate;
      clip.spans.push_back({0.0, mid, spec.labels[static_cast<std::size_t>(first)]});
      clip.spans.push_back({mid, end, spec.labels[static_cast<std::size_t>(second)]});
    }
    corpus.clips.push_back(std::move(clip));
  };

  const int k = static_cast<int>(spec.labels.size());
  for (int a = 0; a < k; ++a)
    for (int i = 0; i < spec.clips_per_label; ++i) make_clip(a, -1);
  if (spec.transitions) {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b)
        if (a != b) make_clip(a, b);
  }
  return corpus;
}

void save_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorCode::kIo, "cannot create corpus directory " + dir.string() + ": " + ec.message());
  std::string labels;
  for (const auto& l : corpus.labels) labels += l + "\n";
  detail::write_file(dir / "labels.txt", labels);
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "clip_%04zu", i);
    save_clip(corpus.clips[i].clip, dir / (std::string(stem) + ".msclip"));
    save_spans(corpus.clips[i].spans, dir / (std::string(stem) + ".spans"));
  }
}

SyntheticCorpus load_corpus(const std::filesystem::path& dir, const SkeletonSpec* skeleton) {
  require(std::filesystem::is_directory(dir), ErrorCode::kNotFound,
          "corpus directory not found: " + dir.string());
  std::vector<std::filesystem::path> clips;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".msclip") clips.push_back(e.path());
  }
  std::sort(clips.begin(), clips.end());
  require(!clips.empty(), ErrorCode::kNotFound, "no .msclip files in " + dir.string());
  SyntheticCorpus corpus;
  for (const auto& path : clips) {
    auto spans_path = path;
    spans_path.replace_extension(".spans");
    require(std::filesystem::exists(spans_path), ErrorCode::kNotFound,
            "missing annotation file " + spans_path.string());
    corpus.clips.push_back({load_clip(path, skeleton), load_spans(spans_path)});
  }
  const auto labels_path = dir / "labels.txt";
  if (std::filesystem::exists(labels_path)) {
    const std::string text = detail::read_file(labels_path);
    for (const auto line : detail::split_lines(text)) {
      const auto l = detail::trim(line);
      if (!l.empty()) corpus.labels.emplace_back(l);
    }
  } else {
    for (const auto& c : corpus.clips) {
      for (const auto& s : c.spans) {
        if (std::find(corpus.labels.begin(), corpus.labels.end(), s.text) == corpus.labels.end()) {
          corpus.labels.push_back(s.text);
        }
      }
    }
  }
  return corpus;
}

Eigen::VectorXd motion_descriptor(std::span<const MotionFeatureFrame> motion) {
  require(!motion.empty(), ErrorCode::kInvalidArgument, "motion descriptor needs frames");
  const Eigen::Index n_q = motion[0].q.size();
  const double n = static_cast<double>(motion.size());
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n_q), sq = Eigen::VectorXd::Zero(n_q);
  double speed = 0.0;
  for (const auto& f : motion) {
    require(f.q.size() == n_q, ErrorCode::kDimensionMismatch, "motion frames differ in DoF");
    mean += f.q;
    sq += f.q.cwiseAbs2();
    speed += f.dp_local.head<2>().norm() * kFrameRate;
  }
  mean /= n;
  Eigen::VectorXd out(2 * n_q + 1);
  out << mean, (sq / n - mean.cwiseAbs2()).cwiseMax(0.0).cwiseSqrt(), speed / n;
  return out;
}

OracleEmbedder::OracleEmbedder(std::vector<std::string> labels, const SkeletonSpec& skeleton,
                               int template_frames)
    : labels_(std::move(labels)) {
  require(!labels_.empty(), ErrorCode::kInvalidArgument, "oracle embedder needs labels");
  for (const auto& l : labels_) {
    const RawMotion raw = synthetic_template(l, skeleton, template_frames + 1);
    descriptors_.push_back(motion_descriptor(encode_features(raw).features));
  }
}

int OracleEmbedder::classify(std::span<const MotionFeatureFrame> motion) const {
  const Eigen::VectorXd d = motion_descriptor(motion);
  require(d.size() == descriptors_[0].size(), ErrorCode::kDimensionMismatch,
          "motion DoF does not match the oracle skeleton");
  int best = 0;
  double best_dist = (d - descriptors_[0]).norm();
  for (std::size_t k = 1; k < descriptors_.size(); ++k) {
    const double dist = (d - descriptors_[k]).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(k);
    }
  }
  return best;
}

Eigen::VectorXd OracleEmbedder::embed_motion(std::span<const MotionFeatureFrame> motion) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
  e[classify(motion)] = 1.0;
  return e;
}

Eigen::VectorXd OracleEmbedder::embed_text(std::string_view text) const {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim());
  std::string key(detail::trim(text));
  if (is_long_form(key)) key = key.substr(3, key.size() - 6);  // U+27E8 / U+27E9 are 3 bytes each
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (std::size_t k = 0; k < labels_.size(); ++k) {
    if (labels_[k] == key) e[static_cast<Eigen::Index>(k)] = 1.0;
  }
  return e;
}

TrainingWindows corpus_windows(const SyntheticCorpus& corpus, int stride, int history, int future) {
  const PrimitiveLayout layout{history, future, 1};
  TrainingWindows out;
  for (const auto& c : corpus.clips) {
    const EncodedMotion enc = encode_features(c.clip.frames);
    const auto items = segment_primitives(enc.features, c.spans, stride, kIdleCommand, layout,
                                          c.clip.frame_rate);
    for (const auto& item : items) {
      out.windows.push_back({item.primitives[0].history, item.primitives[0].future});
      out.texts.push_back(item.text);
    }
  }
  return out;
}

}  // namespace motionstream
