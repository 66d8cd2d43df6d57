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

#include "motionstream/kinematics.hpp"

#include <cmath>
#include <sstream>

#include "motionstream/error.hpp"
#include "util.hpp"

namespace motionstream {

namespace {

constexpr std::string_view kSkeletonMagic = "motionstream-skeleton";
constexpr int kSkeletonVersion = 1;

}  // namespace

int SkeletonSpec::joint_index(std::string_view joint_name) const {
  for (std::size_t i = 0; i < joints.size(); ++i) {
    if (joints[i].name == joint_name) return static_cast<int>(i);
  }
  return -1;
}

void SkeletonSpec::validate() const {
  require(!joints.empty(), ErrorCode::kInvalidArgument, "skeleton has no joints");
  for (std::size_t i = 0; i < joints.size(); ++i) {
    const JointSpec& j = joints[i];
    require(j.parent >= -1 && j.parent < static_cast<int>(i), ErrorCode::kInvalidArgument,
            "joint '" + j.name + "' has parent " + std::to_string(j.parent) +
                " which is not an earlier joint");
    require(std::abs(j.axis.norm() - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
            "joint '" + j.name + "' axis is not unit length");
    require(j.offset.allFinite(), ErrorCode::kInvalidArgument,
            "joint '" + j.name + "' offset is not finite");
  }
  for (int a : ankle_joints) {
    require(a >= 0 && a < num_dofs(), ErrorCode::kInvalidArgument,
            "ankle joint index out of range");
  }
  if (!mirror.empty()) {
    require(mirror.size() == joints.size(), ErrorCode::kInvalidArgument,
            "mirror map must list every joint");
    for (std::size_t i = 0; i < mirror.size(); ++i) {
      const MirrorEntry& m = mirror[i];
      require(m.index >= 0 && m.index < num_dofs(), ErrorCode::kInvalidArgument,
              "mirror index out of range for joint '" + joints[i].name + "'");
      require(m.sign == 1.0 || m.sign == -1.0, ErrorCode::kInvalidArgument,
              "mirror sign must be +1 or -1");
      const MirrorEntry& back = mirror[static_cast<std::size_t>(m.index)];
      require(back.index == static_cast<int>(i) && back.sign == m.sign,
              ErrorCode::kInvalidArgument,
              "mirror map is not an involution at joint '" + joints[i].name + "'");
    }
  }
}

std::uint64_t SkeletonSpec::hash() const { return detail::fnv1a64(format_skeleton(*this)); }

BodyPose forward_kinematics(const SkeletonSpec& skeleton, const Vec3& root_position,
                            const Quat& root_orientation, const Eigen::VectorXd& q) {
  require(q.size() == skeleton.num_dofs(), ErrorCode::kDimensionMismatch,
          "forward_kinematics: q has " + std::to_string(q.size()) + " entries, skeleton has " +
              std::to_string(skeleton.num_dofs()) + " DoF");
  BodyPose pose;
  const auto n_links = static_cast<std::size_t>(skeleton.num_links());
  pose.link_positions.resize(n_links);
  pose.link_orientations.resize(n_links);
  pose.link_positions[0] = root_position;
  pose.link_orientations[0] = root_orientation;
  for (std::size_t i = 0; i < skeleton.joints.size(); ++i) {
    const JointSpec& j = skeleton.joints[i];
    const auto parent_link = static_cast<std::size_t>(j.parent + 1);
    const Quat& parent_rot = pose.link_orientations[parent_link];
    pose.link_positions[i + 1] = pose.link_positions[parent_link] + parent_rot * j.offset;
    pose.link_orientations[i + 1] =
        parent_rot * Quat(Eigen::AngleAxisd(q[static_cast<Eigen::Index>(i)], j.axis));
  }
  return pose;
}

Eigen::VectorXd mirror_joint_angles(const SkeletonSpec& skeleton, const Eigen::VectorXd& q) {
  require(skeleton.has_mirror(), ErrorCode::kInvalidArgument,
          "skeleton '" + skeleton.name + "' has no mirror map");
  require(q.size() == skeleton.num_dofs(), ErrorCode::kDimensionMismatch,
          "mirror_joint_angles: q size does not match skeleton");
  Eigen::VectorXd out(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const MirrorEntry& m = skeleton.mirror[static_cast<std::size_t>(i)];
    out[i] = m.sign * q[m.index];
  }
  return out;
}

std::vector<std::uint8_t> extract_contacts(std::span<const Vec3> ankle_positions, double eps_vel,
                                           double eps_height) {
  const std::size_t n = ankle_positions.size();
  require(n >= 2, ErrorCode::kInvalidArgument, "contact extraction needs at least 2 frames");
  std::vector<std::uint8_t> flags(n, 0);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double disp2 = (ankle_positions[t + 1] - ankle_positions[t]).squaredNorm();
    flags[t] = (disp2 < eps_vel && ankle_positions[t].z() < eps_height) ? 1 : 0;
  }
  flags[n - 1] = flags[n - 2];
  return flags;
}

std::vector<std::array<std::uint8_t, 2>> extract_foot_contacts(std::span<const Vec3> left_ankle,
                                                               std::span<const Vec3> right_ankle,
                                                               double eps_vel, double eps_height) {
  require(left_ankle.size() == right_ankle.size(), ErrorCode::kDimensionMismatch,
          "left and right ankle sequences differ in length");
  const auto left = extract_contacts(left_ankle, eps_vel, eps_height);
  const auto right = extract_contacts(right_ankle, eps_vel, eps_height);
  std::vector<std::array<std::uint8_t, 2>> out(left.size());
  for (std::size_t t = 0; t < left.size(); ++t) out[t] = {left[t], right[t]};
  return out;
}

namespace {

void add_joint(SkeletonSpec& s, std::string name, int parent, Vec3 axis, Vec3 offset) {
  s.joints.push_back({std::move(name), parent, axis, offset});
}

// Offsets for a left-side chain; the right side mirrors y.
Vec3 side(const Vec3& v, bool left) { return left ? v : Vec3(v.x(), -v.y(), v.z()); }

}  // namespace

SkeletonSpec default_g1_skeleton() {
  SkeletonSpec s;
  s.name = "g1_like_29dof";
  const Vec3 X = Vec3::UnitX(), Y = Vec3::UnitY(), Z = Vec3::UnitZ();
  for (bool left : {true, false}) {
    const std::string p = left ? "left_" : "right_";
    const int base = static_cast<int>(s.joints.size());
    add_joint(s, p + "hip_pitch", -1, Y, side({0.0, 0.0645, -0.1027}, left));
    add_joint(s, p + "hip_roll", base + 0, X, side({0.0, 0.052, -0.030}, left));
    add_joint(s, p + "hip_yaw", base + 1, Z, side({0.025, 0.0, -0.124}, left));
    add_joint(s, p + "knee", base + 2, Y, side({-0.078, 0.002, -0.177}, left));
    add_joint(s, p + "ankle_pitch", base + 3, Y, side({0.0, 0.0, -0.300}, left));
    add_joint(s, p + "ankle_roll", base + 4, X, side({0.0, 0.0, -0.017}, left));
  }
  add_joint(s, "waist_yaw", -1, Z, {0.0, 0.0, 0.0});
  add_joint(s, "waist_roll", 12, X, {-0.004, 0.0, 0.044});
  add_joint(s, "waist_pitch", 13, Y, {0.0, 0.0, 0.0});
  for (bool left : {true, false}) {
    const std::string p = left ? "left_" : "right_";
    const int base = static_cast<int>(s.joints.size());
    add_joint(s, p + "shoulder_pitch", 14, Y, side({0.004, 0.100, 0.238}, left));
    add_joint(s, p + "shoulder_roll", base + 0, X, side({0.0, 0.038, -0.014}, left));
    add_joint(s, p + "shoulder_yaw", base + 1, Z, side({0.0, 0.006, -0.103}, left));
    add_joint(s, p + "elbow", base + 2, Y, side({0.016, 0.0, -0.081}, left));
    add_joint(s, p + "wrist_roll", base + 3, X, side({0.100, 0.002, -0.010}, left));
    add_joint(s, p + "wrist_pitch", base + 4, Y, side({0.038, 0.0, 0.0}, left));
    add_joint(s, p + "wrist_yaw", base + 5, Z, side({0.046, 0.0, 0.0}, left));
  }
  s.ankle_joints = {s.joint_index("left_ankle_roll"), s.joint_index("right_ankle_roll")};

  // Reflection about the XZ plane keeps rotations about y and flips rotations
  // about x and z.
  s.mirror.resize(s.joints.size());
  for (std::size_t i = 0; i < s.joints.size(); ++i) {
    const std::string& name = s.joints[i].name;
    std::string twin = name;
    if (name.rfind("left_", 0) == 0) {
      twin = "right_" + name.substr(5);
    } else if (name.rfind("right_", 0) == 0) {
      twin = "left_" + name.substr(6);
    }
    const double sign = s.joints[i].axis.isApprox(Y) ? 1.0 : -1.0;
    s.mirror[i] = {s.joint_index(twin), sign};
  }
  return s;
}

SkeletonSpec test_skeleton_5dof() {
  SkeletonSpec s;
  s.name = "test_5dof";
  const Vec3 Y = Vec3::UnitY(), Z = Vec3::UnitZ();
  add_joint(s, "left_hip", -1, Y, {0.0, 0.1, -0.1});
  add_joint(s, "left_ankle", 0, Y, {0.0, 0.0, -0.4});
  add_joint(s, "right_hip", -1, Y, {0.0, -0.1, -0.1});
  add_joint(s, "right_ankle", 2, Y, {0.0, 0.0, -0.4});
  add_joint(s, "torso_yaw", -1, Z, {0.0, 0.0, 0.2});
  s.ankle_joints = {1, 3};
  s.mirror = {{2, 1.0}, {3, 1.0}, {0, 1.0}, {1, 1.0}, {4, -1.0}};
  return s;
}

SkeletonSpec parse_skeleton(std::string_view text) {
  SkeletonSpec s;
  bool saw_header = false;
  std::vector<std::array<std::string, 2>> ankle_names;
  struct PendingMirror {
    std::string joint, twin;
    double sign;
  };
  std::vector<PendingMirror> mirrors;
  int line_no = 0;
  for (std::string_view raw : detail::split_lines(text)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto tok = detail::split_ws(line);
    const std::string where = "skeleton line " + std::to_string(line_no);
    if (!saw_header) {
      require(tok.size() == 2 && tok[0] == kSkeletonMagic, ErrorCode::kFormat,
              where + ": expected '" + std::string(kSkeletonMagic) + " <version>' header");
      const auto version = detail::parse_int(tok[1], "skeleton version");
      require(version == kSkeletonVersion, ErrorCode::kVersionMismatch,
              "unsupported skeleton version " + std::to_string(version));
      saw_header = true;
      continue;
    }
    if (tok[0] == "name") {
      require(tok.size() == 2, ErrorCode::kFormat, where + ": name takes one token");
      s.name = std::string(tok[1]);
    } else if (tok[0] == "joint") {
      require(tok.size() == 9, ErrorCode::kFormat, where + ": joint takes 8 fields");
      JointSpec j;
      j.name = std::string(tok[1]);
      j.parent = static_cast<int>(detail::parse_int(tok[2], "joint parent"));
      for (int k = 0; k < 3; ++k) {
        j.axis[k] = detail::parse_double(tok[3 + k], "joint axis");
        j.offset[k] = detail::parse_double(tok[6 + k], "joint offset");
      }
      s.joints.push_back(std::move(j));
    } else if (tok[0] == "ankles") {
      require(tok.size() == 3, ErrorCode::kFormat, where + ": ankles takes two joint names");
      ankle_names.push_back({std::string(tok[1]), std::string(tok[2])});
    } else if (tok[0] == "mirror") {
      require(tok.size() == 4, ErrorCode::kFormat, where + ": mirror takes 3 fields");
      mirrors.push_back({std::string(tok[1]), std::string(tok[2]),
                         detail::parse_double(tok[3], "mirror sign")});
    } else {
      fail(ErrorCode::kFormat, where + ": unknown record '" + std::string(tok[0]) + "'");
    }
  }
  require(saw_header, ErrorCode::kFormat, "skeleton file is empty");
  require(ankle_names.size() == 1, ErrorCode::kFormat, "skeleton needs exactly one ankles line");
  for (int k = 0; k < 2; ++k) {
    s.ankle_joints[static_cast<std::size_t>(k)] = s.joint_index(ankle_names[0][static_cast<std::size_t>(k)]);
    require(s.ankle_joints[static_cast<std::size_t>(k)] >= 0, ErrorCode::kFormat,
            "unknown ankle joint '" + ankle_names[0][static_cast<std::size_t>(k)] + "'");
  }
  if (!mirrors.empty()) {
    s.mirror.assign(s.joints.size(), MirrorEntry{-1, 0.0});
    for (const auto& m : mirrors) {
      const int a = s.joint_index(m.joint);
      const int b = s.joint_index(m.twin);
      require(a >= 0 && b >= 0, ErrorCode::kFormat,
              "mirror line references unknown joint '" + m.joint + "' or '" + m.twin + "'");
      s.mirror[static_cast<std::size_t>(a)] = {b, m.sign};
    }
  }
  s.validate();
  return s;
}

std::string format_skeleton(const SkeletonSpec& s) {
  std::ostringstream out;
  out << kSkeletonMagic << ' ' << kSkeletonVersion << '\n';
  out << "name " << (s.name.empty() ? "unnamed" : s.name) << '\n';
  out << "# joint <name> <parent> <axis xyz> <offset xyz>\n";
  for (const JointSpec& j : s.joints) {
    out << "joint " << j.name << ' ' << j.parent;
    for (int k = 0; k < 3; ++k) out << ' ' << detail::format_double(j.axis[k]);
    for (int k = 0; k < 3; ++k) out << ' ' << detail::format_double(j.offset[k]);
    out << '\n';
  }
  auto joint_name = [&](int idx) -> std::string {
    return idx >= 0 && idx < s.num_dofs() ? s.joints[static_cast<std::size_t>(idx)].name : "?";
  };
  out << "ankles " << joint_name(s.ankle_joints[0]) << ' ' << joint_name(s.ankle_joints[1])
      << '\n';
  for (std::size_t i = 0; i < s.mirror.size(); ++i) {
    out << "mirror " << s.joints[i].name << ' ' << joint_name(s.mirror[i].index) << ' '
        << (s.mirror[i].sign < 0 ? "-1" : "1") << '\n';
  }
  return out.str();
}

SkeletonSpec load_skeleton(const std::filesystem::path& path) {
  return parse_skeleton(detail::read_file(path));
}

void save_skeleton(const SkeletonSpec& skeleton, const std::filesystem::path& path) {
  detail::write_file(path, format_skeleton(skeleton));
}

}  // namespace motionstream
