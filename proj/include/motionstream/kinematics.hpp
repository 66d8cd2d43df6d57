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

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "motionstream/rotation.hpp"

namespace motionstream {

// A single-DoF revolute joint. The joint frame sits at `offset` in the parent
// link frame and rotates by q about `axis` (expressed in that frame).
struct JointSpec {
  std::string name;
  int parent = -1;  // -1 attaches to the root link
  Vec3 axis = Vec3::UnitZ();
  Vec3 offset = Vec3::Zero();
};

// Mirrored counterpart of a joint: q_mirror[i] = sign * q[index].
struct MirrorEntry {
  int index = 0;
  double sign = 1.0;
};

struct SkeletonSpec {
  std::string name;
  std::vector<JointSpec> joints;
  std::array<int, 2> ankle_joints{-1, -1};  // left, right
  std::vector<MirrorEntry> mirror;           // empty when unavailable

  int num_dofs() const { return static_cast<int>(joints.size()); }
  int num_links() const { return num_dofs() + 1; }
  bool has_mirror() const { return !mirror.empty(); }
  int joint_index(std::string_view joint_name) const;  // -1 if absent

  // Throws Error(kInvalidArgument) describing the first broken invariant.
  void validate() const;

  // FNV-1a over the canonical text form; stable across platforms.
  std::uint64_t hash() const;
};

// The link of joint i is link i + 1; link 0 is the root.
struct BodyPose {
  std::vector<Vec3> link_positions;
  std::vector<Quat> link_orientations;
};

BodyPose forward_kinematics(const SkeletonSpec& skeleton, const Vec3& root_position,
                            const Quat& root_orientation, const Eigen::VectorXd& q);

// Applies the skeleton's mirror map to a joint configuration.
Eigen::VectorXd mirror_joint_angles(const SkeletonSpec& skeleton, const Eigen::VectorXd& q);

inline constexpr double kDefaultContactVelocityEps = 0.002;
inline constexpr double kDefaultContactHeightEps = 0.2;

// Contact flag per frame for one foot: squared frame-to-frame displacement
// below eps_vel and height below eps_height. The last frame repeats the
// previous flag. Requires at least two frames.
std::vector<std::uint8_t> extract_contacts(std::span<const Vec3> ankle_positions,
                                           double eps_vel = kDefaultContactVelocityEps,
                                           double eps_height = kDefaultContactHeightEps);

std::vector<std::array<std::uint8_t, 2>> extract_foot_contacts(
    std::span<const Vec3> left_ankle, std::span<const Vec3> right_ankle,
    double eps_vel = kDefaultContactVelocityEps,
    double eps_height = kDefaultContactHeightEps);

// Built-in skeletons: a 29-DoF humanoid laid out like the Unitree G1 and a
// 5-DoF two-legged test skeleton. Both are mirror-symmetric about the XZ plane.
SkeletonSpec default_g1_skeleton();
SkeletonSpec test_skeleton_5dof();

// Text format, version 1:
//
//   motionstream-skeleton 1
//   name <identifier>
//   joint <name> <parent_index> <axis_x> <axis_y> <axis_z> <off_x> <off_y> <off_z>
//   ankles <left_joint_name> <right_joint_name>
//   mirror <joint_name> <mirrored_joint_name> <sign>
//
// Joints appear in topological order. Blank lines and lines starting with
// '#' are ignored. Mirror lines are optional but, when present, must cover
// every joint.
SkeletonSpec parse_skeleton(std::string_view text);
std::string format_skeleton(const SkeletonSpec& skeleton);
SkeletonSpec load_skeleton(const std::filesystem::path& path);
void save_skeleton(const SkeletonSpec& skeleton, const std::filesystem::path& path);

}  // namespace motionstream
