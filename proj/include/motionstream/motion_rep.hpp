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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "motionstream/kinematics.hpp"
#include "motionstream/rotation.hpp"

namespace motionstream {

inline constexpr int kNumContacts = 2;

// Root pose, joint angles and foot contacts at one 50 Hz tick.
struct RawMotionFrame {
  Vec3 p = Vec3::Zero();
  Quat R = Quat::Identity();
  Eigen::VectorXd q;
  std::vector<std::uint8_t> c = std::vector<std::uint8_t>(kNumContacts, 0);
};

using RawMotion = std::vector<RawMotionFrame>;

// Local incremental feature of one frame. Contacts are carried as reals so
// that generated frames (which are not exactly binary) fit the same type.
struct MotionFeatureFrame {
  Eigen::Vector4d phi = Eigen::Vector4d::Zero();  // sin r, cos r - 1, sin p, cos p - 1
  double dyaw = 0.0;
  Eigen::VectorXd c;
  Vec3 dp_local = Vec3::Zero();
  double h = 0.0;
  Eigen::VectorXd q;
  Eigen::VectorXd dq;

  int num_dofs() const { return static_cast<int>(q.size()); }
  int num_contacts() const { return static_cast<int>(c.size()); }
  int dim() const;

  // Layout: phi(4) dyaw(1) c(n_c) dp_local(3) h(1) q(n_q) dq(n_q).
  Eigen::VectorXd flatten() const;
  static MotionFeatureFrame unflatten(const Eigen::Ref<const Eigen::VectorXd>& v, int n_q,
                                      int n_c = kNumContacts);
};

struct InitialPose {
  Vec3 p0 = Vec3::Zero();
  Quat R0 = Quat::Identity();
};

struct EncodedMotion {
  std::vector<MotionFeatureFrame> features;
  InitialPose init;
  std::vector<std::string> warnings;
};

int feature_dim(int n_q, int n_c);

// T + 1 raw frames -> T feature frames plus the initial pose. Throws on
// fewer than two frames, inconsistent sizes, or non-finite values. Frames
// at gimbal lock produce a warning and use the yaw-absorbing branch.
EncodedMotion encode_features(std::span<const RawMotionFrame> raw);

// Reconstructs T raw frames. Only the yaw of init.R0 and the x, y of init.p0
// are used; roll, pitch and height come from the features. dq is not read.
RawMotion decode_features(std::span<const MotionFeatureFrame> features, const InitialPose& init);

struct FeatureValidation {
  double max_q_dq_gap = 0.0;       // max |q_{t+1} - q_t - dq_t|
  double max_circle_error = 0.0;   // distance of (phi0, phi1+1), (phi2, phi3+1) from the unit circle
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

FeatureValidation validate_features(std::span<const MotionFeatureFrame> features,
                                    double tolerance = 1e-6);

// Angle between init.R0 and the orientation the first feature frame implies
// at the same yaw; nonzero when the initial pose disagrees with phi_0.
double initial_pose_discrepancy(const MotionFeatureFrame& first, const InitialPose& init);

// Reflects a motion about the sagittal (XZ) plane.
RawMotion mirror_motion(std::span<const RawMotionFrame> raw, const SkeletonSpec& skeleton);

// Swaps "left" and "right" words, case-insensitively, keeping the casing style.
std::string mirror_text(std::string_view label);

Eigen::MatrixXd features_to_matrix(std::span<const MotionFeatureFrame> features);
std::vector<MotionFeatureFrame> matrix_to_features(const Eigen::MatrixXd& m, int n_q,
                                                   int n_c = kNumContacts);

}  // namespace motionstream
