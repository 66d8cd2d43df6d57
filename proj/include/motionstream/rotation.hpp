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

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace motionstream {

using Vec3 = Eigen::Vector3d;
// Scalar-first (w, x, y, z) Hamilton quaternion. Eigen's constructor takes
// (w, x, y, z) and its product is the Hamilton product.
using Quat = Eigen::Quaterniond;

// Roll, pitch and yaw of R = Rz(yaw) * Ry(pitch) * Rx(roll), which is the
// intrinsic X-Y-Z reading of the same rotation.
struct EulerAngles {
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;
};

// Distance of |pitch| from pi/2 below which the decomposition is treated as
// gimbal-locked.
inline constexpr double kGimbalLockTolerance = 1e-6;

struct EulerDecomposition {
  EulerAngles angles;
  bool gimbal_locked = false;
};

// At gimbal lock roll is fixed to zero and yaw absorbs the remaining rotation.
EulerDecomposition quat_to_euler(const Quat& q);
Quat euler_to_quat(const EulerAngles& e);

Quat yaw_quat(double yaw);
Eigen::Matrix3d rot_z(double yaw);

// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

// Geodesic angle between two unit quaternions, in radians, in [0, pi].
double quat_geodesic(const Quat& a, const Quat& b);

}  // namespace motionstream
