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

#include "motionstream/rotation.hpp"

#include <cmath>
#include <numbers>

namespace motionstream {

EulerDecomposition quat_to_euler(const Quat& q) {
  const Eigen::Matrix3d m = q.toRotationMatrix();
  EulerDecomposition out;
  out.angles.pitch = std::atan2(-m(2, 0), std::hypot(m(2, 1), m(2, 2)));
  if (std::abs(std::abs(out.angles.pitch) - std::numbers::pi / 2) < kGimbalLockTolerance) {
    out.gimbal_locked = true;
    out.angles.roll = 0.0;
    out.angles.yaw = std::atan2(-m(0, 1), m(1, 1));
    return out;
  }
  out.angles.roll = std::atan2(m(2, 1), m(2, 2));
  out.angles.yaw = std::atan2(m(1, 0), m(0, 0));
  return out;
}

Quat euler_to_quat(const EulerAngles& e) {
  Quat q = Eigen::AngleAxisd(e.yaw, Vec3::UnitZ()) *
           Eigen::AngleAxisd(e.pitch, Vec3::UnitY()) *
           Eigen::AngleAxisd(e.roll, Vec3::UnitX());
  return q.normalized();
}

Quat yaw_quat(double yaw) {
  return Quat(std::cos(yaw / 2), 0.0, 0.0, std::sin(yaw / 2));
}

Eigen::Matrix3d rot_z(double yaw) {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

double wrap_angle(double angle) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double a = std::remainder(angle, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  return a;
}

double quat_geodesic(const Quat& a, const Quat& b) {
  // atan2 form stays accurate for nearly identical rotations, where acos of
  // the dot product loses half the significant digits.
  const Quat rel = a.conjugate() * b;
  return 2.0 * std::atan2(rel.vec().norm(), std::abs(rel.w()));
}

}  // namespace motionstream
