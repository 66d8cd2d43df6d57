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

#include "motionstream/motion_rep.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "motionstream/error.hpp"

namespace motionstream {

int feature_dim(int n_q, int n_c) { return 4 + 1 + n_c + 3 + 1 + 2 * n_q; }

int MotionFeatureFrame::dim() const { return feature_dim(num_dofs(), num_contacts()); }

Eigen::VectorXd MotionFeatureFrame::flatten() const {
  const int n_q = num_dofs();
  const int n_c = num_contacts();
  Eigen::VectorXd v(dim());
  v.segment<4>(0) = phi;
  v[4] = dyaw;
  v.segment(5, n_c) = c;
  v.segment<3>(5 + n_c) = dp_local;
  v[8 + n_c] = h;
  v.segment(9 + n_c, n_q) = q;
  v.segment(9 + n_c + n_q, n_q) = dq;
  return v;
}

MotionFeatureFrame MotionFeatureFrame::unflatten(const Eigen::Ref<const Eigen::VectorXd>& v,
                                                 int n_q, int n_c) {
  require(v.size() == feature_dim(n_q, n_c), ErrorCode::kDimensionMismatch,
          "feature vector has " + std::to_string(v.size()) + " entries, expected " +
              std::to_string(feature_dim(n_q, n_c)));
  MotionFeatureFrame f;
  f.phi = v.segment<4>(0);
  f.dyaw = v[4];
  f.c = v.segment(5, n_c);
  f.dp_local = v.segment<3>(5 + n_c);
  f.h = v[8 + n_c];
  f.q = v.segment(9 + n_c, n_q);
  f.dq = v.segment(9 + n_c + n_q, n_q);
  return f;
}

namespace {

void check_raw_frame(const RawMotionFrame& f, Eigen::Index n_q, std::size_t n_c, std::size_t t) {
  const std::string where = "raw frame " + std::to_string(t);
  require(f.q.size() == n_q, ErrorCode::kDimensionMismatch, where + ": joint count differs");
  require(f.c.size() == n_c, ErrorCode::kDimensionMismatch, where + ": contact count differs");
  require(f.p.allFinite() && f.R.coeffs().allFinite() && f.q.allFinite(),
          ErrorCode::kInvalidArgument, where + ": non-finite value");
}

}  // namespace

EncodedMotion encode_features(std::span<const RawMotionFrame> raw) {
  require(raw.size() >= 2, ErrorCode::kInvalidArgument,
          "encode_features needs at least 2 raw frames, got " + std::to_string(raw.size()));
  const Eigen::Index n_q = raw[0].q.size();
  const std::size_t n_c = raw[0].c.size();
  for (std::size_t t = 0; t < raw.size(); ++t) check_raw_frame(raw[t], n_q, n_c, t);

  EncodedMotion out;
  out.init = {raw[0].p, raw[0].R};
  const std::size_t T = raw.size() - 1;
  out.features.reserve(T);

  std::size_t locked = 0;
  EulerDecomposition cur = quat_to_euler(raw[0].R);
  for (std::size_t t = 0; t < T; ++t) {
    const EulerDecomposition next = quat_to_euler(raw[t + 1].R);
    if (cur.gimbal_locked) ++locked;

    MotionFeatureFrame f;
    const EulerAngles& e = cur.angles;
    f.phi << std::sin(e.roll), std::cos(e.roll) - 1.0, std::sin(e.pitch), std::cos(e.pitch) - 1.0;
    f.dyaw = wrap_angle(next.angles.yaw - e.yaw);
    f.c.resize(static_cast<Eigen::Index>(n_c));
    for (std::size_t k = 0; k < n_c; ++k) f.c[static_cast<Eigen::Index>(k)] = raw[t].c[k];
    const Vec3 dp = raw[t + 1].p - raw[t].p;
    const double cy = std::cos(e.yaw);
    const double sy = std::sin(e.yaw);
    f.dp_local = Vec3(cy * dp.x() + sy * dp.y(), -sy * dp.x() + cy * dp.y(), dp.z());
    f.h = raw[t].p.z();
    f.q = raw[t].q;
    f.dq = raw[t + 1].q - raw[t].q;
    out.features.push_back(std::move(f));
    cur = next;
  }
  if (locked > 0) {
    out.warnings.push_back(std::to_string(locked) +
                           " frame(s) at gimbal lock; roll folded into yaw, round trip not exact");
  }
  return out;
}

RawMotion decode_features(std::span<const MotionFeatureFrame> features, const InitialPose& init) {
  require(!features.empty(), ErrorCode::kInvalidArgument, "decode_features: no feature frames");
  require(std::abs(init.R0.norm() - 1.0) <= 1e-9, ErrorCode::kInvalidArgument,
          "decode_features: initial orientation is not unit-norm");
  RawMotion out;
  out.reserve(features.size());
  double yaw = quat_to_euler(init.R0).angles.yaw;
  Vec3 p_integrated = init.p0;
  for (std::size_t t = 0; t < features.size(); ++t) {
    const MotionFeatureFrame& f = features[t];
    RawMotionFrame r;
    const double roll = std::atan2(f.phi[0], f.phi[1] + 1.0);
    const double pitch = std::atan2(f.phi[2], f.phi[3] + 1.0);
    r.R = euler_to_quat({roll, pitch, yaw});
    r.p = Vec3(p_integrated.x(), p_integrated.y(), f.h);
    r.q = f.q;
    r.c.resize(static_cast<std::size_t>(f.c.size()));
    for (Eigen::Index k = 0; k < f.c.size(); ++k) {
      r.c[static_cast<std::size_t>(k)] = f.c[k] >= 0.5 ? 1 : 0;
    }
    out.push_back(std::move(r));
    if (t + 1 < features.size()) {
      const double cy = std::cos(yaw);
      const double sy = std::sin(yaw);
      const Vec3& d = f.dp_local;
      p_integrated += Vec3(cy * d.x() - sy * d.y(), sy * d.x() + cy * d.y(), d.z());
      yaw += f.dyaw;
    }
  }
  return out;
}

FeatureValidation validate_features(std::span<const MotionFeatureFrame> features,
                                    double tolerance) {
  FeatureValidation v;
  for (std::size_t t = 0; t < features.size(); ++t) {
    const MotionFeatureFrame& f = features[t];
    const double e1 = std::abs(std::hypot(f.phi[0], f.phi[1] + 1.0) - 1.0);
    const double e2 = std::abs(std::hypot(f.phi[2], f.phi[3] + 1.0) - 1.0);
    v.max_circle_error = std::max({v.max_circle_error, e1, e2});
    if (!f.flatten().allFinite()) {
      v.issues.push_back("frame " + std::to_string(t) + ": non-finite feature");
    }
    if (t + 1 < features.size()) {
      const double gap =
          (features[t + 1].q - f.q - f.dq).cwiseAbs().maxCoeff();
      v.max_q_dq_gap = std::max(v.max_q_dq_gap, gap);
      if (gap > tolerance) {
        v.issues.push_back("frame " + std::to_string(t) + ": q/dq inconsistency " +
                           std::to_string(gap));
      }
    }
  }
  if (v.max_circle_error > tolerance) {
    v.issues.push_back("phi components leave the unit circle by " +
                       std::to_string(v.max_circle_error));
  }
  return v;
}

double initial_pose_discrepancy(const MotionFeatureFrame& first, const InitialPose& init) {
  const double yaw = quat_to_euler(init.R0).angles.yaw;
  const Quat implied = euler_to_quat({std::atan2(first.phi[0], first.phi[1] + 1.0),
                                      std::atan2(first.phi[2], first.phi[3] + 1.0), yaw});
  return quat_geodesic(implied, init.R0);
}

RawMotion mirror_motion(std::span<const RawMotionFrame> raw, const SkeletonSpec& skeleton) {
  require(skeleton.has_mirror(), ErrorCode::kInvalidArgument,
          "mirror_motion: skeleton '" + skeleton.name + "' has no mirror map");
  RawMotion out;
  out.reserve(raw.size());
  for (const RawMotionFrame& f : raw) {
    RawMotionFrame m;
    m.p = Vec3(f.p.x(), -f.p.y(), f.p.z());
    // M R M with M = diag(1, -1, 1) negates roll and yaw and keeps pitch.
    m.R = Quat(f.R.w(), -f.R.x(), f.R.y(), -f.R.z());
    m.q = mirror_joint_angles(skeleton, f.q);
    m.c = f.c;
    if (m.c.size() >= 2) std::swap(m.c[0], m.c[1]);
    out.push_back(std::move(m));
  }
  return out;
}

std::string mirror_text(std::string_view label) {
  auto lower = [](std::string_view w) {
    std::string s(w);
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  auto restyle = [](std::string_view original, std::string replacement) {
    const bool all_upper = std::all_of(original.begin(), original.end(), [](char ch) {
      return std::isupper(static_cast<unsigned char>(ch));
    });
    if (all_upper) {
      for (char& ch : replacement) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    } else if (std::isupper(static_cast<unsigned char>(original.front()))) {
      replacement[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(replacement[0])));
    }
    return replacement;
  };

  std::string out;
  out.reserve(label.size() + 1);
  std::size_t i = 0;
  while (i < label.size()) {
    if (!std::isalpha(static_cast<unsigned char>(label[i]))) {
      out.push_back(label[i++]);
      continue;
    }
    std::size_t j = i;
    while (j < label.size() && std::isalpha(static_cast<unsigned char>(label[j]))) ++j;
    const std::string_view word = label.substr(i, j - i);
    const std::string w = lower(word);
    if (w == "left") {
      out += restyle(word, "right");
    } else if (w == "right") {
      out += restyle(word, "left");
    } else {
      out += word;
    }
    i = j;
  }
  return out;
}

Eigen::MatrixXd features_to_matrix(std::span<const MotionFeatureFrame> features) {
  if (features.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(features.size()), features[0].dim());
  for (std::size_t t = 0; t < features.size(); ++t) {
    require(features[t].dim() == m.cols(), ErrorCode::kDimensionMismatch,
            "feature frames differ in dimension");
    m.row(static_cast<Eigen::Index>(t)) = features[t].flatten().transpose();
  }
  return m;
}

std::vector<MotionFeatureFrame> matrix_to_features(const Eigen::MatrixXd& m, int n_q, int n_c) {
  std::vector<MotionFeatureFrame> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out.push_back(MotionFeatureFrame::unflatten(m.row(r).transpose(), n_q, n_c));
  }
  return out;
}

}  // namespace motionstream
