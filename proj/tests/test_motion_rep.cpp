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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "motionstream/error.hpp"
#include "motionstream/motion_rep.hpp"
#include "test_support.hpp"

using namespace motionstream;

namespace {

RawMotion static_pose(int n_q, int frames, double height) {
  RawMotion m;
  for (int t = 0; t < frames; ++t) {
    RawMotionFrame f;
    f.p = Vec3(0.3, -0.2, height);
    f.q = Eigen::VectorXd::LinSpaced(n_q, -0.5, 0.5);
    f.c = {1, 0};
    m.push_back(f);
  }
  return m;
}

// Straight transcription of the forward transform with its own Euler and
// rotation code (matrix from the quaternion by hand, asin-based pitch).
struct OracleFrame {
  Eigen::Vector4d phi;
  double dyaw;
  Vec3 dp_local;
  double h;
  Eigen::VectorXd q, dq;
};

std::vector<OracleFrame> oracle_encode(const RawMotion& raw) {
  auto euler = [](const Quat& r) {
    const Eigen::Matrix3d m = testing::oracle_quat_to_matrix(r.w(), r.x(), r.y(), r.z());
    const double pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
    const double roll = std::atan2(m(2, 1) / std::cos(pitch), m(2, 2) / std::cos(pitch));
    const double yaw = std::atan2(m(1, 0) / std::cos(pitch), m(0, 0) / std::cos(pitch));
    return Eigen::Vector3d(roll, pitch, yaw);
  };
  std::vector<OracleFrame> out;
  for (std::size_t t = 0; t + 1 < raw.size(); ++t) {
    const Eigen::Vector3d e = euler(raw[t].R);
    const Eigen::Vector3d e1 = euler(raw[t + 1].R);
    OracleFrame f;
    f.phi << std::sin(e[0]), std::cos(e[0]) - 1, std::sin(e[1]), std::cos(e[1]) - 1;
    double d = e1[2] - e[2];
    while (d > std::numbers::pi) d -= 2 * std::numbers::pi;
    while (d <= -std::numbers::pi) d += 2 * std::numbers::pi;
    f.dyaw = d;
    const Eigen::Matrix3d rz = testing::oracle_axis_angle(Vec3::UnitZ(), e[2]);
    f.dp_local = rz.transpose() * (raw[t + 1].p - raw[t].p);
    f.h = raw[t].p.z();
    f.q = raw[t].q;
    f.dq = raw[t + 1].q - raw[t].q;
    out.push_back(f);
  }
  return out;
}

double max_position_error(const RawMotion& a, const RawMotion& b, std::size_t n) {
  double e = 0;
  for (std::size_t t = 0; t < n; ++t) e = std::max(e, (a[t].p - b[t].p).cwiseAbs().maxCoeff());
  return e;
}

}  // namespace

TEST_CASE("feature dimension") {
  CHECK(feature_dim(29, 2) == 69);
  CHECK(feature_dim(1, 0) == 11);
  CHECK(feature_dim(5, 2) == 21);
}

TEST_CASE("static standing pose encodes to zero increments") {
  const RawMotion m = static_pose(29, 5, 0.79);
  const EncodedMotion enc = encode_features(m);
  REQUIRE(enc.features.size() == 4);
  for (const auto& f : enc.features) {
    CHECK(f.phi.isZero(0.0));
    CHECK(f.dyaw == 0.0);
    CHECK(f.dp_local.isZero(0.0));
    CHECK(f.dq.isZero(0.0));
    CHECK(f.h == 0.79);
    CHECK(f.dim() == 69);
  }
  const RawMotion back = decode_features(enc.features, enc.init);
  for (std::size_t t = 0; t < back.size(); ++t) {
    CHECK(back[t].p == m[t].p);
    CHECK(back[t].q == m[t].q);
    CHECK(back[t].c == m[t].c);
    CHECK(quat_geodesic(back[t].R, m[t].R) == 0.0);
  }
}

TEST_CASE("pure yaw rotation gives constant yaw increments") {
  RawMotion m = static_pose(5, 60, 0.8);
  for (int t = 0; t < 60; ++t) m[static_cast<std::size_t>(t)].R = yaw_quat(t * std::numbers::pi / 100);
  const EncodedMotion enc = encode_features(m);
  for (const auto& f : enc.features) {
    CHECK(f.dyaw == doctest::Approx(std::numbers::pi / 100).epsilon(1e-12));
    CHECK(f.dp_local.norm() == 0.0);
  }
}

TEST_CASE("encoder agrees with an independent line-by-line transcription") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10; ++trial) {
    const RawMotion m = testing::random_smooth_motion(rng, 29, 51);
    const EncodedMotion enc = encode_features(m);
    const auto oracle = oracle_encode(m);
    REQUIRE(enc.features.size() == 50);
    for (std::size_t t = 0; t < 50; ++t) {
      const auto& f = enc.features[t];
      const auto& o = oracle[t];
      CHECK((f.phi - o.phi).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(f.dyaw - o.dyaw) < 1e-10);
      CHECK((f.dp_local - o.dp_local).cwiseAbs().maxCoeff() < 1e-12);
      CHECK(f.h == o.h);
      CHECK(f.q == o.q);
      CHECK((f.dq - o.dq).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("round trip reproduces the motion") {
  std::mt19937_64 rng(99);
  for (int n_q : {5, 29}) {
    for (int trial = 0; trial < 20; ++trial) {
      const RawMotion m = testing::random_smooth_motion(rng, n_q, 120);
      const EncodedMotion enc = encode_features(m);
      CHECK(enc.warnings.empty());
      const RawMotion back = decode_features(enc.features, enc.init);
      REQUIRE(back.size() == m.size() - 1);
      CHECK(max_position_error(m, back, back.size()) <= 1e-9);
      for (std::size_t t = 0; t < back.size(); ++t) {
        CHECK(quat_geodesic(back[t].R, m[t].R) <= 1e-9);
        CHECK((back[t].q - m[t].q).cwiseAbs().maxCoeff() <= 1e-9);
        CHECK(back[t].c == m[t].c);
      }
      const FeatureValidation v = validate_features(enc.features);
      CHECK(v.ok());
      CHECK(v.max_q_dq_gap <= 1e-9);
      CHECK(v.max_circle_error <= 1e-9);
    }
  }
}

TEST_CASE("decoding from a moved initial pose moves the whole motion rigidly") {
  std::mt19937_64 rng(5);
  const RawMotion m = testing::random_smooth_motion(rng, 5, 80);
  const EncodedMotion enc = encode_features(m);
  const double psi = 0.7;
  const Vec3 d(1.5, -2.0, 0.0);
  const InitialPose moved{enc.init.p0 + d, yaw_quat(psi) * enc.init.R0};
  const RawMotion back = decode_features(enc.features, moved);
  for (std::size_t t = 0; t < back.size(); ++t) {
    // Rotate the original about the initial root position, then translate.
    Vec3 expected = rot_z(psi) * (m[t].p - m[0].p) + m[0].p + d;
    expected.z() = m[t].p.z();
    CHECK((back[t].p - expected).norm() < 1e-9);
    CHECK(quat_geodesic(back[t].R, yaw_quat(psi) * m[t].R) < 1e-9);
  }
}

TEST_CASE("features are invariant to yaw and XY moves of the input") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RawMotion m = testing::random_smooth_motion(rng, 29, 60);
  const Eigen::MatrixXd base = features_to_matrix(encode_features(m).features);
  for (int trial = 0; trial < 20; ++trial) {
    const RawMotion moved =
        testing::yaw_translate(m, std::numbers::pi * u(rng), 5 * u(rng), 5 * u(rng));
    const EncodedMotion enc = encode_features(moved);
    CHECK((features_to_matrix(enc.features) - base).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("gimbal lock produces a warning") {
  RawMotion m = static_pose(5, 3, 0.8);
  m[1].R = euler_to_quat({0.3, std::numbers::pi / 2, 0.1});
  const EncodedMotion enc = encode_features(m);
  CHECK_FALSE(enc.warnings.empty());
}

TEST_CASE("encode and decode error paths") {
  const RawMotion one = static_pose(5, 1, 0.8);
  CHECK_THROWS_AS(encode_features(one), Error);
  RawMotion bad = static_pose(5, 3, 0.8);
  bad[1].q[2] = std::nan("");
  CHECK_THROWS_AS(encode_features(bad), Error);
  CHECK_THROWS_AS(decode_features({}, InitialPose{}), Error);
}

TEST_CASE("q/dq validation flags inconsistent features") {
  std::mt19937_64 rng(1);
  auto feats = encode_features(testing::random_smooth_motion(rng, 5, 10)).features;
  feats[3].dq[0] += 1e-3;
  const FeatureValidation v = validate_features(feats);
  CHECK_FALSE(v.ok());
  CHECK(v.max_q_dq_gap == doctest::Approx(1e-3));
}

TEST_CASE("mirroring") {
  const SkeletonSpec s = default_g1_skeleton();
  std::mt19937_64 rng(8);
  const RawMotion m = testing::random_smooth_motion(rng, 29, 20);
  const RawMotion twice = mirror_motion(mirror_motion(m, s), s);
  for (std::size_t t = 0; t < m.size(); ++t) {
    CHECK(twice[t].p == m[t].p);
    CHECK(twice[t].R.coeffs() == m[t].R.coeffs());
    CHECK(twice[t].q == m[t].q);
    CHECK(twice[t].c == m[t].c);
  }
  RawMotion left = static_pose(29, 3, 0.8);
  for (auto& f : left) f.c = {1, 0};
  for (const auto& f : mirror_motion(left, s)) CHECK(f.c == std::vector<std::uint8_t>{0, 1});

  // Mirrored yaw increments and lateral steps flip sign.
  const auto a = encode_features(m).features;
  const auto b = encode_features(mirror_motion(m, s)).features;
  for (std::size_t t = 0; t < a.size(); ++t) {
    CHECK(b[t].dyaw == doctest::Approx(-a[t].dyaw).epsilon(1e-9));
    CHECK(b[t].dp_local.y() == doctest::Approx(-a[t].dp_local.y()).epsilon(1e-9));
    CHECK(b[t].phi[0] == doctest::Approx(-a[t].phi[0]).epsilon(1e-9));
  }

  SkeletonSpec no_mirror = s;
  no_mirror.mirror.clear();
  CHECK_THROWS_AS(mirror_motion(m, no_mirror), Error);
}

TEST_CASE("mirror_text swaps left and right") {
  CHECK(mirror_text("wave left hand") == "wave right hand");
  CHECK(mirror_text("Right kick then LEFT punch") == "Left kick then RIGHT punch");
  CHECK(mirror_text("turn leftwards") == "turn leftwards");
  CHECK(mirror_text(mirror_text("step left, then right")) == "step left, then right");
}
