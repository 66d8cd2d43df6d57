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
#include <random>

#include "motionstream/error.hpp"
#include "motionstream/losses.hpp"
#include "test_support.hpp"

using namespace motionstream;

namespace {

double oracle_huber(double r) { return std::abs(r) <= 1 ? r * r / 2 : std::abs(r) - 0.5; }

std::vector<MotionFeatureFrame> target_features(std::uint64_t seed, const SkeletonSpec& s) {
  std::mt19937_64 rng(seed);
  return encode_features(testing::random_smooth_motion(rng, s.num_dofs(), 12, 0.6)).features;
}

}  // namespace

TEST_CASE("huber pieces") {
  CHECK(huber(0.5) == 0.125);
  CHECK(huber(-0.5) == 0.125);
  CHECK(huber(1.0) == 0.5);
  CHECK(huber(3.0) == 2.5);
  CHECK(huber(-3.0) == 2.5);
  CHECK(huber(0.0) == 0.0);
}

TEST_CASE("KL closed form") {
  DiagonalGaussian d{Eigen::VectorXd::Zero(4), Eigen::VectorXd::Constant(4, 2.0)};
  CHECK(kl_to_standard_normal(d) == doctest::Approx(4 * (3 - 2 * std::log(2.0)) / 2).epsilon(1e-14));
  d.stddev.setOnes();
  CHECK(kl_to_standard_normal(d) == 0.0);
  d.mean << 1, 0, 0, 0;
  CHECK(kl_to_standard_normal(d) == 0.5);
  d.stddev[0] = 0.0;
  CHECK_THROWS_AS(kl_to_standard_normal(d), Error);
}

TEST_CASE("perfect reconstruction with a standard normal posterior is zero everywhere") {
  const SkeletonSpec s = test_skeleton_5dof();
  const auto f = target_features(1, s);
  const DiagonalGaussian dist{Eigen::VectorXd::Zero(16), Eigen::VectorXd::Ones(16)};
  const LossBreakdown b = vae_loss(f, f, dist, s);
  CHECK(b.terms.size() == 7);
  for (const auto& t : b.terms) CHECK(t.value == 0.0);
  CHECK(b.total == 0.0);
  const LossBreakdown l = ldm_loss(Latent::Ones(4), Latent::Ones(4), f, f, s);
  CHECK(l.total == 0.0);
}

TEST_CASE("offset on one joint angle matches hand Huber and an FK oracle") {
  for (const SkeletonSpec& s : {test_skeleton_5dof(), default_g1_skeleton()}) {
    const auto target = target_features(2, s);
    const int joint = s.num_dofs() == 5 ? 0 : 3;  // a hip and a knee
    auto pred = target;
    for (auto& fr : pred) fr.q[joint] += 0.5;

    const DiagonalGaussian dist{Eigen::VectorXd::Zero(3), Eigen::VectorXd::Ones(3)};
    const LossWeights w;
    const LossBreakdown b = vae_loss(pred, target, dist, s, w);
    CHECK(b.value("dof") == 0.125);
    CHECK(b.weighted("dof") == doctest::Approx(w.dof * 0.125).epsilon(1e-15));
    CHECK(b.value("rec") == 0.125);
    CHECK(b.value("dof_vel") == 0.0);
    CHECK(b.value("kl") == 0.0);

    // Root poses agree, so take them from the decoded target and rebuild both
    // bodies with the homogeneous-matrix oracle.
    const RawMotion raw = decode_features(target, InitialPose{});
    double trans = 0, rot = 0, contact = 0;
    for (std::size_t t = 0; t < raw.size(); ++t) {
      Eigen::VectorXd qp = raw[t].q;
      qp[joint] += 0.5;
      const auto tp = testing::homogeneous_fk(s, raw[t].p, raw[t].R, qp);
      const auto tt = testing::homogeneous_fk(s, raw[t].p, raw[t].R, raw[t].q);
      for (std::size_t l = 1; l < tp.size(); ++l) {
        const Eigen::Vector3d d = tp[l].topRightCorner<3, 1>() - tt[l].topRightCorner<3, 1>();
        for (int i = 0; i < 3; ++i) trans += oracle_huber(d[i]);
        const Eigen::Matrix3d rel =
            tt[l].topLeftCorner<3, 3>().transpose() * tp[l].topLeftCorner<3, 3>();
        rot += oracle_huber(std::acos(std::clamp((rel.trace() - 1) / 2, -1.0, 1.0)));
      }
      for (int foot = 0; foot < 2; ++foot) {
        if (target[t].c[foot] < 0.5) continue;
        const auto l = static_cast<std::size_t>(s.ankle_joints[static_cast<std::size_t>(foot)] + 1);
        const Eigen::Vector3d d = tp[l].topRightCorner<3, 1>() - tt[l].topRightCorner<3, 1>();
        for (int i = 0; i < 3; ++i) contact += oracle_huber(d[i]);
      }
    }
    const double n = static_cast<double>(raw.size());
    CHECK(trans > 0.0);
    CHECK(b.value("body_trans") == doctest::Approx(trans / n).epsilon(1e-9));
    CHECK(b.value("body_rot") == doctest::Approx(rot / n).epsilon(1e-7));
    CHECK(b.value("contact") == doctest::Approx(contact / n).epsilon(1e-9));
    double total = 0;
    for (const auto& term : b.terms) total += term.weight * term.value;
    CHECK(b.total == doctest::Approx(total).epsilon(1e-15));
  }
}

TEST_CASE("huber terms are symmetric and vanish only on equality") {
  const SkeletonSpec s = test_skeleton_5dof();
  const auto a = target_features(3, s);
  const auto b = target_features(4, s);
  const LossBreakdown ab = ldm_loss(Latent::Zero(3), Latent::Ones(3), a, b, s);
  const LossBreakdown ba = ldm_loss(Latent::Ones(3), Latent::Zero(3), b, a, s);
  for (const char* name : {"simple", "rec", "dof", "dof_vel", "body_trans", "body_rot"}) {
    CHECK(ab.value(name) > 0.0);
    CHECK(ab.value(name) == doctest::Approx(ba.value(name)).epsilon(1e-12));
  }
}

TEST_CASE("shape errors") {
  const SkeletonSpec s = test_skeleton_5dof();
  const auto f = target_features(5, s);
  const std::vector<MotionFeatureFrame> shorter(f.begin(), f.end() - 1);
  const DiagonalGaussian dist{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  CHECK_THROWS_AS(vae_loss(shorter, f, dist, s), Error);
  CHECK_THROWS_AS(ldm_loss(Latent::Zero(2), Latent::Zero(3), f, f, s), Error);
  CHECK_THROWS_AS(vae_loss(f, f, dist, default_g1_skeleton()), Error);
  CHECK_THROWS_AS(vae_loss(f, f, dist, s).value("nope"), Error);
}
