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

#include <algorithm>
#include <cmath>
#include <random>

#include "motionstream/error.hpp"
#include "motionstream/metrics.hpp"
#include "test_support.hpp"

using namespace motionstream;

namespace {

FeatureStats stats(Eigen::VectorXd mu, Eigen::MatrixXd sigma) {
  return {std::move(mu), std::move(sigma), 1};
}

double oracle_fid_1d(double m1, double v1, double m2, double v2) {
  return (m1 - m2) * (m1 - m2) + v1 + v2 - 2 * std::sqrt(v1 * v2);
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

// A trajectory of `links` links (link 0 is the root) moving smoothly.
std::vector<BodyPose> moving_body(int frames, int links, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd base = random_matrix(rng, links, 3);
  std::vector<BodyPose> out(static_cast<std::size_t>(frames));
  for (int t = 0; t < frames; ++t) {
    auto& pose = out[static_cast<std::size_t>(t)];
    for (int l = 0; l < links; ++l) {
      const double s = 0.02 * t * (1 + l);
      pose.link_positions.push_back(base.row(l).transpose() +
                                    Vec3(std::sin(s), std::cos(1.3 * s), 0.1 * s * s));
      pose.link_orientations.push_back(Quat::Identity());
    }
  }
  return out;
}

std::vector<BodyPose> transformed(const std::vector<BodyPose>& in, const Eigen::Matrix3d& r,
                                  const Vec3& shift, const Vec3& drift = Vec3::Zero()) {
  auto out = in;
  for (std::size_t t = 0; t < out.size(); ++t)
    for (auto& p : out[t].link_positions) p = r * p + shift + static_cast<double>(t) * drift;
  return out;
}

}  // namespace

TEST_CASE("fid: self distance, 1-D example, diagonal separability, symmetry") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd a = random_matrix(rng, 6, 6);
  const FeatureStats s = stats(Eigen::VectorXd::Random(6), a * a.transpose());
  CHECK(std::abs(fid(s, s)) <= 1e-9);

  CHECK(fid(stats(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, 1.0)),
            stats(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, 4.0))) == 2.0);

  const Eigen::Vector3d m1(0.5, -1, 2), v1(1, 0.25, 3), m2(0, 1, 2.5), v2(4, 1, 0.5);
  double sum = 0;
  for (int i = 0; i < 3; ++i) sum += oracle_fid_1d(m1[i], v1[i], m2[i], v2[i]);
  const FeatureStats g = stats(m1, v1.asDiagonal().toDenseMatrix());
  const FeatureStats r = stats(m2, v2.asDiagonal().toDenseMatrix());
  CHECK(fid(g, r) == doctest::Approx(sum).epsilon(1e-12));

  const Eigen::MatrixXd b = random_matrix(rng, 6, 4);
  const FeatureStats t = stats(Eigen::VectorXd::Zero(6), b * b.transpose());  // rank 4
  const Eigen::MatrixXd full = random_matrix(rng, 6, 6);
  const FeatureStats u = stats(Eigen::VectorXd::Ones(6), full * full.transpose());
  CHECK(fid(s, u) == doctest::Approx(fid(u, s)).epsilon(1e-10));
  // A singular covariance leaves round-off eigenvalues near zero whose square
  // roots are ~1e-7; symmetry holds only to that level.
  CHECK(fid(s, t) == doctest::Approx(fid(t, s)).epsilon(1e-6));
  CHECK(fid(s, t) >= -1e-9);
}

TEST_CASE("fid errors") {
  const FeatureStats one = stats(Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Ones(1, 1));
  const FeatureStats two = stats(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2));
  CHECK_THROWS_AS(fid(one, two), Error);
  FeatureStats bad = one;
  bad.mu[0] = std::nan("");
  CHECK_THROWS_AS(fid(bad, one), Error);
  CHECK_THROWS_AS(fid(one, stats(Eigen::VectorXd::Zero(1), -Eigen::MatrixXd::Ones(1, 1))), Error);
}

TEST_CASE("partial stats merge equals one pass; 1/n covariance") {
  std::mt19937_64 rng(2);
  const Eigen::MatrixXd x = random_matrix(rng, 50, 5);
  const FeatureStats whole = FeatureStats::from_samples(x);
  PartialStats a(5), b(5);
  for (int i = 0; i < 50; ++i) (i < 17 ? a : b).add(x.row(i).transpose());
  a.merge(b);
  const FeatureStats merged = a.finalize();
  CHECK(merged.n == 50);
  CHECK((merged.mu - whole.mu).norm() < 1e-12);
  CHECK((merged.sigma - whole.sigma).norm() < 1e-12);
  const Eigen::MatrixXd c = x.rowwise() - x.colwise().mean();
  CHECK((whole.sigma - c.transpose() * c / 50.0).norm() < 1e-12);
  CHECK((whole.sigma - whole.sigma.transpose()).norm() == 0.0);
  CHECK_THROWS_AS(PartialStats(3).finalize(), Error);
}

TEST_CASE("diversity matches a straight-line oracle") {
  std::mt19937_64 gen(3);
  const Eigen::MatrixXd x = random_matrix(gen, 100, 8);

  std::mt19937_64 rng(42), oracle_rng(42);
  const double got = diversity(x, 32, rng);
  std::vector<int> perm;
  for (int i = 0; i < 100; ++i) perm.push_back(i);
  for (int i = 99; i > 0; --i) {
    const std::uint64_t r = oracle_rng();
    const int j = static_cast<int>(r % static_cast<std::uint64_t>(i + 1));
    const int tmp = perm[i];
    perm[i] = perm[j];
    perm[j] = tmp;
  }
  double sum = 0;
  for (int i = 0; i < 32; ++i) {
    double sq = 0;
    for (int k = 0; k < 8; ++k) sq += std::pow(x(perm[i], k) - x(perm[i + 32], k), 2);
    sum += std::sqrt(sq);
  }
  CHECK(got == doctest::Approx(sum / 32).epsilon(1e-14));

  CHECK(diversity(Eigen::MatrixXd::Ones(10, 3), 5, rng) == 0.0);
  Eigen::MatrixXd two(2, 2);
  two << 0, 0, 3, 4;
  CHECK(diversity(two, 1, rng) == 5.0);
  CHECK(diversity(two, 0, rng) == 5.0);  // default D = min(32, N / 2)
  CHECK_THROWS_AS(diversity(two, 2, rng), Error);
}

TEST_CASE("R@K and MM-Dist") {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd e = random_matrix(rng, 32, 6);
  CHECK(r_precision(e, e, 1) == 1.0);
  CHECK(mm_dist(e, e) == 0.0);

  // Orthonormal motions, texts are a shuffled pairing with a small pull
  // toward the true motion for some queries.
  const int m = 8;
  Eigen::MatrixXd motion = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd text(m, m);
  std::vector<int> perm{3, 1, 0, 2, 7, 5, 6, 4};
  for (int i = 0; i < m; ++i) text.row(i) = motion.row(perm[i]) + 0.3 * motion.row(i) * (i % 3);
  for (int k = 1; k <= m; ++k) {
    int hits = 0;
    for (int q = 0; q < m; ++q) {
      std::vector<std::pair<double, int>> table;
      for (int j = 0; j < m; ++j) table.push_back({(text.row(q) - motion.row(j)).norm(), j});
      std::sort(table.begin(), table.end());
      for (int r = 0; r < k; ++r) hits += table[r].second == q;
    }
    CHECK(r_precision(motion, text, k) == static_cast<double>(hits) / m);
  }
  CHECK(r_precision(motion, text, m) == 1.0);
  double mm = 0;
  for (int i = 0; i < m; ++i) mm += (motion.row(i) - text.row(i)).norm();
  CHECK(mm_dist(motion, text) == doctest::Approx(mm / m).epsilon(1e-15));

  // Exact ties: every motion is identical, so only the lowest index ranks first.
  const Eigen::MatrixXd same = Eigen::MatrixXd::Zero(4, 2);
  CHECK(r_precision(same, same, 1) == 0.25);
  CHECK(r_precision(same, same, 2) == 0.5);

  CHECK_THROWS_AS(r_precision(motion, text, m + 1), Error);
  CHECK_THROWS_AS(r_precision(motion, text.topRows(4), 1), Error);
  CHECK(r_precision_batched(e, e, 3) == 1.0);
  CHECK_THROWS_AS(r_precision_batched(e.topRows(31), e.topRows(31), 3), Error);
}

TEST_CASE("jerk, PJ and AUJ") {
  Eigen::MatrixXd cubic(1, 10), constant = Eigen::MatrixXd::Constant(3, 9, 0.7);
  for (int t = 0; t < 10; ++t) cubic(0, t) = std::pow(t, 3);
  CHECK(jerk(cubic).cols() == 7);
  CHECK((jerk(cubic).array() == 6.0).all());
  CHECK(peak_jerk(cubic) == 6.0);
  CHECK(peak_jerk(constant) == 0.0);
  CHECK(auj(constant, 0.5) == doctest::Approx(6 * 0.5).epsilon(1e-15));
  CHECK(auj(cubic, 6.0) == 0.0);

  Eigen::MatrixXd sine(2, 50);
  for (int t = 0; t < 50; ++t) {
    sine(0, t) = std::sin(0.3 * t);
    sine(1, t) = 0.5 * std::sin(0.7 * t + 1);
  }
  double peak = 0, area = 0;
  for (int t = 3; t < 50; ++t) {
    double worst = 0;
    for (int i = 0; i < 2; ++i) {
      const double j = sine(i, t) - 3 * sine(i, t - 1) + 3 * sine(i, t - 2) - sine(i, t - 3);
      peak = std::max(peak, std::abs(j));
      worst = std::max(worst, std::abs(j - 0.01));
    }
    area += worst;
  }
  CHECK(peak_jerk(sine) == doctest::Approx(peak).epsilon(1e-13));
  CHECK(peak < std::pow(0.7, 3) * 0.5 + 1e-12);
  CHECK(auj(sine, 0.01) == doctest::Approx(area).epsilon(1e-13));
  CHECK(peak_jerk(-2.5 * sine) == doctest::Approx(2.5 * peak).epsilon(1e-13));

  CHECK_THROWS_AS(jerk(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST_CASE("jerk baseline") {
  Eigen::MatrixXd cubic(1, 10);
  for (int t = 0; t < 10; ++t) cubic(0, t) = std::pow(t, 3);
  const std::vector<Eigen::MatrixXd> flat{Eigen::MatrixXd::Ones(1, 10)};
  CHECK(jerk_baseline(flat) == 0.0);
  CHECK(jerk_baseline(std::vector<Eigen::MatrixXd>{cubic}) == 6.0);
  CHECK(jerk_baseline(std::vector<Eigen::MatrixXd>{cubic, flat[0]}) == 3.0);
  CHECK_THROWS_AS(jerk_baseline(std::vector<Eigen::MatrixXd>{}), Error);
}

TEST_CASE("transition clips") {
  std::vector<std::string> warnings;
  const auto one = transition_clips(200, {100}, 15, &warnings);
  REQUIRE(one.size() == 1);
  CHECK(one[0].start == 85);
  CHECK(one[0].start + one[0].length - 1 == 114);
  CHECK(warnings.empty());
  const auto edge = transition_clips(200, {5, 60, 190, 150}, 15, &warnings);
  REQUIRE(edge.size() == 2);
  CHECK(edge[0].boundary == 60);
  CHECK(edge[1].boundary == 150);
  CHECK(warnings.size() == 2);
  CHECK(warnings[0].find("frame 5") != std::string::npos);
}

TEST_CASE("tracking: identity, global shift and rigid invariance") {
  const auto ref = moving_body(20, 6, 5);
  const TrackingMetrics same = tracking_metrics({ref, ref});
  CHECK(same.g_mpjpe == 0.0);
  CHECK(same.mpjpe == 0.0);
  CHECK(same.e_vel == 0.0);
  CHECK(same.e_acc == 0.0);

  const TrajectoryPair shifted{transformed(ref, Eigen::Matrix3d::Identity(), Vec3(0.01, 0, 0)), ref};
  const TrackingMetrics m = tracking_metrics(shifted);
  CHECK(m.g_mpjpe == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(m.mpjpe < 1e-9);
  CHECK(m.e_vel < 1e-9);
  CHECK(m.e_acc < 1e-9);
  CHECK(success_rate(std::vector<TrajectoryPair>{shifted}) == 1.0);

  // Perturbed policy, then a common rigid transform applied to both.
  auto pol = ref;
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0, 0.02);
  for (auto& pose : pol)
    for (auto& p : pose.link_positions) p += Vec3(n(rng), n(rng), n(rng));
  const TrackingMetrics base = tracking_metrics({pol, ref});
  const Eigen::Matrix3d rot = testing::oracle_axis_angle(Vec3(0.3, -0.5, 0.8).normalized(), 1.1);
  const Vec3 shift(2, -1, 0.5);
  const TrackingMetrics moved =
      tracking_metrics({transformed(pol, rot, shift), transformed(ref, rot, shift)});
  CHECK(moved.g_mpjpe == doctest::Approx(base.g_mpjpe).epsilon(1e-10));
  CHECK(moved.mpjpe == doctest::Approx(base.mpjpe).epsilon(1e-10));
  CHECK(moved.e_vel == doctest::Approx(base.e_vel).epsilon(1e-10));
  CHECK(moved.e_acc == doctest::Approx(base.e_acc).epsilon(1e-10));

  // Offset and drift on the policy only.
  const TrackingMetrics offset =
      tracking_metrics({transformed(pol, Eigen::Matrix3d::Identity(), shift), ref});
  CHECK(offset.e_vel == doctest::Approx(base.e_vel).epsilon(1e-10));
  CHECK(offset.e_acc == doctest::Approx(base.e_acc).epsilon(1e-10));
  const TrackingMetrics drift = tracking_metrics(
      {transformed(pol, Eigen::Matrix3d::Identity(), shift, Vec3(0.01, 0.02, -0.03)), ref});
  CHECK(drift.e_acc == doctest::Approx(base.e_acc).epsilon(1e-9));
  CHECK(drift.e_vel != doctest::Approx(base.e_vel));
}

TEST_CASE("tracking: hand formulas for velocity and acceleration") {
  // One non-root link; policy link moves at 1 mm/frame faster along x.
  std::vector<BodyPose> ref(5), pol(5);
  for (int t = 0; t < 5; ++t) {
    ref[t].link_positions = {Vec3::Zero(), Vec3(0.1 * t, 0, 0)};
    pol[t].link_positions = {Vec3::Zero(), Vec3(0.101 * t + 0.0005 * t * t, 0, 0)};
  }
  const TrackingMetrics m = tracking_metrics({pol, ref});
  // v diff at t: 0.001 + 0.0005 (2t + 1); a diff: 0.001.
  double ev = 0;
  for (int t = 0; t < 4; ++t) ev += 0.001 + 0.0005 * (2 * t + 1);
  CHECK(m.e_vel == doctest::Approx(1000 * ev / 4).epsilon(1e-12));
  CHECK(m.e_acc == doctest::Approx(1.0).epsilon(1e-9));
  double g = 0;
  for (int t = 0; t < 5; ++t) g += 0.001 * t + 0.0005 * t * t;
  CHECK(m.g_mpjpe == doctest::Approx(1000 * g / 5).epsilon(1e-12));
  CHECK(m.mpjpe == doctest::Approx(m.g_mpjpe).epsilon(1e-12));
}

TEST_CASE("success boundary cases with 14 links") {
  const auto ref = moving_body(10, 15, 7);  // root plus 14 links
  auto one = ref;
  one[4].link_positions[3] += Vec3(0.31, 0, 0);
  const TrajectoryPair single{one, ref};
  CHECK(max_root_relative_error(single) == doctest::Approx(0.31 / 14).epsilon(1e-12));
  CHECK(success_rate(std::vector<TrajectoryPair>{single}) == 1.0);

  auto all = ref;
  for (std::size_t l = 1; l < 15; ++l) all[4].link_positions[l] += Vec3(0, 0.31, 0);
  const TrajectoryPair every{all, ref};
  CHECK(max_root_relative_error(every) == doctest::Approx(0.31).epsilon(1e-12));
  CHECK(success_rate(std::vector<TrajectoryPair>{every}) == 0.0);
  const std::vector<TrajectoryPair> both{single, every};
  CHECK(success_rate(both) == 0.5);

  double last = 0;
  for (double theta : {0.0, 0.01, 0.03, 0.2, 0.31, 0.5}) {
    const double s = success_rate(both, theta);
    CHECK(s >= last);
    last = s;
  }
}

TEST_CASE("tracking errors") {
  const auto a = moving_body(10, 4, 8);
  const auto b = moving_body(9, 4, 8);
  CHECK_THROWS_AS(tracking_metrics({a, b}), Error);
  const auto c = moving_body(2, 4, 8);
  CHECK_THROWS_AS(tracking_metrics({c, c}), Error);
  CHECK_THROWS_AS(success_rate(std::vector<TrajectoryPair>{}), Error);
}

TEST_CASE("body trajectory and joint trajectories from a raw motion") {
  const SkeletonSpec s = test_skeleton_5dof();
  std::mt19937_64 rng(9);
  const RawMotion raw = testing::random_smooth_motion(rng, s.num_dofs(), 12, 0.5);
  const auto bodies = body_trajectory(s, raw);
  REQUIRE(bodies.size() == raw.size());
  CHECK(bodies[0].link_positions.size() == static_cast<std::size_t>(s.num_links()));
  const Eigen::MatrixXd q = joint_trajectories(raw);
  CHECK(q.rows() == 5);
  CHECK(q.cols() == 12);
  CHECK(q.col(7) == raw[7].q);
}
