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

#include <filesystem>
#include <random>

#include "motionstream/codec.hpp"
#include "motionstream/error.hpp"
#include "test_support.hpp"

using namespace motionstream;

namespace {

constexpr int kNq = 2;
constexpr int kNc = 2;
constexpr int kFuture = 3;
constexpr int kFlat = kFuture * (9 + kNc + 2 * kNq);  // 45

FeatureWindow window_from_flat(const Eigen::VectorXd& flat) {
  FeatureWindow w;
  const int d = feature_dim(kNq, kNc);
  for (int t = 0; t < kFuture; ++t) {
    w.future.push_back(MotionFeatureFrame::unflatten(flat.segment(t * d, d), kNq, kNc));
  }
  w.history = {w.future[0], w.future[0]};
  return w;
}

// Data on a random rank-r affine subspace.
std::vector<FeatureWindow> low_rank_windows(std::mt19937_64& rng, int rank, int count) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd basis(kFlat, rank);
  for (Eigen::Index i = 0; i < basis.size(); ++i) basis.data()[i] = n(rng);
  Eigen::VectorXd offset(kFlat);
  for (int i = 0; i < kFlat; ++i) offset[i] = n(rng);
  std::vector<FeatureWindow> out;
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd c(rank);
    for (int j = 0; j < rank; ++j) c[j] = n(rng) * (rank - j);
    out.push_back(window_from_flat(offset + basis * c));
  }
  return out;
}

Eigen::MatrixXd flat_matrix(const std::vector<FeatureWindow>& ws) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(ws.size()), kFlat);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = flatten_frames(ws[i].future).transpose();
  }
  return m;
}

double mean_sq_reconstruction(const PcaCodec& codec, const std::vector<FeatureWindow>& ws) {
  double total = 0;
  for (const auto& w : ws) {
    const Eigen::VectorXd x = flatten_frames(w.future);
    total += (codec.decode_flat(codec.encode_flat(x)) - x).squaredNorm();
  }
  return total / static_cast<double>(ws.size());
}

}  // namespace

TEST_CASE("full-dimension codec is the identity on training windows") {
  std::mt19937_64 rng(1);
  const auto ws = low_rank_windows(rng, kFlat, 80);
  const PcaCodec codec = PcaCodec::fit(ws, kFlat);
  for (const auto& w : ws) {
    const auto back = codec.decode(w.history, codec.encode(w.history, w.future));
    REQUIRE(back.size() == w.future.size());
    CHECK((flatten_frames(back) - flatten_frames(w.future)).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("identical windows give equal latents and decode to the window") {
  std::mt19937_64 rng(2);
  const auto one = low_rank_windows(rng, 1, 1)[0];
  const std::vector<FeatureWindow> ws(10, one);
  const PcaCodec codec = PcaCodec::fit(ws, 4);
  const Latent z0 = codec.encode(one.history, one.future);
  for (const auto& w : ws) CHECK(codec.encode(w.history, w.future) == z0);
  CHECK((flatten_frames(codec.decode(one.history, z0)) - flatten_frames(one.future))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);
}

TEST_CASE("low-rank data: exact at the rank, spectral residual below it") {
  std::mt19937_64 rng(3);
  constexpr int r = 6;
  const auto ws = low_rank_windows(rng, r, 60);
  const PcaCodec exact = PcaCodec::fit(ws, r);
  for (const auto& w : ws) {
    const Eigen::VectorXd x = flatten_frames(w.future);
    CHECK((exact.decode_flat(exact.encode_flat(x)) - x).cwiseAbs().maxCoeff() <= 1e-9);
  }

  // Independent eigensolver on the same 1/N covariance.
  const Eigen::MatrixXd data = flat_matrix(ws);
  const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(ws.size());
  const Eigen::VectorXd eig = testing::oracle_jacobi_eigenvalues(cov);
  CHECK(eig[r - 1] > 1e-6);
  CHECK(std::abs(eig[r]) <= 1e-9 * eig[0]);

  // With r - 1 components the mean squared reconstruction error is the
  // dropped eigenvalue.
  const PcaCodec short_codec = [&] {
    // Fitting below the rank is refused; build the r - 1 codec from the
    // exact one by dropping its last direction through the container.
    BinaryContainer c = exact.to_container();
    c.matrices["basis"] = Eigen::MatrixXd(exact.basis().leftCols(r - 1));
    return PcaCodec::from_container(c);
  }();
  CHECK(mean_sq_reconstruction(short_codec, ws) == doctest::Approx(eig[r - 1]).epsilon(1e-9));
  for (int i = 0; i < r; ++i) {
    CHECK(exact.spectrum()[i] == doctest::Approx(eig[i]).epsilon(1e-9));
  }
}

TEST_CASE("fitting below the data rank reports the achievable rank") {
  std::mt19937_64 rng(4);
  const auto ws = low_rank_windows(rng, 5, 40);
  try {
    PcaCodec::fit(ws, 8);
    FAIL("expected rank error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kRankDeficient);
    CHECK(std::string(e.what()).find("achievable rank is 5") != std::string::npos);
  }
}

TEST_CASE("reconstruction error is non-increasing in latent size") {
  std::mt19937_64 rng(5);
  const auto ws = low_rank_windows(rng, kFlat, 120);
  double prev = std::numeric_limits<double>::infinity();
  for (int d = 1; d <= kFlat; d += 4) {
    const double err = mean_sq_reconstruction(PcaCodec::fit(ws, d), ws);
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
}

TEST_CASE("latents are uncorrelated on the fitting set") {
  std::mt19937_64 rng(6);
  const auto ws = low_rank_windows(rng, 10, 200);
  const PcaCodec codec = PcaCodec::fit(ws, 10);
  Eigen::MatrixXd z(static_cast<Eigen::Index>(ws.size()), 10);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    z.row(static_cast<Eigen::Index>(i)) = codec.encode(ws[i].history, ws[i].future).transpose();
  }
  const Eigen::MatrixXd zc = z.rowwise() - z.colwise().mean();
  const Eigen::MatrixXd cov = zc.transpose() * zc / static_cast<double>(ws.size());
  const double scale = codec.spectrum()[0];
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      if (i != j) CHECK(std::abs(cov(i, j)) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("argument checks") {
  std::mt19937_64 rng(7);
  const auto ws = low_rank_windows(rng, 3, 4);
  CHECK_THROWS_AS(PcaCodec::fit(ws, 4), Error);  // needs 5 windows
  CHECK_THROWS_AS(PcaCodec::fit(ws, 0), Error);
  const auto many = low_rank_windows(rng, kFlat, 60);
  CHECK_THROWS_AS(PcaCodec::fit(many, kFlat + 1), Error);
  const PcaCodec codec = PcaCodec::fit(many, 3);
  CHECK_THROWS_AS(codec.decode_flat(Latent::Zero(4)), Error);
  CHECK_THROWS_AS(codec.encode_flat(Eigen::VectorXd::Zero(kFlat - 1)), Error);
}

TEST_CASE("codec save and load round trip") {
  std::mt19937_64 rng(8);
  const auto ws = low_rank_windows(rng, 8, 30);
  const PcaCodec codec = PcaCodec::fit(ws, 8);
  const auto path = std::filesystem::temp_directory_path() / "motionstream_codec_test.bin";
  codec.save(path);
  const PcaCodec back = PcaCodec::load(path);
  std::filesystem::remove(path);
  CHECK(back.mean() == codec.mean());
  CHECK(back.basis() == codec.basis());
  CHECK(back.future_frames() == kFuture);
  CHECK(back.encode(ws[0].history, ws[0].future) == codec.encode(ws[0].history, ws[0].future));
}
