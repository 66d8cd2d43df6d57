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

// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// value, the tolerance and the runtime. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "motionstream/codec.hpp"
#include "motionstream/corpus.hpp"
#include "motionstream/diffusion.hpp"
#include "motionstream/error.hpp"
#include "motionstream/generator.hpp"
#include "motionstream/metrics.hpp"
#include "motionstream/motion_buffer.hpp"
#include "motionstream/retrieval.hpp"
#include "motionstream/rollout.hpp"
#include "motionstream/rotation.hpp"
#include "motionstream/server.hpp"
#include "motionstream/text.hpp"
#include "motionstream/wire.hpp"
#include "test_support.hpp"

using namespace motionstream;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---- Motion representation ------------------------------------------------

Outcome round_trip() {
  std::mt19937_64 rng(2024);
  double worst_pos = 0.0, worst_joint = 0.0;
  int motions = 0;
  for (const int n_q : {29, 5}) {
    for (int i = 0; i < 1000; ++i) {
      const RawMotion m = testing::random_smooth_motion(rng, n_q, 60, 1.39);
      const EncodedMotion enc = encode_features(m);
      const RawMotion back = decode_features(enc.features, enc.init);
      for (std::size_t t = 0; t < back.size(); ++t) {
        worst_pos = std::max(worst_pos, (back[t].p - m[t].p).cwiseAbs().maxCoeff());
        worst_joint = std::max(worst_joint, (back[t].q - m[t].q).cwiseAbs().maxCoeff());
      }
      ++motions;
    }
  }
  return {worst_pos <= 1e-9 && worst_joint <= 1e-9,
          std::to_string(motions) + " motions, max position error " + fmt(worst_pos) +
              " m, max joint error " + fmt(worst_joint) + " rad (limit 1e-9)"};
}

Outcome invariance() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const RawMotion m = testing::random_smooth_motion(rng, 29, 120);
  const Eigen::MatrixXd base = features_to_matrix(encode_features(m).features);
  int identical = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const RawMotion moved =
        testing::yaw_translate(m, std::numbers::pi * u(rng), 10 * u(rng), 10 * u(rng));
    const Eigen::MatrixXd f = features_to_matrix(encode_features(moved).features);
    const double diff = (f - base).cwiseAbs().maxCoeff();
    worst = std::max(worst, diff);
    identical += diff == 0.0 ? 1 : 0;
  }
  return {identical == 100, std::to_string(identical) + "/100 transforms bitwise identical, max |diff| " +
                                fmt(worst)};
}

Outcome feature_dimension() {
  constexpr int kExpectedG1FeatureDim = 69;
  const int d = feature_dim(29, 2);
  return {d == kExpectedG1FeatureDim,
          "feature_dim(29, 2) = " + std::to_string(d) + ", expected " +
              std::to_string(kExpectedG1FeatureDim)};
}

// ---- Diffusion ----------------------------------------------------------------

// Output distribution of the sampler with the linear-Gaussian denoiser.
// Per dimension every reverse step is affine in z plus Gaussian noise, so
// the mean and variance propagate exactly from z_K ~ N(0, 1).
void sampler_output_moments(const NoiseSchedule& sc, double mu, double var, double* mean,
                            double* variance) {
  double m = 0.0, v = 1.0;
  for (int k = sc.steps(); k >= 1; --k) {
    const double a = sc.alpha_bar_at(k), al = sc.alpha_at(k), b = sc.beta_at(k);
    // z0_hat = c z + d
    const double c = std::sqrt(a) * var / (a * var + 1.0 - a);
    const double d = (1.0 - a) * mu / (a * var + 1.0 - a);
    // eps = (z - sqrt(a) z0_hat) / sqrt(1 - a) = e1 z + e0
    const double e1 = (1.0 - std::sqrt(a) * c) / std::sqrt(1.0 - a);
    const double e0 = -std::sqrt(a) * d / std::sqrt(1.0 - a);
    // next = (z - (1 - al) / sqrt(1 - a) eps) / sqrt(al)
    const double g = (1.0 - al) / std::sqrt(1.0 - a);
    const double slope = (1.0 - g * e1) / std::sqrt(al);
    const double offset = -g * e0 / std::sqrt(al);
    m = slope * m + offset;
    v = slope * slope * v + (k > 1 ? b : 0.0);
  }
  *mean = m;
  *variance = v;
}

Outcome ddpm_oracle() {
  constexpr int d = 8, n = 10000;
  const NoiseSchedule sc = cosine_schedule(kDefaultDiffusionSteps);
  Latent mu(d);
  Eigen::VectorXd var(d);
  for (int i = 0; i < d; ++i) {
    mu[i] = -1.5 + 0.4 * i;
    var[i] = 0.3 + 0.35 * i;
  }
  const LinearGaussianDenoiser den(mu, var, sc);
  std::mt19937_64 rng(99);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(d), sum2 = Eigen::VectorXd::Zero(d);
  for (int i = 0; i < n; ++i) {
    const Latent z = ddpm_sample(den, {}, nullptr, sc, d, rng);
    sum += z;
    sum2 += z.cwiseProduct(z);
  }
  const Eigen::VectorXd mean = sum / n;
  const Eigen::VectorXd cov = sum2 / n - mean.cwiseProduct(mean);
  double worst_mean = 0.0, worst_cov = 0.0, prior_gap = 0.0;
  for (int i = 0; i < d; ++i) {
    double am = 0, av = 0;
    sampler_output_moments(sc, mu[i], var[i], &am, &av);
    worst_mean = std::max(worst_mean, std::abs(mean[i] - am) / std::sqrt(var[i]));
    worst_cov = std::max(worst_cov, std::abs(cov[i] - av) / av);
    prior_gap = std::max(prior_gap, std::abs(av - var[i]) / var[i]);
  }
  const double mean_tol = 4.0 / std::sqrt(static_cast<double>(n));
  return {worst_mean <= mean_tol && worst_cov <= 0.05,
          "mean error " + fmt(worst_mean) + " prior-sd (limit " + fmt(mean_tol) +
              "), variance error " + fmt(100 * worst_cov) + "% (limit 5%); analytic output variance differs from the prior by up to " +
              fmt(100 * prior_gap) + "%"};
}

class FixedDenoiser final : public Denoiser {
 public:
  FixedDenoiser(Latent cond, Latent uncond) : cond_(std::move(cond)), uncond_(std::move(uncond)) {}
  Latent predict(const Latent&, int, std::span<const MotionFeatureFrame>,
                 const TextEmbedding* text) const override {
    return text ? cond_ : uncond_;
  }

 private:
  Latent cond_, uncond_;
};

Outcome cfg_identities() {
  std::mt19937_64 rng(5);
  bool ok = true;
  double worst = 0.0;
  const TextEmbedding e = TextEmbedding::from_vector(Eigen::VectorXd::Ones(4));
  for (int trial = 0; trial < 100; ++trial) {
    const Latent c = standard_normal(16, rng), u = standard_normal(16, rng);
    const Latent z = standard_normal(16, rng);
    const FixedDenoiser den(c, u);
    ok &= cfg_predict(den, z, 1, {}, e, 1.0) == c;
    ok &= cfg_predict(den, z, 1, {}, e, 0.0) == u;
    for (const double s : {0.0, 1.0, 5.0}) {
      const Latent expected = (1.0 - s) * u + s * c;
      worst = std::max(worst, (cfg_predict(den, z, 1, {}, e, s) - expected).cwiseAbs().maxCoeff());
    }
  }
  return {ok && worst <= 1e-12, std::string(ok ? "exact" : "NOT exact") +
                                    " at scale 1 and 0; affine error " + fmt(worst) +
                                    " (limit 1e-12)"};
}

Outcome eps_consistency() {
  const NoiseSchedule sc = cosine_schedule(kDefaultDiffusionSteps);
  std::mt19937_64 rng(6);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(sc.steps()));
    const Latent z0 = 2.0 * standard_normal(16, rng);
    const Latent eps = standard_normal(16, rng);
    const Latent zk = add_noise(z0, k, sc, eps);
    worst = std::max(worst, (predicted_noise(zk, z0, k, sc) - eps).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-9, "max |eps_hat - eps| " + fmt(worst) + " over 1000 draws (limit 1e-9)"};
}

// ---- Metrics ----------------------------------------------------------------------

Outcome metric_oracles() {
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) failed.push_back(what);
  };
  std::mt19937_64 rng(3);
  Eigen::MatrixXd a(50, 4);
  for (Eigen::Index i = 0; i < a.rows(); ++i) a.row(i) = standard_normal(4, rng).transpose();
  const FeatureStats sa = FeatureStats::from_samples(a);
  expect(std::abs(fid(sa, sa)) <= 1e-9, "fid(a, a)");
  FeatureStats g{Eigen::VectorXd::Constant(1, 1.0), Eigen::MatrixXd::Constant(1, 1, 4.0), 1};
  FeatureStats r{Eigen::VectorXd::Constant(1, 0.0), Eigen::MatrixXd::Constant(1, 1, 1.0), 1};
  expect(fid(g, r) == 2.0, "1-D FID");

  const SkeletonSpec g1 = default_g1_skeleton();
  const RawMotion ref_motion = testing::random_smooth_motion(rng, 29, 30);
  RawMotion shifted = ref_motion;
  for (auto& f : shifted) f.p.x() += 0.01;
  const TrajectoryPair pair{body_trajectory(g1, shifted), body_trajectory(g1, ref_motion)};
  const TrackingMetrics t = tracking_metrics(pair);
  expect(std::abs(t.g_mpjpe - 10.0) <= 1e-9, "g-MPJPE of a 10 mm shift");
  expect(t.mpjpe <= 1e-9 && t.e_vel <= 1e-9 && t.e_acc <= 1e-9, "relative metrics of a shift");

  // Succ: one of 14 links off by 0.31 m at one frame succeeds; all links fail.
  std::vector<BodyPose> base(5);
  for (auto& p : base) {
    p.link_positions.assign(15, Vec3::Zero());
    p.link_orientations.assign(15, Quat::Identity());
  }
  TrajectoryPair one{base, base}, all{base, base};
  one.policy[2].link_positions[7].x() += 0.31;
  for (int l = 1; l < 15; ++l) all.policy[2].link_positions[static_cast<std::size_t>(l)].x() += 0.31;
  expect(success_rate(std::span(&one, 1), 0.3) == 1.0, "Succ single-link offset");
  expect(success_rate(std::span(&all, 1), 0.3) == 0.0, "Succ all-link offset");

  Eigen::MatrixXd cubic(1, 12);
  for (int i = 0; i < 12; ++i) cubic(0, i) = static_cast<double>(i * i * i);
  expect(std::abs(peak_jerk(cubic) - 6.0) <= 1e-9, "cubic PJ");

  if (failed.empty()) return {true, "fid(a,a), 1-D FID = 2, shift g-MPJPE = 10 mm, Succ cases, cubic PJ = 6"};
  std::string msg = "failed:";
  for (const auto& f : failed) msg += " [" + f + "]";
  return {false, msg};
}

// ---- Streaming ------------------------------------------------------------------------

Outcome rate_invariant() {
  BufferSimConfig cfg;
  cfg.duration_s = 60.0;
  const BufferSimResult r = simulate_buffer(cfg, [](long long step) {
    std::vector<StreamFrame> block(static_cast<std::size_t>(kFutureFrames));
    for (int i = 0; i < kFutureFrames; ++i) {
      block[static_cast<std::size_t>(i)].motion_index = step * kFutureFrames + i;
    }
    return block;
  });
  return {r.frames_emitted == 3000 && r.generator_steps == 375 && r.underruns == 0,
          std::to_string(r.frames_emitted) + " frames, " + std::to_string(r.generator_steps) +
              " steps, " + std::to_string(r.underruns) + " underruns (want 3000, 375, 0)"};
}

Outcome text_streams() {
  std::mt19937_64 rng(12);
  double lo = 1e9, hi = 0.0;
  bool padded = true;
  for (int i = 0; i < 1000; ++i) {
    const TextStream s = build_random_text_stream(synthetic_labels(), rng);
    lo = std::min(lo, s.duration);
    hi = std::max(hi, s.duration);
    const auto& first = s.spans.front();
    const auto& last = s.spans.back();
    padded &= first.text == kIdleCommand && first.t_start == 0.0 &&
              first.t_end == kStandPaddingSeconds && last.text == kIdleCommand &&
              last.t_end - last.t_start == kStandPaddingSeconds && last.t_end == s.duration;
  }
  return {padded && lo >= 22.0 && hi <= 54.0,
          "durations in [" + fmt(lo) + ", " + fmt(hi) + "] s (allowed [22, 54]), stand padding " +
              (padded ? "present" : "MISSING")};
}

struct Pipeline {
  SkeletonSpec skeleton = default_g1_skeleton();
  SyntheticCorpus corpus;
  std::shared_ptr<PcaCodec> codec;
  std::shared_ptr<RetrievalIndex> index;
  std::shared_ptr<LatentDiffusionGenerator> generator;
};

Pipeline build_pipeline() {
  Pipeline p;
  p.corpus = generate_synthetic_corpus(SyntheticCorpusSpec{}, p.skeleton);
  const TrainingWindows w = corpus_windows(p.corpus, 2);
  p.codec = std::make_shared<PcaCodec>(PcaCodec::fit(w.windows, 16));
  auto embedder = std::make_shared<HashedTextEmbedder>();
  p.index = std::make_shared<RetrievalIndex>(
      build_retrieval_index(w.windows, w.texts, *p.codec, *embedder));
  auto denoiser = std::make_shared<RetrievalDenoiser>(*p.index);
  p.generator = std::make_shared<LatentDiffusionGenerator>(
      p.codec, denoiser, cosine_schedule(kDefaultDiffusionSteps), embedder, SamplerOptions{});
  return p;
}

Outcome end_to_end(const Pipeline& p) {
  const OracleEmbedder oracle(p.corpus.labels, p.skeleton);
  const int templates = static_cast<int>(p.corpus.labels.size());
  Eigen::MatrixXd motion(templates, oracle.dim()), text(templates, oracle.dim());
  for (int i = 0; i < templates; ++i) {
    const std::string& label = p.corpus.labels[static_cast<std::size_t>(i)];
    const RawMotion tmpl = synthetic_template(label, p.skeleton, 200);
    motion.row(i) = oracle.embed_motion(encode_features(tmpl).features).transpose();
    text.row(i) = oracle.embed_text(label).transpose();
  }
  const double r1 = r_precision(motion, text, 1);

  std::mt19937_64 rng(1);
  RolloutState state = init_rollout(stand_pose(p.skeleton));
  int post = 0, matched = 0;
  for (int step = 0; step < 80; ++step) {
    const std::string command = step < 20 ? "stand" : step < 50 ? "wave left hand" : "walk";
    const RolloutBlock b = rollout_step(state, *p.generator, command, rng);
    if (step < 20) continue;
    ++post;
    matched += p.index->nearest_label(flatten_frames(b.features)) == command ? 1 : 0;
  }
  const double rate = static_cast<double>(matched) / post;
  return {rate >= 0.9 && r1 == 1.0, std::to_string(matched) + "/" + std::to_string(post) +
                                        " post-switch blocks match (" + fmt(100 * rate) +
                                        "%, need 90%); oracle R@1 on templates " + fmt(r1)};
}

Outcome online_offline(const Pipeline& p) {
  ServerConfig cfg;
  cfg.port = 0;
  cfg.seed = 31;
  StreamServer server(cfg, p.skeleton, p.generator, stand_pose(p.skeleton));
  server.start();
  std::vector<FrameMessage> frames;
  {
    LineClient client("127.0.0.1", server.port());
    client.read_line();  // hello
    auto collect = [&](int n) {
      while (n > 0) {
        const std::string line = client.read_line();
        if (message_type(line) != "frame") continue;
        frames.push_back(parse_frame_message(line));
        --n;
      }
    };
    collect(30);
    client.send_line(R"({"type":"command","text":"wave left hand"})");
    collect(60);
    client.send_line(R"({"type":"command","text":"walk"})");
    collect(60);
    server.stop();
    try {
      while (true) {
        const std::string line = client.read_line(std::chrono::milliseconds(500));
        if (message_type(line) == "frame") frames.push_back(parse_frame_message(line));
      }
    } catch (const Error&) {
    }
  }
  const SessionReplayInput in = replay_input_from_log(server.session_log());
  std::mt19937_64 rng(in.seed);
  const SessionResult offline =
      replay_session(in.step_commands, *p.generator, rng, stand_pose(p.skeleton));
  int compared = 0, mismatched = 0;
  bool commands_seen = false;
  for (const auto& f : frames) {
    if (f.held) continue;
    const auto i = static_cast<std::size_t>(f.frame.motion_index);
    if (i >= offline.frames.size()) {
      ++mismatched;
      continue;
    }
    const RawMotionFrame& o = offline.frames[i];
    const bool same = f.frame.frame.p == o.p && f.frame.frame.R.coeffs() == o.R.coeffs() &&
                      f.frame.frame.q == o.q && f.frame.frame.c == o.c &&
                      f.frame.command == offline.command_log[i];
    mismatched += same ? 0 : 1;
    commands_seen |= f.frame.command == "walk";
    ++compared;
  }
  return {compared > 0 && mismatched == 0 && commands_seen,
          std::to_string(compared) + " streamed frames compared over TCP, " +
              std::to_string(mismatched) + " differ bitwise; " +
              std::to_string(in.step_commands.size()) + " steps replayed" +
              (commands_seen ? "" : "; commands never latched")};
}

}  // namespace

int main() {
  int failures = 0;
  auto run = [&](const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(o, s);
  };
  auto report = [&](const char* name, const Outcome& o, double seconds, double limit_s) {
    const bool in_time = limit_s <= 0.0 || seconds < limit_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::string timing = fmt(seconds) + " s";
    if (limit_s > 0.0) timing += " (limit " + fmt(limit_s) + " s)";
    std::printf("%s  %-28s %s; %s\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  };
  auto check = [&](const char* name, const std::function<Outcome()>& fn, double limit_s = 0.0) {
    const auto [o, s] = run(fn);
    report(name, o, s, limit_s);
  };

  check("round-trip", round_trip, 30.0);
  check("invariance", invariance);
  check("feature-dimension", feature_dimension);
  check("ddpm-sampler-oracle", ddpm_oracle, 60.0);
  check("cfg-identities", cfg_identities);
  check("eps-consistency", eps_consistency);
  check("metric-oracles", metric_oracles);
  check("rate-invariant", rate_invariant);
  check("text-stream-builder", text_streams);

  // The pipeline build counts toward the end-to-end runtime.
  const auto t0 = std::chrono::steady_clock::now();
  Pipeline pipeline;
  Outcome e2e;
  try {
    pipeline = build_pipeline();
    e2e = end_to_end(pipeline);
  } catch (const std::exception& e) {
    e2e = {false, std::string("error: ") + e.what()};
  }
  report("end-to-end-semantic", e2e,
         std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 120.0);
  check("online-offline-equivalence", [&] { return online_offline(pipeline); });

  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
