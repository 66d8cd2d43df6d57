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

#include <json.hpp>

#include "motionstream/error.hpp"
#include "motionstream/evaluation.hpp"
#include "test_support.hpp"

using namespace motionstream;
using nlohmann::json;

namespace {

SyntheticCorpus small_corpus(std::uint64_t seed, bool transitions) {
  SyntheticCorpusSpec spec;
  spec.labels = {"stand", "walk", "punch"};
  spec.clips_per_label = 2;
  spec.transitions = transitions;
  spec.seed = seed;
  return generate_synthetic_corpus(spec, default_g1_skeleton());
}

std::filesystem::path temp_dir(const char* name) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("corpus directory round trip") {
  const SkeletonSpec g1 = default_g1_skeleton();
  const SyntheticCorpus corpus = small_corpus(3, true);
  const auto dir = temp_dir("motionstream_corpus_rt");
  save_corpus(corpus, dir);
  const SyntheticCorpus back = load_corpus(dir, &g1);
  CHECK(back.labels == corpus.labels);
  REQUIRE(back.clips.size() == corpus.clips.size());
  for (std::size_t i = 0; i < corpus.clips.size(); ++i) {
    CHECK(serialize_clip(back.clips[i].clip) == serialize_clip(corpus.clips[i].clip));
    CHECK(format_spans(back.clips[i].spans) == format_spans(corpus.clips[i].spans));
  }
  // Labels fall back to span texts in order of first appearance.
  std::filesystem::remove(dir / "labels.txt");
  CHECK(load_corpus(dir).labels == corpus.labels);
  std::filesystem::remove(dir / "clip_0000.spans");
  try {
    load_corpus(dir);
    FAIL("expected a missing-annotation error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
  std::filesystem::remove_all(dir);
  CHECK_THROWS_AS(load_corpus(dir), Error);
}

TEST_CASE("tracking report: identical clips are perfect, a shifted clip costs 10 mm") {
  const SkeletonSpec g1 = default_g1_skeleton();
  const SyntheticCorpus corpus = small_corpus(4, false);
  std::vector<MotionClip> ref;
  for (const auto& c : corpus.clips) ref.push_back(c.clip);
  const TrackingReport same = evaluate_tracking(ref, ref, g1);
  CHECK(same.pairs == static_cast<long long>(ref.size()));
  CHECK(same.mean.g_mpjpe == 0.0);
  CHECK(same.mean.mpjpe == 0.0);
  CHECK(same.mean.e_vel == 0.0);
  CHECK(same.mean.e_acc == 0.0);
  CHECK(same.success_rate == 1.0);
  const auto j = json::parse(tracking_report_json(same));
  CHECK(j["schema"] == "motionstream.tracking_report/1");
  CHECK(j["g_mpjpe_mm"] == 0.0);

  auto shifted = ref;
  for (auto& c : shifted) {
    for (auto& f : c.frames) f.p.x() += 0.01;
  }
  const TrackingReport s = evaluate_tracking(shifted, ref, g1);
  CHECK(s.mean.g_mpjpe == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(s.mean.mpjpe < 1e-9);
  CHECK(s.success_rate == 1.0);

  auto shorter = ref;
  shorter[0].frames.pop_back();
  CHECK_THROWS_AS(evaluate_tracking(shorter, ref, g1), Error);
  CHECK_THROWS_AS(evaluate_tracking({}, {}, g1), Error);
}

TEST_CASE("generation report of a corpus against itself") {
  const SkeletonSpec g1 = default_g1_skeleton();
  const SyntheticCorpus corpus = small_corpus(5, true);
  const OracleEmbedder oracle(corpus.labels, g1);
  const GenerationReport r = evaluate_generation(corpus, corpus, oracle, 1);
  const EmbeddingMetrics& m = r.embedding;
  CHECK(m.real_count == m.generated_count);
  CHECK(std::abs(m.fid) < 1e-9);
  REQUIRE(m.r_precision.size() == 3);
  CHECK(m.r_precision[0] <= m.r_precision[1]);
  CHECK(m.r_precision[1] <= m.r_precision[2]);
  // The oracle puts each clean segment on its label's basis vector.
  CHECK(m.mm_dist < 0.5);
  // Each transition clip has one interior boundary far from both ends.
  CHECK(r.jerk.transitions == 6);
  CHECK(r.jerk.j_avg > 0.0);
  CHECK(r.jerk.peak_jerk > 0.0);
  const auto j = json::parse(generation_report_json(r));
  CHECK(j["schema"] == "motionstream.generation_report/1");
  CHECK(j["r_precision"].size() == 3);
  CHECK(j["transitions"] == 6);
}

TEST_CASE("embedding metrics: small sets and shape errors") {
  Eigen::MatrixXd real(3, 2), gen(3, 2);
  real << 0, 0, 1, 0, 0, 1;
  gen = real;
  const EmbeddingMetrics m = evaluate_embeddings(real, gen, gen, 0);
  CHECK(m.r_precision_batch == 3);
  CHECK(m.r_precision[0] == 1.0);
  CHECK(m.mm_dist == 0.0);
  CHECK(std::abs(m.fid) < 1e-12);
  const EmbeddingMetrics one = evaluate_embeddings(real, gen.topRows(1), gen.topRows(1), 0);
  CHECK_FALSE(one.diversity_generated.has_value());
  CHECK(json::parse(embedding_report_json(one))["diversity_generated"].is_null());
  CHECK_THROWS_AS(evaluate_embeddings(real, gen, gen.topRows(2), 0), Error);
  CHECK_THROWS_AS(evaluate_embeddings(real, Eigen::MatrixXd::Zero(3, 3), Eigen::MatrixXd::Zero(3, 3), 0),
                  Error);
}
