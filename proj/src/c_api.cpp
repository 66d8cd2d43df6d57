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

#include "motionstream/motionstream.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <random>
#include <string>

#include <json.hpp>

#include "motionstream/codec.hpp"
#include "motionstream/container.hpp"
#include "motionstream/corpus.hpp"
#include "motionstream/error.hpp"
#include "motionstream/evaluation.hpp"
#include "motionstream/generator.hpp"
#include "motionstream/retrieval.hpp"
#include "motionstream/rollout.hpp"
#include "motionstream/server.hpp"
#include "motionstream/text.hpp"
#include "motionstream/wire.hpp"

namespace ms = motionstream;

struct ms_skeleton {
  ms::SkeletonSpec spec;
};

struct ms_clip {
  ms::MotionClip clip;
  int n_q = 0;
};

struct ms_codec {
  std::shared_ptr<const ms::PcaCodec> codec;
};

struct ms_index {
  std::shared_ptr<const ms::RetrievalIndex> index;
};

struct ms_generator {
  std::shared_ptr<const ms::MotionGenerator> generator;
};

struct ms_server {
  std::shared_ptr<const ms::MotionGenerator> generator;
  std::unique_ptr<ms::StreamServer> server;
};

namespace {

thread_local ms_status t_last_code = MS_OK;
thread_local std::string t_last_message;

ms_status record(ms_status code, const char* message) {
  t_last_code = code;
  t_last_message = message;
  return code;
}

// Runs `fn`, translating exceptions into a status and the thread's error.
template <typename Fn>
ms_status guarded(Fn&& fn) {
  try {
    fn();
    return MS_OK;
  } catch (const ms::Error& e) {
    return record(static_cast<ms_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(MS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(MS_ERR_INTERNAL, e.what());
  }
}

void need(const void* p, const char* name) {
  ms::require(p != nullptr, ms::ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ms::Quat read_quat(const double* q) { return ms::Quat(q[0], q[1], q[2], q[3]); }

void write_quat(const ms::Quat& q, double* out) {
  out[0] = q.w();
  out[1] = q.x();
  out[2] = q.y();
  out[3] = q.z();
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::uint64_t parse_hash_hex(const std::string& s) {
  ms::require(s.size() == 16 && s.find_first_not_of("0123456789abcdef") == std::string::npos,
              ms::ErrorCode::kFormat, "feature file has a malformed skeleton hash");
  return std::stoull(s, nullptr, 16);
}

ms_clip* wrap_clip(ms::MotionClip clip, int n_q) {
  auto* out = new ms_clip;
  out->clip = std::move(clip);
  out->n_q = n_q;
  return out;
}

int clip_dofs(const ms::MotionClip& clip) {
  return clip.frames.empty() ? 0 : static_cast<int>(clip.frames[0].q.size());
}

// Retrieval denoiser that shares ownership of its index.
class OwningRetrievalDenoiser final : public ms::Denoiser {
 public:
  OwningRetrievalDenoiser(std::shared_ptr<const ms::RetrievalIndex> index, double w_h, double w_e)
      : index_(std::move(index)), inner_(*index_, w_h, w_e) {}
  ms::Latent predict(const ms::Latent& z_k, int k, std::span<const ms::MotionFeatureFrame> history,
                     const ms::TextEmbedding* text) const override {
    return inner_.predict(z_k, k, history, text);
  }

 private:
  std::shared_ptr<const ms::RetrievalIndex> index_;
  ms::RetrievalDenoiser inner_;
};

std::string spans_from_commands(const std::vector<std::string>& per_frame, double rate) {
  std::vector<ms::AnnotationSpan> spans;
  for (std::size_t t = 0; t < per_frame.size(); ++t) {
    if (spans.empty() || spans.back().text != per_frame[t]) {
      spans.push_back({static_cast<double>(t) / rate, 0.0, per_frame[t]});
    }
    spans.back().t_end = static_cast<double>(t + 1) / rate;
  }
  return ms::format_spans(spans);
}

}  // namespace

extern "C" {

const char* ms_version(void) { return "0.1.0"; }

const char* ms_status_name(ms_status status) {
  return ms::error_code_name(static_cast<ms::ErrorCode>(status));
}

ms_status ms_last_error_code(void) { return t_last_code; }

const char* ms_last_error_message(void) { return t_last_message.c_str(); }

void ms_string_free(char* s) { std::free(s); }

// ---- Skeletons -------------------------------------------------------------

ms_status ms_skeleton_builtin(const char* name, ms_skeleton** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    const std::string n = name;
    ms::SkeletonSpec spec;
    if (n == "g1") spec = ms::default_g1_skeleton();
    else if (n == "test5") spec = ms::test_skeleton_5dof();
    else ms::fail(ms::ErrorCode::kNotFound, "unknown built-in skeleton '" + n + "' (g1, test5)");
    *out = new ms_skeleton{std::move(spec)};
  });
}

ms_status ms_skeleton_load(const char* path, ms_skeleton** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ms_skeleton{ms::load_skeleton(path)};
  });
}

ms_status ms_skeleton_save(const ms_skeleton* skeleton, const char* path) {
  return guarded([&] {
    need(skeleton, "skeleton");
    need(path, "path");
    ms::save_skeleton(skeleton->spec, path);
  });
}

void ms_skeleton_free(ms_skeleton* skeleton) { delete skeleton; }

int ms_skeleton_num_dofs(const ms_skeleton* skeleton) {
  return skeleton ? skeleton->spec.num_dofs() : 0;
}

uint64_t ms_skeleton_hash(const ms_skeleton* skeleton) {
  return skeleton ? skeleton->spec.hash() : 0;
}

ms_status ms_skeleton_fk(const ms_skeleton* skeleton, const double root_position[3],
                         const double root_quaternion[4], const double* q,
                         double* link_positions, double* link_quaternions) {
  return guarded([&] {
    need(skeleton, "skeleton");
    need(root_position, "root_position");
    need(root_quaternion, "root_quaternion");
    need(link_positions, "link_positions");
    need(link_quaternions, "link_quaternions");
    const int n = skeleton->spec.num_dofs();
    if (n > 0) need(q, "q");
    const ms::BodyPose pose = ms::forward_kinematics(
        skeleton->spec, ms::Vec3(root_position[0], root_position[1], root_position[2]),
        read_quat(root_quaternion), Eigen::Map<const Eigen::VectorXd>(q, n));
    for (std::size_t l = 0; l < pose.link_positions.size(); ++l) {
      for (int i = 0; i < 3; ++i) link_positions[3 * l + i] = pose.link_positions[l][i];
      write_quat(pose.link_orientations[l], link_quaternions + 4 * l);
    }
  });
}

ms_status ms_fk_vectors_json(const ms_skeleton* skeleton, int count, uint64_t seed,
                             char** out_json) {
  return guarded([&] {
    need(skeleton, "skeleton");
    need(out_json, "out_json");
    *out_json = copy_string(ms::export_fk_vectors(skeleton->spec, count, seed));
  });
}

// ---- Clips -------------------------------------------------------------------

ms_status ms_clip_create(const ms_skeleton* skeleton, double frame_rate, ms_clip** out) {
  return guarded([&] {
    need(skeleton, "skeleton");
    need(out, "out");
    ms::require(frame_rate > 0.0, ms::ErrorCode::kInvalidArgument, "frame rate must be positive");
    ms::MotionClip clip;
    clip.skeleton_hash = skeleton->spec.hash();
    clip.frame_rate = frame_rate;
    *out = wrap_clip(std::move(clip), skeleton->spec.num_dofs());
  });
}

ms_status ms_clip_load(const char* path, const ms_skeleton* skeleton, ms_clip** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    ms::MotionClip clip = ms::load_clip(path, skeleton ? &skeleton->spec : nullptr);
    const int n_q = skeleton ? skeleton->spec.num_dofs() : clip_dofs(clip);
    *out = wrap_clip(std::move(clip), n_q);
  });
}

ms_status ms_clip_save(const ms_clip* clip, const char* path) {
  return guarded([&] {
    need(clip, "clip");
    need(path, "path");
    ms::save_clip(clip->clip, path);
  });
}

void ms_clip_free(ms_clip* clip) { delete clip; }

size_t ms_clip_frame_count(const ms_clip* clip) { return clip ? clip->clip.frames.size() : 0; }

int ms_clip_num_dofs(const ms_clip* clip) { return clip ? clip->n_q : 0; }

double ms_clip_frame_rate(const ms_clip* clip) { return clip ? clip->clip.frame_rate : 0.0; }

ms_status ms_clip_append_frame(ms_clip* clip, const double root_position[3],
                               const double root_quaternion[4], const double* q,
                               const uint8_t contacts[2]) {
  return guarded([&] {
    need(clip, "clip");
    need(root_position, "root_position");
    need(root_quaternion, "root_quaternion");
    need(contacts, "contacts");
    if (clip->n_q > 0) need(q, "q");
    ms::RawMotionFrame f;
    f.p = ms::Vec3(root_position[0], root_position[1], root_position[2]);
    f.R = read_quat(root_quaternion);
    f.q = Eigen::Map<const Eigen::VectorXd>(q, clip->n_q);
    f.c = {contacts[0], contacts[1]};
    clip->clip.frames.push_back(std::move(f));
  });
}

ms_status ms_clip_get_frame(const ms_clip* clip, size_t index, double root_position[3],
                            double root_quaternion[4], double* q, uint8_t contacts[2]) {
  return guarded([&] {
    need(clip, "clip");
    ms::require(index < clip->clip.frames.size(), ms::ErrorCode::kInvalidArgument,
                "frame index " + std::to_string(index) + " out of range (" +
                    std::to_string(clip->clip.frames.size()) + " frames)");
    const ms::RawMotionFrame& f = clip->clip.frames[index];
    if (root_position) {
      for (int i = 0; i < 3; ++i) root_position[i] = f.p[i];
    }
    if (root_quaternion) write_quat(f.R, root_quaternion);
    if (q) Eigen::Map<Eigen::VectorXd>(q, f.q.size()) = f.q;
    if (contacts) {
      for (std::size_t i = 0; i < 2; ++i) contacts[i] = i < f.c.size() ? f.c[i] : 0;
    }
  });
}

ms_status ms_clip_validate(const ms_clip* clip, const ms_skeleton* skeleton, int* ok,
                           char** report_json) {
  return guarded([&] {
    need(clip, "clip");
    need(skeleton, "skeleton");
    const ms::ValidationReport r = ms::validate_clip(clip->clip, skeleton->spec);
    if (ok) *ok = r.ok() ? 1 : 0;
    if (report_json) {
      nlohmann::json j = {{"ok", r.ok()}, {"issues", nlohmann::json::array()}};
      for (const auto& issue : r.issues) {
        j["issues"].push_back({{"frame", issue.frame}, {"message", issue.message}});
      }
      *report_json =
          copy_string(j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
    }
  });
}

ms_status ms_clip_to_json(const ms_clip* clip, char** out_json) {
  return guarded([&] {
    need(clip, "clip");
    need(out_json, "out_json");
    *out_json = copy_string(ms::export_clip_json(clip->clip));
  });
}

// ---- Motion representation -----------------------------------------------------

ms_status ms_clip_encode(const ms_clip* clip, const char* features_path) {
  return guarded([&] {
    need(clip, "clip");
    need(features_path, "features_path");
    const ms::EncodedMotion enc = ms::encode_features(clip->clip.frames);
    ms::BinaryContainer c;
    c.kind = "motion_features";
    c.matrices["features"] = ms::features_to_matrix(enc.features);
    Eigen::MatrixXd init(1, 7);
    init << enc.init.p0.x(), enc.init.p0.y(), enc.init.p0.z(), enc.init.R0.w(), enc.init.R0.x(),
        enc.init.R0.y(), enc.init.R0.z();
    c.matrices["init"] = init;
    c.set_scalar("n_q", clip->n_q);
    c.set_scalar("n_c", ms::kNumContacts);
    c.set_scalar("frame_rate", clip->clip.frame_rate);
    c.strings["skeleton_hash"] = {hash_hex(clip->clip.skeleton_hash)};
    ms::save_container(c, features_path);
  });
}

ms_status ms_features_decode(const char* features_path, ms_clip** out) {
  return guarded([&] {
    need(features_path, "features_path");
    need(out, "out");
    const ms::BinaryContainer c = ms::load_container(features_path, "motion_features");
    const int n_q = static_cast<int>(c.scalar("n_q"));
    const int n_c = static_cast<int>(c.scalar("n_c"));
    const Eigen::MatrixXd& init = c.matrix("init");
    ms::require(init.rows() == 1 && init.cols() == 7, ms::ErrorCode::kFormat,
                "feature file init must be 1x7");
    const auto& hash = c.string_list("skeleton_hash");
    ms::require(hash.size() == 1, ms::ErrorCode::kFormat, "feature file needs one skeleton hash");
    const ms::InitialPose pose{ms::Vec3(init(0, 0), init(0, 1), init(0, 2)),
                               ms::Quat(init(0, 3), init(0, 4), init(0, 5), init(0, 6))};
    ms::MotionClip clip;
    clip.skeleton_hash = parse_hash_hex(hash[0]);
    clip.frame_rate = c.scalar("frame_rate");
    clip.frames = ms::decode_features(ms::matrix_to_features(c.matrix("features"), n_q, n_c), pose);
    *out = wrap_clip(std::move(clip), n_q);
  });
}

ms_status ms_clip_roundtrip(const ms_clip* clip, double* max_position_error_m,
                            double* max_joint_error_rad) {
  return guarded([&] {
    need(clip, "clip");
    const auto& frames = clip->clip.frames;
    const ms::EncodedMotion enc = ms::encode_features(frames);
    const ms::RawMotion back = ms::decode_features(enc.features, enc.init);
    double pos = 0.0, joint = 0.0;
    for (std::size_t t = 0; t < back.size(); ++t) {
      pos = std::max(pos, (back[t].p - frames[t].p).norm());
      if (back[t].q.size() > 0) {
        joint = std::max(joint, (back[t].q - frames[t].q).cwiseAbs().maxCoeff());
      }
    }
    if (max_position_error_m) *max_position_error_m = pos;
    if (max_joint_error_rad) *max_joint_error_rad = joint;
  });
}

// ---- Corpus ------------------------------------------------------------------------

ms_synth_options ms_synth_options_default(void) {
  const ms::SyntheticCorpusSpec d;
  return {d.clips_per_label, d.min_frames, d.max_frames, d.transitions ? 1 : 0, d.noise, d.seed};
}

ms_status ms_synth_corpus(const ms_skeleton* skeleton, const ms_synth_options* options,
                          const char* out_dir, size_t* clip_count) {
  return guarded([&] {
    need(skeleton, "skeleton");
    need(out_dir, "out_dir");
    const ms_synth_options o = options ? *options : ms_synth_options_default();
    ms::SyntheticCorpusSpec spec;
    spec.clips_per_label = o.clips_per_label;
    spec.min_frames = o.min_frames;
    spec.max_frames = o.max_frames;
    spec.transitions = o.transitions != 0;
    spec.noise = o.noise;
    spec.seed = o.seed;
    const ms::SyntheticCorpus corpus = ms::generate_synthetic_corpus(spec, skeleton->spec);
    ms::save_corpus(corpus, out_dir);
    if (clip_count) *clip_count = corpus.clips.size();
  });
}

// ---- Codec and index -------------------------------------------------------------

ms_status ms_codec_fit(const char* corpus_dir, const ms_skeleton* skeleton, int latent_dim,
                       int stride, ms_codec** out) {
  return guarded([&] {
    need(corpus_dir, "corpus_dir");
    need(out, "out");
    const ms::SyntheticCorpus corpus =
        ms::load_corpus(corpus_dir, skeleton ? &skeleton->spec : nullptr);
    const ms::TrainingWindows w = ms::corpus_windows(corpus, stride);
    *out = new ms_codec{std::make_shared<const ms::PcaCodec>(ms::PcaCodec::fit(w.windows, latent_dim))};
  });
}

ms_status ms_codec_load(const char* path, ms_codec** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ms_codec{std::make_shared<const ms::PcaCodec>(ms::PcaCodec::load(path))};
  });
}

ms_status ms_codec_save(const ms_codec* codec, const char* path) {
  return guarded([&] {
    need(codec, "codec");
    need(path, "path");
    codec->codec->save(path);
  });
}

void ms_codec_free(ms_codec* codec) { delete codec; }

int ms_codec_latent_dim(const ms_codec* codec) { return codec ? codec->codec->latent_dim() : 0; }

ms_status ms_index_build(const char* corpus_dir, const ms_skeleton* skeleton, const ms_codec* codec,
                         int stride, int text_dim, ms_index** out) {
  return guarded([&] {
    need(corpus_dir, "corpus_dir");
    need(codec, "codec");
    need(out, "out");
    const ms::SyntheticCorpus corpus =
        ms::load_corpus(corpus_dir, skeleton ? &skeleton->spec : nullptr);
    const ms::TrainingWindows w = ms::corpus_windows(corpus, stride);
    const ms::HashedTextEmbedder embedder(text_dim > 0 ? text_dim : ms::kDefaultTextEmbeddingDim);
    *out = new ms_index{std::make_shared<const ms::RetrievalIndex>(
        ms::build_retrieval_index(w.windows, w.texts, *codec->codec, embedder))};
  });
}

ms_status ms_index_load(const char* path, ms_index** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new ms_index{std::make_shared<const ms::RetrievalIndex>(ms::RetrievalIndex::load(path))};
  });
}

ms_status ms_index_save(const ms_index* index, const char* path) {
  return guarded([&] {
    need(index, "index");
    need(path, "path");
    index->index->save(path);
  });
}

void ms_index_free(ms_index* index) { delete index; }

size_t ms_index_size(const ms_index* index) { return index ? index->index->size() : 0; }

// ---- Generators -----------------------------------------------------------------------

ms_generator_options ms_generator_options_default(void) {
  return {ms::kDefaultDiffusionSteps, ms::kDefaultGuidanceScale, 1.0, 1.0};
}

ms_status ms_generator_create(const ms_codec* codec, const ms_index* index,
                              const ms_generator_options* options, ms_generator** out) {
  return guarded([&] {
    need(codec, "codec");
    need(index, "index");
    need(out, "out");
    const ms_generator_options o = options ? *options : ms_generator_options_default();
    ms::require(!index->index->empty(), ms::ErrorCode::kInvalidArgument, "retrieval index is empty");
    ms::require(index->index->entry(0).latent.size() == codec->codec->latent_dim(),
                ms::ErrorCode::kDimensionMismatch,
                "index latents have dimension " +
                    std::to_string(index->index->entry(0).latent.size()) + " but the codec has " +
                    std::to_string(codec->codec->latent_dim()));
    const int text_dim = static_cast<int>(index->index->entry(0).text.size());
    auto denoiser = std::make_shared<const OwningRetrievalDenoiser>(index->index, o.history_weight,
                                                                    o.text_weight);
    ms::SamplerOptions sampler;
    sampler.guidance_scale = o.guidance_scale;
    *out = new ms_generator{std::make_shared<const ms::LatentDiffusionGenerator>(
        codec->codec, std::move(denoiser), ms::cosine_schedule(o.diffusion_steps),
        std::make_shared<const ms::HashedTextEmbedder>(text_dim), sampler)};
  });
}

ms_status ms_generator_hold(ms_generator** out) {
  return guarded([&] {
    need(out, "out");
    *out = new ms_generator{std::make_shared<const ms::HoldGenerator>()};
  });
}

void ms_generator_free(ms_generator* generator) { delete generator; }

ms_status ms_rollout(const ms_generator* generator, const ms_skeleton* skeleton,
                     const char* spans_path, double duration_s, uint64_t seed, ms_clip** out_clip,
                     char** command_log, char** spans_text) {
  return guarded([&] {
    need(generator, "generator");
    need(skeleton, "skeleton");
    need(spans_path, "spans_path");
    need(out_clip, "out_clip");
    const auto spans = ms::load_spans(spans_path);
    ms::require(!spans.empty(), ms::ErrorCode::kInvalidArgument,
                std::string("text stream has no spans: ") + spans_path);
    double duration = duration_s;
    if (duration <= 0.0) {
      for (const auto& s : spans) duration = std::max(duration, s.t_end);
    }
    const ms::CommandTimeline timeline = ms::CommandTimeline::from_spans(spans);
    std::mt19937_64 rng(seed);
    const ms::SessionResult r = ms::stream_session(timeline, *generator->generator, duration, rng,
                                                   ms::stand_pose(skeleton->spec));
    const int block = generator->generator->future_frames();
    std::string log;
    if (command_log) {
      for (std::size_t k = 0; k < r.step_commands.size(); ++k) {
        log += std::to_string(k) + "\t" + std::to_string(static_cast<long long>(k) * block) +
               "\t" + r.step_commands[k] + "\n";
      }
    }
    std::string merged = spans_text ? spans_from_commands(r.command_log, ms::kFrameRate) : "";
    ms::MotionClip clip;
    clip.skeleton_hash = skeleton->spec.hash();
    clip.frame_rate = ms::kFrameRate;
    clip.frames = r.frames;
    *out_clip = wrap_clip(std::move(clip), skeleton->spec.num_dofs());
    if (command_log) *command_log = copy_string(log);
    if (spans_text) *spans_text = copy_string(merged);
  });
}

// ---- Evaluation ------------------------------------------------------------------------

ms_status ms_eval_generation(const char* real_dir, const char* generated_dir,
                             const ms_skeleton* skeleton, uint64_t seed, char** report_json) {
  return guarded([&] {
    need(real_dir, "real_dir");
    need(generated_dir, "generated_dir");
    need(skeleton, "skeleton");
    need(report_json, "report_json");
    const ms::SyntheticCorpus real = ms::load_corpus(real_dir, &skeleton->spec);
    const ms::SyntheticCorpus gen = ms::load_corpus(generated_dir, &skeleton->spec);
    const ms::OracleEmbedder oracle(real.labels, skeleton->spec);
    *report_json =
        copy_string(ms::generation_report_json(ms::evaluate_generation(real, gen, oracle, seed)));
  });
}

ms_status ms_eval_embeddings(const char* container_path, uint64_t seed, char** report_json) {
  return guarded([&] {
    need(container_path, "container_path");
    need(report_json, "report_json");
    const ms::BinaryContainer c = ms::load_container(container_path);
    *report_json = copy_string(ms::embedding_report_json(ms::evaluate_embeddings(
        c.matrix("real_motion"), c.matrix("generated_motion"), c.matrix("generated_text"), seed)));
  });
}

ms_status ms_eval_tracking(const ms_clip* const* policy, const ms_clip* const* reference,
                           size_t count, const ms_skeleton* skeleton, double threshold_m,
                           char** report_json) {
  return guarded([&] {
    need(policy, "policy");
    need(reference, "reference");
    need(skeleton, "skeleton");
    need(report_json, "report_json");
    std::vector<ms::MotionClip> p, r;
    for (size_t i = 0; i < count; ++i) {
      need(policy[i], "policy clip");
      need(reference[i], "reference clip");
      p.push_back(policy[i]->clip);
      r.push_back(reference[i]->clip);
    }
    *report_json = copy_string(
        ms::tracking_report_json(ms::evaluate_tracking(p, r, skeleton->spec, threshold_m)));
  });
}

// ---- Server ------------------------------------------------------------------------------

ms_server_config ms_server_config_default(void) {
  const ms::ServerConfig d;
  return {"127.0.0.1", d.port, d.frame_rate, ms::kIdleCommand, d.seed, nullptr};
}

ms_status ms_server_create(const ms_server_config* config, const ms_skeleton* skeleton,
                           const ms_generator* generator, ms_server** out) {
  return guarded([&] {
    need(skeleton, "skeleton");
    need(generator, "generator");
    need(out, "out");
    const ms_server_config c = config ? *config : ms_server_config_default();
    ms::ServerConfig sc;
    if (c.host) sc.host = c.host;
    sc.port = c.port;
    sc.frame_rate = c.frame_rate;
    if (c.idle_command) sc.idle_command = c.idle_command;
    sc.seed = c.seed;
    if (c.log_path) sc.log_path = c.log_path;
    auto s = std::make_unique<ms_server>();
    s->generator = generator->generator;
    s->server = std::make_unique<ms::StreamServer>(sc, skeleton->spec, s->generator,
                                                   ms::stand_pose(skeleton->spec));
    *out = s.release();
  });
}

ms_status ms_server_start(ms_server* server) {
  return guarded([&] {
    need(server, "server");
    server->server->start();
  });
}

ms_status ms_server_stop(ms_server* server) {
  return guarded([&] {
    need(server, "server");
    server->server->stop();
  });
}

void ms_server_free(ms_server* server) { delete server; }

int ms_server_port(const ms_server* server) { return server ? server->server->port() : 0; }

long long ms_server_frames_emitted(const ms_server* server) {
  return server ? server->server->frames_emitted() : 0;
}

long long ms_server_underruns(const ms_server* server) {
  return server ? server->server->underruns() : 0;
}

ms_status ms_server_session_log(const ms_server* server, char** out_log) {
  return guarded([&] {
    need(server, "server");
    need(out_log, "out_log");
    *out_log = copy_string(server->server->session_log());
  });
}

ms_status ms_latency_report(const char* session_log, long long min_events, char** report_json) {
  return guarded([&] {
    need(session_log, "session_log");
    need(report_json, "report_json");
    const ms::LatencyReport r = ms::measure_latency(session_log, min_events);
    auto stage = [](const ms::StageStats& s) {
      return nlohmann::json{{"mean", s.mean}, {"sd", s.sd}, {"n", s.n}};
    };
    const nlohmann::json j = {{"schema", "motionstream.latency_report/1"},
                              {"embed_ms", stage(r.embed_ms)},
                              {"generator_ms", stage(r.generator_ms)},
                              {"end_to_end_ms", stage(r.end_to_end_ms)},
                              {"pongs", r.pongs}};
    *report_json = copy_string(j.dump(2) + "\n");
  });
}

ms_status ms_replay_session_log(const char* session_log, const ms_generator* generator,
                                const ms_skeleton* skeleton, long long frame_count,
                                ms_clip** out_clip) {
  return guarded([&] {
    need(session_log, "session_log");
    need(generator, "generator");
    need(skeleton, "skeleton");
    need(out_clip, "out_clip");
    const ms::SessionReplayInput in = ms::replay_input_from_log(session_log);
    std::mt19937_64 rng(in.seed);
    const ms::SessionResult r = ms::replay_session(in.step_commands, *generator->generator, rng,
                                                   ms::stand_pose(skeleton->spec), frame_count);
    ms::MotionClip clip;
    clip.skeleton_hash = skeleton->spec.hash();
    clip.frames = r.frames;
    *out_clip = wrap_clip(std::move(clip), skeleton->spec.num_dofs());
  });
}

}  // extern "C"
