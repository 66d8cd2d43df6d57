/*
 * Copyright 2026 The MotionStream Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MOTIONSTREAM_H_
#define MOTIONSTREAM_H_

/*
 * C interface to the motionstream library.
 *
 * Objects are opaque handles created by the create and load functions and
 * released by the matching *_free (which accepts NULL). Every fallible call
 * returns an ms_status; on failure a message is available from
 * ms_last_error_message() on the calling thread until its next failing call.
 * Strings returned through char** are heap-allocated UTF-8 and released
 * with ms_string_free.
 *
 * Poses use a scalar-first unit quaternion [w, x, y, z] for the root
 * orientation, a root position in meters, and joint angles in radians.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MOTIONSTREAM_BUILDING)
#    define MS_API __declspec(dllexport)
#  else
#    define MS_API __declspec(dllimport)
#  endif
#else
#  define MS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Numeric values are stable across releases. */
typedef enum ms_status {
  MS_OK = 0,
  MS_ERR_INVALID_ARGUMENT = 1,
  MS_ERR_DIMENSION_MISMATCH = 2,
  MS_ERR_IO = 3,
  MS_ERR_FORMAT = 4,
  MS_ERR_VERSION_MISMATCH = 5,
  MS_ERR_HASH_MISMATCH = 6,
  MS_ERR_TRUNCATED = 7,
  MS_ERR_NUMERICAL = 8,
  MS_ERR_NOT_FOUND = 9,
  MS_ERR_RANK_DEFICIENT = 10,
  MS_ERR_NETWORK = 11,
  MS_ERR_INTERNAL = 12
} ms_status;

typedef struct ms_skeleton ms_skeleton;
typedef struct ms_clip ms_clip;
typedef struct ms_codec ms_codec;
typedef struct ms_index ms_index;
typedef struct ms_generator ms_generator;
typedef struct ms_server ms_server;

/* ---- Library ------------------------------------------------------------ */

MS_API const char* ms_version(void);
/* Stable identifier such as "format"; never NULL. */
MS_API const char* ms_status_name(ms_status status);
MS_API ms_status ms_last_error_code(void);
/* Empty string when the thread has not failed yet; never NULL. */
MS_API const char* ms_last_error_message(void);
MS_API void ms_string_free(char* s);

/* ---- Skeletons ------------------------------------------------------------ */

/* Built-in names: "g1" (29 DoF humanoid) and "test5" (5 DoF legs). */
MS_API ms_status ms_skeleton_builtin(const char* name, ms_skeleton** out);
MS_API ms_status ms_skeleton_load(const char* path, ms_skeleton** out);
MS_API ms_status ms_skeleton_save(const ms_skeleton* skeleton, const char* path);
MS_API void ms_skeleton_free(ms_skeleton* skeleton);
MS_API int ms_skeleton_num_dofs(const ms_skeleton* skeleton);
MS_API uint64_t ms_skeleton_hash(const ms_skeleton* skeleton);
/* Writes num_dofs + 1 link positions (3 each) and orientations (4 each);
 * link 0 is the root. */
MS_API ms_status ms_skeleton_fk(const ms_skeleton* skeleton, const double root_position[3],
                                const double root_quaternion[4], const double* q,
                                double* link_positions, double* link_quaternions);
/* Shared FK test vectors for wire clients (structured text). */
MS_API ms_status ms_fk_vectors_json(const ms_skeleton* skeleton, int count, uint64_t seed,
                                    char** out_json);

/* ---- Clips ---------------------------------------------------------------- */

MS_API ms_status ms_clip_create(const ms_skeleton* skeleton, double frame_rate, ms_clip** out);
/* With a skeleton, the stored hash and DoF count must match it. */
MS_API ms_status ms_clip_load(const char* path, const ms_skeleton* skeleton, ms_clip** out);
MS_API ms_status ms_clip_save(const ms_clip* clip, const char* path);
MS_API void ms_clip_free(ms_clip* clip);
MS_API size_t ms_clip_frame_count(const ms_clip* clip);
MS_API int ms_clip_num_dofs(const ms_clip* clip);
MS_API double ms_clip_frame_rate(const ms_clip* clip);
/* contacts holds two flags (left, right), each 0 or 1. */
MS_API ms_status ms_clip_append_frame(ms_clip* clip, const double root_position[3],
                                      const double root_quaternion[4], const double* q,
                                      const uint8_t contacts[2]);
MS_API ms_status ms_clip_get_frame(const ms_clip* clip, size_t index, double root_position[3],
                                   double root_quaternion[4], double* q, uint8_t contacts[2]);
/* Sets *ok to 1 when the clip passes; the report lists every issue. */
MS_API ms_status ms_clip_validate(const ms_clip* clip, const ms_skeleton* skeleton, int* ok,
                                  char** report_json);
MS_API ms_status ms_clip_to_json(const ms_clip* clip, char** out_json);

/* ---- Motion representation ------------------------------------------------ */

/* Encodes a clip of T + 1 frames to T feature frames in a feature file. */
MS_API ms_status ms_clip_encode(const ms_clip* clip, const char* features_path);
/* Decodes a feature file back to T raw frames (the first T of the source). */
MS_API ms_status ms_features_decode(const char* features_path, ms_clip** out);
/* Encodes, decodes and compares with the source clip. */
MS_API ms_status ms_clip_roundtrip(const ms_clip* clip, double* max_position_error_m,
                                   double* max_joint_error_rad);

/* ---- Corpus --------------------------------------------------------------- */

typedef struct ms_synth_options {
  int clips_per_label;
  int min_frames;
  int max_frames;
  int transitions; /* nonzero adds one clip per ordered label pair */
  double noise;    /* joint-angle noise amplitude, rad */
  uint64_t seed;
} ms_synth_options;

MS_API ms_synth_options ms_synth_options_default(void);
/* Writes a corpus directory (labels.txt plus clip_NNNN.msclip/.spans). The
 * skeleton needs the humanoid's joint names. */
MS_API ms_status ms_synth_corpus(const ms_skeleton* skeleton, const ms_synth_options* options,
                                 const char* out_dir, size_t* clip_count);

/* ---- Codec and retrieval index -------------------------------------------- */

/* Fits a PCA codec on corpus windows taken every `stride` frames. */
MS_API ms_status ms_codec_fit(const char* corpus_dir, const ms_skeleton* skeleton,
                              int latent_dim, int stride, ms_codec** out);
MS_API ms_status ms_codec_load(const char* path, ms_codec** out);
MS_API ms_status ms_codec_save(const ms_codec* codec, const char* path);
MS_API void ms_codec_free(ms_codec* codec);
MS_API int ms_codec_latent_dim(const ms_codec* codec);

/* Stores every corpus window (latent, history, text key) with hashed
 * text embeddings of dimension text_dim (<= 0 selects 64). */
MS_API ms_status ms_index_build(const char* corpus_dir, const ms_skeleton* skeleton,
                                const ms_codec* codec, int stride, int text_dim, ms_index** out);
MS_API ms_status ms_index_load(const char* path, ms_index** out);
MS_API ms_status ms_index_save(const ms_index* index, const char* path);
MS_API void ms_index_free(ms_index* index);
MS_API size_t ms_index_size(const ms_index* index);

/* ---- Generators ----------------------------------------------------------- */

typedef struct ms_generator_options {
  int diffusion_steps;   /* 5 */
  double guidance_scale; /* 5.0 */
  double history_weight; /* retrieval key weights, 1.0 each */
  double text_weight;
} ms_generator_options;

MS_API ms_generator_options ms_generator_options_default(void);
/* Latent diffusion with the retrieval denoiser over `index`. The generator
 * keeps its own references; codec and index may be freed afterwards. */
MS_API ms_status ms_generator_create(const ms_codec* codec, const ms_index* index,
                                     const ms_generator_options* options, ms_generator** out);
/* Holds the current pose; useful for plumbing checks. */
MS_API ms_status ms_generator_hold(ms_generator** out);
MS_API void ms_generator_free(ms_generator* generator);

/* Offline session: duration_s <= 0 runs until the end of the last span.
 * The clip starts from the stand pose. The command log (one line per
 * generator step: "<step>\t<first_frame>\t<command>") and the per-frame
 * commands merged into spans are returned when the pointers are non-NULL. */
MS_API ms_status ms_rollout(const ms_generator* generator, const ms_skeleton* skeleton,
                            const char* spans_path, double duration_s, uint64_t seed,
                            ms_clip** out_clip, char** command_log, char** spans_text);

/* ---- Evaluation ----------------------------------------------------------- */

/* Generation report of a generated corpus directory against a real one,
 * using the synthetic-corpus oracle embedder over the real labels. */
MS_API ms_status ms_eval_generation(const char* real_dir, const char* generated_dir,
                                    const ms_skeleton* skeleton, uint64_t seed,
                                    char** report_json);
/* Same embedding metrics from a container holding "real_motion",
 * "generated_motion" and "generated_text" matrices (one row per sample). */
MS_API ms_status ms_eval_embeddings(const char* container_path, uint64_t seed,
                                    char** report_json);
/* Tracking report over clip pairs (policy[i] against reference[i]). */
MS_API ms_status ms_eval_tracking(const ms_clip* const* policy, const ms_clip* const* reference,
                                  size_t count, const ms_skeleton* skeleton, double threshold_m,
                                  char** report_json);

/* ---- Stream server -------------------------------------------------------- */

typedef struct ms_server_config {
  const char* host; /* "127.0.0.1" */
  int port;         /* 7878; 0 picks a free port */
  double frame_rate;
  const char* idle_command; /* "stand" */
  uint64_t seed;
  const char* log_path; /* session log file, NULL or "" for memory only */
} ms_server_config;

MS_API ms_server_config ms_server_config_default(void);
MS_API ms_status ms_server_create(const ms_server_config* config, const ms_skeleton* skeleton,
                                  const ms_generator* generator, ms_server** out);
MS_API ms_status ms_server_start(ms_server* server);
/* Flushes a final status to clients and joins all threads. */
MS_API ms_status ms_server_stop(ms_server* server);
MS_API void ms_server_free(ms_server* server);
MS_API int ms_server_port(const ms_server* server);
MS_API long long ms_server_frames_emitted(const ms_server* server);
MS_API long long ms_server_underruns(const ms_server* server);
MS_API ms_status ms_server_session_log(const ms_server* server, char** out_log);
/* Latency statistics of a session log; needs at least min_events steps. */
MS_API ms_status ms_latency_report(const char* session_log, long long min_events,
                                   char** report_json);
/* Replays a session log offline and returns the clip of every generated
 * frame, for comparison with the streamed frames. */
MS_API ms_status ms_replay_session_log(const char* session_log, const ms_generator* generator,
                                       const ms_skeleton* skeleton, long long frame_count,
                                       ms_clip** out_clip);

#ifdef __cplusplus
}
#endif

#endif /* MOTIONSTREAM_H_ */
