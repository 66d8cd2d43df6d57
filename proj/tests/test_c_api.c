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

#include <math.h>
#include <stdio.h>
#include <stdlib.h>
#include <string.h>
#include <sys/stat.h>

#include "motionstream/motionstream.h"

static int failures = 0;

#define CHECK(cond)                                                        \
  do {                                                                     \
    if (!(cond)) {                                                         \
      fprintf(stderr, "%s:%d: CHECK failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                          \
    }                                                                      \
  } while (0)

#define CHECK_OK(call)                                                             \
  do {                                                                             \
    ms_status s_ = (call);                                                         \
    if (s_ != MS_OK) {                                                             \
      fprintf(stderr, "%s:%d: %s -> %s: %s\n", __FILE__, __LINE__, #call,          \
              ms_status_name(s_), ms_last_error_message());                        \
      ++failures;                                                                  \
    }                                                                              \
  } while (0)

static char dir[512];

static const char* path_in(const char* name) {
  static char buf[4][640];
  static int slot = 0;
  slot = (slot + 1) % 4;
  snprintf(buf[slot], sizeof buf[slot], "%s/%s", dir, name);
  return buf[slot];
}

static void test_errors(void) {
  ms_skeleton* s = NULL;
  CHECK(strcmp(ms_version(), "0.1.0") == 0);
  CHECK(strcmp(ms_status_name(MS_ERR_FORMAT), "format") == 0);
  CHECK(ms_skeleton_builtin("nope", &s) == MS_ERR_NOT_FOUND);
  CHECK(s == NULL);
  CHECK(ms_last_error_code() == MS_ERR_NOT_FOUND);
  CHECK(strstr(ms_last_error_message(), "nope") != NULL);
  CHECK(ms_skeleton_builtin(NULL, &s) == MS_ERR_INVALID_ARGUMENT);
  CHECK(ms_clip_load(path_in("missing.msclip"), NULL, NULL) == MS_ERR_INVALID_ARGUMENT);
  ms_clip* c = NULL;
  CHECK(ms_clip_load(path_in("missing.msclip"), NULL, &c) == MS_ERR_IO);
  ms_skeleton_free(NULL);
  ms_clip_free(NULL);
  ms_string_free(NULL);
}

static void test_skeleton_and_fk(void) {
  ms_skeleton* s = NULL;
  CHECK_OK(ms_skeleton_builtin("test5", &s));
  CHECK(ms_skeleton_num_dofs(s) == 5);
  CHECK_OK(ms_skeleton_save(s, path_in("test5.skel")));
  ms_skeleton* back = NULL;
  CHECK_OK(ms_skeleton_load(path_in("test5.skel"), &back));
  CHECK(ms_skeleton_hash(back) == ms_skeleton_hash(s));

  const double p[3] = {1.0, 2.0, 0.8};
  const double r[4] = {1.0, 0.0, 0.0, 0.0};
  const double q[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
  double lp[18], lq[24];
  CHECK_OK(ms_skeleton_fk(s, p, r, q, lp, lq));
  CHECK(lp[0] == 1.0 && lp[1] == 2.0 && lp[2] == 0.8);
  CHECK(lq[0] == 1.0);

  char* json = NULL;
  CHECK_OK(ms_fk_vectors_json(s, 3, 1, &json));
  CHECK(json != NULL && strstr(json, "\"cases\"") != NULL);
  ms_string_free(json);
  ms_skeleton_free(back);
  ms_skeleton_free(s);
}

static void test_clips(void) {
  ms_skeleton* s = NULL;
  CHECK_OK(ms_skeleton_builtin("test5", &s));
  ms_clip* c = NULL;
  CHECK_OK(ms_clip_create(s, 50.0, &c));
  for (int t = 0; t < 40; ++t) {
    const double x = 0.01 * t;
    const double p[3] = {x, 0.5 * x, 0.8 + 0.01 * sin(0.2 * t)};
    const double half = 0.05 * t;
    const double r[4] = {cos(half), 0.0, 0.0, sin(half)};
    double q[5];
    for (int i = 0; i < 5; ++i) q[i] = 0.3 * sin(0.1 * t + i);
    const uint8_t contacts[2] = {(uint8_t)(t % 2), 1};
    CHECK_OK(ms_clip_append_frame(c, p, r, q, contacts));
  }
  CHECK(ms_clip_frame_count(c) == 40);
  CHECK(ms_clip_num_dofs(c) == 5);
  CHECK_OK(ms_clip_save(c, path_in("c.msclip")));
  ms_clip* loaded = NULL;
  CHECK_OK(ms_clip_load(path_in("c.msclip"), s, &loaded));
  double p0[3], r0[4], q0[5], p1[3], r1[4], q1[5];
  uint8_t c0[2], c1[2];
  CHECK_OK(ms_clip_get_frame(c, 17, p0, r0, q0, c0));
  CHECK_OK(ms_clip_get_frame(loaded, 17, p1, r1, q1, c1));
  CHECK(memcmp(p0, p1, sizeof p0) == 0 && memcmp(q0, q1, sizeof q0) == 0);
  CHECK(c0[0] == c1[0] && c0[1] == c1[1]);
  CHECK(ms_clip_get_frame(c, 40, p0, r0, q0, c0) == MS_ERR_INVALID_ARGUMENT);

  double pos_err = -1.0, joint_err = -1.0;
  CHECK_OK(ms_clip_roundtrip(c, &pos_err, &joint_err));
  CHECK(pos_err >= 0.0 && pos_err <= 1e-9);
  CHECK(joint_err >= 0.0 && joint_err <= 1e-9);

  CHECK_OK(ms_clip_encode(c, path_in("c.msfeat")));
  ms_clip* decoded = NULL;
  CHECK_OK(ms_features_decode(path_in("c.msfeat"), &decoded));
  CHECK(ms_clip_frame_count(decoded) == 39);
  CHECK_OK(ms_clip_get_frame(decoded, 17, p1, r1, q1, c1));
  for (int i = 0; i < 3; ++i) CHECK(fabs(p0[i] - p1[i]) < 1e-9);
  for (int i = 0; i < 5; ++i) CHECK(fabs(q0[i] - q1[i]) < 1e-9);

  int ok = -1;
  char* report = NULL;
  CHECK_OK(ms_clip_validate(c, s, &ok, &report));
  CHECK(ok == 1);
  ms_string_free(report);
  const double p[3] = {0, 0, 0};
  const double bad[4] = {2.0, 0.0, 0.0, 0.0};
  const double q[5] = {0, 0, 0, 0, 0};
  const uint8_t contacts[2] = {0, 0};
  CHECK_OK(ms_clip_append_frame(c, p, bad, q, contacts));
  CHECK_OK(ms_clip_validate(c, s, &ok, &report));
  CHECK(ok == 0);
  CHECK(strstr(report, "\"frame\": 40") != NULL);
  ms_string_free(report);

  ms_skeleton* g1 = NULL;
  CHECK_OK(ms_skeleton_builtin("g1", &g1));
  ms_clip* wrong = NULL;
  CHECK(ms_clip_load(path_in("c.msclip"), g1, &wrong) == MS_ERR_HASH_MISMATCH);

  ms_clip_free(decoded);
  ms_clip_free(loaded);
  ms_clip_free(c);
  ms_skeleton_free(g1);
  ms_skeleton_free(s);
}

static void test_pipeline(void) {
  ms_skeleton* g1 = NULL;
  CHECK_OK(ms_skeleton_builtin("g1", &g1));
  ms_synth_options o = ms_synth_options_default();
  o.clips_per_label = 1;
  size_t clips = 0;
  CHECK_OK(ms_synth_corpus(g1, &o, path_in("corpus"), &clips));
  CHECK(clips == 25);

  ms_codec* codec = NULL;
  CHECK_OK(ms_codec_fit(path_in("corpus"), g1, 8, 4, &codec));
  CHECK(ms_codec_latent_dim(codec) == 8);
  CHECK_OK(ms_codec_save(codec, path_in("codec.bin")));
  ms_codec* codec2 = NULL;
  CHECK_OK(ms_codec_load(path_in("codec.bin"), &codec2));
  ms_index* index = NULL;
  CHECK_OK(ms_index_build(path_in("corpus"), g1, codec2, 4, 0, &index));
  CHECK(ms_index_size(index) > 100);
  CHECK_OK(ms_index_save(index, path_in("index.bin")));
  ms_index* index2 = NULL;
  CHECK_OK(ms_index_load(path_in("index.bin"), &index2));
  CHECK(ms_index_size(index2) == ms_index_size(index));

  ms_generator* gen = NULL;
  CHECK_OK(ms_generator_create(codec2, index2, NULL, &gen));
  ms_codec_free(codec);
  ms_codec_free(codec2);
  ms_index_free(index);
  ms_index_free(index2);

  FILE* f = fopen(path_in("stream.spans"), "w");
  fputs("#version 1\n0\t2\tstand\n2\t16\twalk\n16\t28\tpunch\n28\t30\tstand\n", f);
  fclose(f);
  ms_clip* out = NULL;
  char* log = NULL;
  char* spans = NULL;
  CHECK_OK(ms_rollout(gen, g1, path_in("stream.spans"), 0.0, 3, &out, &log, &spans));
  CHECK(ms_clip_frame_count(out) == 1500);
  int lines = 0;
  for (const char* c = log; *c; ++c) lines += *c == '\n';
  CHECK(lines == 188);
  CHECK(strstr(spans, "walk") != NULL);
  CHECK(strncmp(log, "0\t0\tstand\n", 10) == 0);

  char* report = NULL;
  const ms_clip* policy[1] = {out};
  CHECK_OK(ms_eval_tracking(policy, policy, 1, g1, 0.3, &report));
  CHECK(strstr(report, "\"g_mpjpe_mm\": 0.0") != NULL);
  CHECK(strstr(report, "\"success_rate\": 1.0") != NULL);
  ms_string_free(report);

  CHECK_OK(ms_eval_generation(path_in("corpus"), path_in("corpus"), g1, 1, &report));
  CHECK(strstr(report, "motionstream.generation_report/1") != NULL);
  ms_string_free(report);

  ms_string_free(log);
  ms_string_free(spans);
  ms_clip_free(out);
  ms_generator_free(gen);
  ms_skeleton_free(g1);
}

static void test_server(void) {
  ms_skeleton* s = NULL;
  CHECK_OK(ms_skeleton_builtin("test5", &s));
  ms_generator* hold = NULL;
  CHECK_OK(ms_generator_hold(&hold));
  ms_server_config cfg = ms_server_config_default();
  CHECK(cfg.port == 7878);
  cfg.port = 0;
  ms_server* server = NULL;
  CHECK_OK(ms_server_create(&cfg, s, hold, &server));
  CHECK_OK(ms_server_start(server));
  CHECK(ms_server_port(server) > 0);
  CHECK_OK(ms_server_stop(server));
  char* log = NULL;
  CHECK_OK(ms_server_session_log(server, &log));
  CHECK(strstr(log, "session_start") != NULL);
  CHECK(strstr(log, "session_end") != NULL);
  char* report = NULL;
  CHECK(ms_latency_report(log, 100, &report) == MS_ERR_INVALID_ARGUMENT);
  CHECK_OK(ms_latency_report(log, 0, &report));
  ms_string_free(report);
  ms_clip* replay = NULL;
  CHECK_OK(ms_replay_session_log(log, hold, s, -1, &replay));
  ms_clip_free(replay);
  ms_string_free(log);
  ms_server_free(server);
  ms_generator_free(hold);
  ms_skeleton_free(s);
}

int main(int argc, char** argv) {
  snprintf(dir, sizeof dir, "%s", argc > 1 ? argv[1] : "c_api_tmp");
  mkdir(dir, 0755);
  test_errors();
  test_skeleton_and_fk();
  test_clips();
  test_pipeline();
  test_server();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("C API: all checks passed\n");
  return 0;
}
