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

// msctl: command-line front end over the motionstream C API.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "motionstream/motionstream.h"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitError = 3;

// One JSON object per line on stderr, so callers can parse failures.
void error_record(const std::string& code, int status, const std::string& message,
                  const std::string& command) {
  const nlohmann::json j = {{"error", code}, {"status", status}, {"command", command},
                            {"message", message}};
  std::cerr << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << "\n";
}

struct ApiFailure {
  ms_status status;
  std::string message;
};

void check(ms_status s) {
  if (s != MS_OK) throw ApiFailure{s, ms_last_error_message()};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Skeleton = std::unique_ptr<ms_skeleton, Deleter<ms_skeleton, ms_skeleton_free>>;
using Clip = std::unique_ptr<ms_clip, Deleter<ms_clip, ms_clip_free>>;
using Codec = std::unique_ptr<ms_codec, Deleter<ms_codec, ms_codec_free>>;
using Index = std::unique_ptr<ms_index, Deleter<ms_index, ms_index_free>>;
using Generator = std::unique_ptr<ms_generator, Deleter<ms_generator, ms_generator_free>>;
using Server = std::unique_ptr<ms_server, Deleter<ms_server, ms_server_free>>;

std::string take(char* s) {
  std::string out = s ? s : "";
  ms_string_free(s);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw ApiFailure{MS_ERR_IO, "cannot write " + path};
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ApiFailure{MS_ERR_IO, "cannot read " + path};
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// A built-in name ("g1", "test5") or a skeleton file.
Skeleton load_skeleton(const std::string& spec) {
  ms_skeleton* s = nullptr;
  if (spec == "g1" || spec == "test5") check(ms_skeleton_builtin(spec.c_str(), &s));
  else check(ms_skeleton_load(spec.c_str(), &s));
  return Skeleton(s);
}

Clip load_clip(const std::string& path, const ms_skeleton* skeleton) {
  ms_clip* c = nullptr;
  check(ms_clip_load(path.c_str(), skeleton, &c));
  return Clip(c);
}

struct GeneratorArgs {
  std::string codec;
  std::string index;
  bool hold = false;
  ms_generator_options options = ms_generator_options_default();

  void add_to(CLI::App* app) {
    app->add_option("--codec", codec, "PCA codec file")->envname("MOTIONSTREAM_CODEC");
    app->add_option("--index", index, "retrieval index file")->envname("MOTIONSTREAM_INDEX");
    app->add_flag("--hold", hold, "hold the stand pose instead of generating");
    app->add_option("--steps", options.diffusion_steps, "diffusion steps")->capture_default_str();
    app->add_option("--guidance", options.guidance_scale, "classifier-free guidance scale")
        ->capture_default_str();
    app->add_option("--history-weight", options.history_weight, "retrieval history weight")
        ->capture_default_str();
    app->add_option("--text-weight", options.text_weight, "retrieval text weight")
        ->capture_default_str();
  }

  Generator make() const {
    ms_generator* g = nullptr;
    if (hold) {
      check(ms_generator_hold(&g));
      return Generator(g);
    }
    if (codec.empty() || index.empty()) {
      throw CLI::ValidationError("--codec and --index are required unless --hold is given");
    }
    ms_codec* c = nullptr;
    check(ms_codec_load(codec.c_str(), &c));
    const Codec codec_handle(c);
    ms_index* i = nullptr;
    check(ms_index_load(index.c_str(), &i));
    const Index index_handle(i);
    check(ms_generator_create(c, i, &options, &g));
    return Generator(g);
  }
};

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop = true; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"motionstream command-line tool"};
  app.require_subcommand(1);
  std::string skeleton_spec = "g1";
  app.add_option("--skeleton", skeleton_spec, "built-in skeleton (g1, test5) or skeleton file")
      ->envname("MOTIONSTREAM_SKELETON")
      ->capture_default_str();
  int exit_code = 0;

  // encode
  auto* encode = app.add_subcommand("encode", "encode a clip to a feature file");
  std::string in_path, out_path;
  encode->add_option("input", in_path, "clip file")->required()->check(CLI::ExistingFile);
  encode->add_option("-o,--out", out_path, "feature file")->required();
  encode->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    check(ms_clip_encode(load_clip(in_path, s.get()).get(), out_path.c_str()));
  });

  // decode
  auto* decode = app.add_subcommand("decode", "decode a feature file to a clip");
  decode->add_option("input", in_path, "feature file")->required()->check(CLI::ExistingFile);
  decode->add_option("-o,--out", out_path, "clip file")->required();
  decode->callback([&] {
    ms_clip* c = nullptr;
    check(ms_features_decode(in_path.c_str(), &c));
    const Clip clip(c);
    check(ms_clip_save(c, out_path.c_str()));
  });

  // roundtrip-check
  auto* roundtrip = app.add_subcommand("roundtrip-check", "encode, decode and compare a clip");
  double tolerance = 1e-9;
  roundtrip->add_option("input", in_path, "clip file")->required()->check(CLI::ExistingFile);
  roundtrip->add_option("--tolerance", tolerance, "pass threshold (m and rad)")
      ->capture_default_str();
  roundtrip->callback([&] {
    const Clip clip = load_clip(in_path, nullptr);
    double pos = 0.0, joint = 0.0;
    check(ms_clip_roundtrip(clip.get(), &pos, &joint));
    const bool ok = pos <= tolerance && joint <= tolerance;
    const nlohmann::json j = {{"max_position_error_m", pos},
                              {"max_joint_error_rad", joint},
                              {"tolerance", tolerance},
                              {"ok", ok}};
    std::cout << j.dump() << "\n";
    if (!ok) exit_code = kExitCheckFailed;
  });

  // validate
  auto* validate = app.add_subcommand("validate", "validate a clip against a skeleton");
  validate->add_option("input", in_path, "clip file")->required()->check(CLI::ExistingFile);
  validate->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    const Clip clip = load_clip(in_path, nullptr);
    int ok = 0;
    char* report = nullptr;
    check(ms_clip_validate(clip.get(), s.get(), &ok, &report));
    std::cout << take(report);
    if (!ok) exit_code = kExitCheckFailed;
  });

  // synth-corpus
  auto* synth = app.add_subcommand("synth-corpus", "write the synthetic labeled corpus");
  ms_synth_options synth_opts = ms_synth_options_default();
  bool no_transitions = false;
  synth->add_option("-o,--out", out_path, "output directory")->required();
  synth->add_option("--clips-per-label", synth_opts.clips_per_label)->capture_default_str();
  synth->add_option("--min-frames", synth_opts.min_frames)->capture_default_str();
  synth->add_option("--max-frames", synth_opts.max_frames)->capture_default_str();
  synth->add_option("--noise", synth_opts.noise, "joint noise amplitude (rad)")
      ->capture_default_str();
  synth->add_option("--seed", synth_opts.seed)->capture_default_str();
  synth->add_flag("--no-transitions", no_transitions, "omit label-pair transition clips");
  synth->callback([&] {
    synth_opts.transitions = no_transitions ? 0 : 1;
    const Skeleton s = load_skeleton(skeleton_spec);
    std::size_t count = 0;
    check(ms_synth_corpus(s.get(), &synth_opts, out_path.c_str(), &count));
    std::cout << nlohmann::json{{"clips", count}, {"directory", out_path}}.dump() << "\n";
  });

  // fit-codec
  auto* fit = app.add_subcommand("fit-codec", "fit the PCA codec on a corpus");
  std::string corpus_dir;
  int latent_dim = 16, stride = 2;
  fit->add_option("--corpus", corpus_dir, "corpus directory")->required()->check(CLI::ExistingDirectory);
  fit->add_option("--latent-dim", latent_dim)->capture_default_str();
  fit->add_option("--stride", stride, "frames between windows")->capture_default_str();
  fit->add_option("-o,--out", out_path, "codec file")->required();
  fit->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    ms_codec* c = nullptr;
    check(ms_codec_fit(corpus_dir.c_str(), s.get(), latent_dim, stride, &c));
    const Codec codec(c);
    check(ms_codec_save(c, out_path.c_str()));
  });

  // build-index
  auto* build = app.add_subcommand("build-index", "build the retrieval index of a corpus");
  std::string codec_path;
  int text_dim = 64;
  build->add_option("--corpus", corpus_dir, "corpus directory")->required()->check(CLI::ExistingDirectory);
  build->add_option("--codec", codec_path, "codec file")->required()->check(CLI::ExistingFile);
  build->add_option("--stride", stride, "frames between windows")->capture_default_str();
  build->add_option("--text-dim", text_dim, "hashed text embedding dimension")->capture_default_str();
  build->add_option("-o,--out", out_path, "index file")->required();
  build->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    ms_codec* c = nullptr;
    check(ms_codec_load(codec_path.c_str(), &c));
    const Codec codec(c);
    ms_index* i = nullptr;
    check(ms_index_build(corpus_dir.c_str(), s.get(), c, stride, text_dim, &i));
    const Index index(i);
    check(ms_index_save(i, out_path.c_str()));
    std::cout << nlohmann::json{{"entries", ms_index_size(i)}}.dump() << "\n";
  });

  // rollout
  auto* rollout = app.add_subcommand("rollout", "run an offline session from a text stream");
  GeneratorArgs gen_args;
  gen_args.add_to(rollout);
  std::string timeline_path, log_path, spans_path;
  double duration = 0.0;
  std::uint64_t seed = 1;
  rollout->add_option("timeline", timeline_path, "text-stream span file")
      ->required()
      ->check(CLI::ExistingFile);
  rollout->add_option("--duration", duration, "seconds; 0 runs to the end of the last span")
      ->capture_default_str();
  rollout->add_option("--seed", seed)->capture_default_str();
  rollout->add_option("-o,--out", out_path, "output clip")->required();
  rollout->add_option("--command-log", log_path, "per-step command log (default <out>.commands)");
  rollout->add_option("--spans", spans_path, "per-frame commands as spans (default <out>.spans)");
  rollout->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    const Generator g = gen_args.make();
    ms_clip* c = nullptr;
    char* log = nullptr;
    char* spans = nullptr;
    check(ms_rollout(g.get(), s.get(), timeline_path.c_str(), duration, seed, &c, &log, &spans));
    const Clip clip(c);
    check(ms_clip_save(c, out_path.c_str()));
    const std::string stem = out_path.substr(0, out_path.rfind('.') == std::string::npos
                                                    ? out_path.size()
                                                    : out_path.rfind('.'));
    write_text(log_path.empty() ? stem + ".commands" : log_path, take(log));
    write_text(spans_path.empty() ? stem + ".spans" : spans_path, take(spans));
    std::cout << nlohmann::json{{"frames", ms_clip_frame_count(c)}, {"clip", out_path}}.dump()
              << "\n";
  });

  // eval-gen
  auto* eval_gen = app.add_subcommand("eval-gen", "generation metrics against a real corpus");
  std::string real_dir, generated_dir, embeddings_path;
  eval_gen->add_option("--real", real_dir, "real corpus directory")->check(CLI::ExistingDirectory);
  eval_gen->add_option("--generated", generated_dir, "generated corpus directory")
      ->check(CLI::ExistingDirectory);
  eval_gen->add_option("--embeddings", embeddings_path,
                       "container with real_motion, generated_motion, generated_text")
      ->check(CLI::ExistingFile);
  eval_gen->add_option("--seed", seed)->capture_default_str();
  eval_gen->add_option("-o,--out", out_path, "report file (default stdout)");
  eval_gen->callback([&] {
    char* report = nullptr;
    if (!embeddings_path.empty()) {
      check(ms_eval_embeddings(embeddings_path.c_str(), seed, &report));
    } else {
      if (real_dir.empty() || generated_dir.empty()) {
        throw CLI::ValidationError("--real and --generated are required without --embeddings");
      }
      const Skeleton s = load_skeleton(skeleton_spec);
      check(ms_eval_generation(real_dir.c_str(), generated_dir.c_str(), s.get(), seed, &report));
    }
    write_text(out_path, take(report));
  });

  // eval-track
  auto* eval_track = app.add_subcommand("eval-track", "tracking metrics of policy clips");
  std::vector<std::string> policy_paths, reference_paths;
  double threshold = 0.3;
  eval_track->add_option("--policy", policy_paths, "policy clips")->required()->check(CLI::ExistingFile);
  eval_track->add_option("--reference", reference_paths, "reference clips, in the same order")
      ->required()
      ->check(CLI::ExistingFile);
  eval_track->add_option("--threshold", threshold, "success threshold (m)")->capture_default_str();
  eval_track->add_option("-o,--out", out_path, "report file (default stdout)");
  eval_track->callback([&] {
    if (policy_paths.size() != reference_paths.size()) {
      throw CLI::ValidationError("--policy and --reference need the same number of clips");
    }
    const Skeleton s = load_skeleton(skeleton_spec);
    std::vector<Clip> clips;
    std::vector<const ms_clip*> policy, reference;
    for (std::size_t i = 0; i < policy_paths.size(); ++i) {
      clips.push_back(load_clip(policy_paths[i], s.get()));
      policy.push_back(clips.back().get());
      clips.push_back(load_clip(reference_paths[i], s.get()));
      reference.push_back(clips.back().get());
    }
    char* report = nullptr;
    check(ms_eval_tracking(policy.data(), reference.data(), policy.size(), s.get(), threshold,
                           &report));
    write_text(out_path, take(report));
  });

  // serve
  auto* serve = app.add_subcommand("serve", "stream generated motion over TCP");
  GeneratorArgs serve_gen;
  serve_gen.add_to(serve);
  ms_server_config server_cfg = ms_server_config_default();
  std::string host = server_cfg.host, idle = server_cfg.idle_command, session_log;
  double serve_seconds = 0.0;
  serve->add_option("--host", host, "listen address")->envname("MOTIONSTREAM_HOST")->capture_default_str();
  serve->add_option("--port", server_cfg.port, "listen port (0 picks one)")
      ->envname("MOTIONSTREAM_PORT")
      ->capture_default_str();
  serve->add_option("--frame-rate", server_cfg.frame_rate)->capture_default_str();
  serve->add_option("--idle", idle, "idle command")->capture_default_str();
  serve->add_option("--seed", server_cfg.seed)->capture_default_str();
  serve->add_option("--session-log", session_log, "session log file (JSON lines)")
      ->envname("MOTIONSTREAM_SESSION_LOG");
  serve->add_option("--duration", serve_seconds, "stop after this many seconds (0 runs until SIGINT)")
      ->capture_default_str();
  serve->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    const Generator g = serve_gen.make();
    server_cfg.host = host.c_str();
    server_cfg.idle_command = idle.c_str();
    server_cfg.log_path = session_log.empty() ? nullptr : session_log.c_str();
    ms_server* raw = nullptr;
    check(ms_server_create(&server_cfg, s.get(), g.get(), &raw));
    const Server server(raw);
    check(ms_server_start(raw));
    std::cout << nlohmann::json{{"listening", host}, {"port", ms_server_port(raw)}}.dump()
              << std::endl;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    const auto start = std::chrono::steady_clock::now();
    while (!g_stop) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      if (serve_seconds > 0.0 &&
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >=
              serve_seconds) {
        break;
      }
    }
    check(ms_server_stop(raw));
    std::cout << nlohmann::json{{"frames", ms_server_frames_emitted(raw)},
                                {"underruns", ms_server_underruns(raw)}}
                     .dump()
              << std::endl;
  });

  // latency
  auto* latency = app.add_subcommand("latency", "latency statistics of a session log");
  long long min_events = 100;
  latency->add_option("log", in_path, "session log")->required()->check(CLI::ExistingFile);
  latency->add_option("--min-events", min_events)->capture_default_str();
  latency->callback([&] {
    char* report = nullptr;
    check(ms_latency_report(read_text(in_path).c_str(), min_events, &report));
    std::cout << take(report);
  });

  // export-skeleton
  auto* export_skel = app.add_subcommand("export-skeleton", "write the selected skeleton to a file");
  export_skel->add_option("-o,--out", out_path, "skeleton file")->required();
  export_skel->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    check(ms_skeleton_save(s.get(), out_path.c_str()));
  });

  // fk-vectors
  auto* fk = app.add_subcommand("fk-vectors", "export FK test vectors for wire clients");
  int count = 32;
  fk->add_option("--count", count)->capture_default_str();
  fk->add_option("--seed", seed)->capture_default_str();
  fk->add_option("-o,--out", out_path, "output file (default stdout)");
  fk->callback([&] {
    const Skeleton s = load_skeleton(skeleton_spec);
    char* json = nullptr;
    check(ms_fk_vectors_json(s.get(), count, seed, &json));
    write_text(out_path, take(json));
  });

  std::string command = "msctl";
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();
    error_record("usage", e.get_exit_code(), e.what(), command);
    return kExitUsage;
  } catch (const ApiFailure& f) {
    for (const auto* sub : app.get_subcommands()) command = sub->get_name();
    error_record(ms_status_name(f.status), f.status, f.message, command);
    return kExitError;
  }
  return exit_code;
}
