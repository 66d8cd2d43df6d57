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

#include "motionstream/wire.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

namespace motionstream {

using nlohmann::json;

namespace {

json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

json quat_json(const Quat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

json skeleton_json(const SkeletonSpec& s) {
  json joints = json::array();
  for (const auto& j : s.joints) {
    joints.push_back({{"name", j.name},
                      {"parent", j.parent},
                      {"axis", vec_json(j.axis)},
                      {"offset", vec_json(j.offset)}});
  }
  json mirror = json::array();
  for (const auto& m : s.mirror) mirror.push_back({{"index", m.index}, {"sign", m.sign}});
  return {{"name", s.name},
          {"joints", std::move(joints)},
          {"ankles", {s.ankle_joints[0], s.ankle_joints[1]}},
          {"mirror", std::move(mirror)}};
}

Vec3 vec3_from(const json& j, const char* what) {
  require(j.is_array() && j.size() == 3, ErrorCode::kFormat, std::string(what) + " needs 3 numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

SkeletonSpec skeleton_from(const json& j) {
  SkeletonSpec s;
  try {
    s.name = j.at("name").get<std::string>();
    for (const auto& jj : j.at("joints")) {
      s.joints.push_back({jj.at("name").get<std::string>(), jj.at("parent").get<int>(),
                          vec3_from(jj.at("axis"), "joint axis"),
                          vec3_from(jj.at("offset"), "joint offset")});
    }
    const auto& ankles = j.at("ankles");
    require(ankles.size() == 2, ErrorCode::kFormat, "skeleton needs two ankle joints");
    s.ankle_joints = {ankles[0].get<int>(), ankles[1].get<int>()};
    for (const auto& m : j.at("mirror")) {
      s.mirror.push_back({m.at("index").get<int>(), m.at("sign").get<double>()});
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed skeleton description: ") + e.what());
  }
  s.validate();
  return s;
}

json parse_line(std::string_view line) {
  require(line.size() <= kMaxLineBytes, ErrorCode::kFormat,
          "message exceeds " + std::to_string(kMaxLineBytes) + " bytes");
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("message is not valid JSON: ") + e.what());
  }
  require(j.is_object(), ErrorCode::kFormat, "message must be a JSON object");
  require(j.contains("type") && j["type"].is_string(), ErrorCode::kFormat,
          "message has no string \"type\" field");
  return j;
}

// Invalid UTF-8 (possible in echoed parser diagnostics) is replaced, not thrown.
std::string line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n"; }

}  // namespace

std::string skeleton_to_json(const SkeletonSpec& skeleton) { return skeleton_json(skeleton).dump(); }

SkeletonSpec skeleton_from_json(std::string_view text) {
  try {
    return skeleton_from(json::parse(text));
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("skeleton description is not valid JSON: ") + e.what());
  }
}

std::string hello_message(const SkeletonSpec& skeleton, const HelloInfo& info) {
  return line({{"type", "hello"},
               {"protocol_version", kProtocolVersion},
               {"frame_rate", info.frame_rate},
               {"block_frames", info.block_frames},
               {"idle_command", info.idle_command},
               {"n_q", skeleton.num_dofs()},
               {"n_c", kNumContacts},
               {"skeleton", skeleton_json(skeleton)}});
}

std::string frame_message(const FrameMessage& m) {
  const auto& f = m.frame.frame;
  require(f.p.allFinite() && f.R.coeffs().allFinite() && f.q.allFinite(), ErrorCode::kNumerical,
          "frame " + std::to_string(m.frame_index) + " has non-finite values");
  return line({{"type", "frame"},
               {"frame_index", m.frame_index},
               {"time_ms", m.time_ms},
               {"root_position", vec_json(f.p)},
               {"root_quaternion", quat_json(f.R)},
               {"q", vec_json(f.q)},
               {"contacts", f.c},
               {"active_command", m.frame.command},
               {"motion_index", m.frame.motion_index},
               {"held", m.held}});
}

std::string pong_message(std::string_view nonce, double server_time_ms) {
  return line({{"type", "pong"}, {"nonce", json::parse(nonce)}, {"server_time_ms", server_time_ms}});
}

std::string status_message(const StatusInfo& s) {
  return line({{"type", "status"},
               {"buffer_depth", s.buffer_depth},
               {"underruns", s.underruns},
               {"overruns", s.overruns},
               {"generator_period_ms", s.generator_period_ms},
               {"frame_index", s.frame_index}});
}

std::string error_message(ErrorCode code, std::string_view message) {
  return line({{"type", "error"},
               {"code", error_code_name(code)},
               {"message", std::string(message)}});
}

InboundMessage parse_inbound(std::string_view text) {
  const json j = parse_line(text);
  const std::string type = j["type"].get<std::string>();
  InboundMessage m;
  if (type == "command") {
    m.type = InboundMessage::Type::kCommand;
    require(j.contains("text") && j["text"].is_string(), ErrorCode::kFormat,
            "command needs a string \"text\" field");
    m.text = j["text"].get<std::string>();
    const auto first = m.text.find_first_not_of(" \t\r\n");
    require(first != std::string::npos, ErrorCode::kFormat, "command text is empty");
    m.text = m.text.substr(first, m.text.find_last_not_of(" \t\r\n") - first + 1);
    if (j.contains("client_time_ms")) {
      require(j["client_time_ms"].is_number(), ErrorCode::kFormat,
              "client_time_ms must be a number");
      m.client_time_ms = j["client_time_ms"].get<double>();
    }
  } else if (type == "ping") {
    m.type = InboundMessage::Type::kPing;
    require(j.contains("nonce") && (j["nonce"].is_string() || j["nonce"].is_number()),
            ErrorCode::kFormat, "ping needs a string or number \"nonce\"");
    m.nonce = j["nonce"].dump();
  } else {
    fail(ErrorCode::kFormat, "unknown message type '" + type + "'");
  }
  return m;
}

std::string message_type(std::string_view text) { return parse_line(text)["type"].get<std::string>(); }

FrameMessage parse_frame_message(std::string_view text) {
  const json j = parse_line(text);
  require(j["type"] == "frame", ErrorCode::kFormat, "not a frame message");
  FrameMessage m;
  try {
    m.frame_index = j.at("frame_index").get<long long>();
    m.time_ms = j.at("time_ms").get<double>();
    auto& f = m.frame.frame;
    f.p = vec3_from(j.at("root_position"), "root_position");
    const auto& q = j.at("root_quaternion");
    require(q.size() == 4, ErrorCode::kFormat, "root_quaternion needs 4 numbers");
    f.R = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
    const auto angles = j.at("q").get<std::vector<double>>();
    f.q = Eigen::Map<const Eigen::VectorXd>(angles.data(), static_cast<Eigen::Index>(angles.size()));
    f.c = j.at("contacts").get<std::vector<std::uint8_t>>();
    m.frame.command = j.at("active_command").get<std::string>();
    m.frame.motion_index = j.at("motion_index").get<long long>();
    m.held = j.at("held").get<bool>();
  } catch (const json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed frame message: ") + e.what());
  }
  return m;
}

SkeletonSpec parse_hello_skeleton(std::string_view text) {
  const json j = parse_line(text);
  require(j["type"] == "hello", ErrorCode::kFormat, "not a hello message");
  require(j.value("protocol_version", 0) == kProtocolVersion, ErrorCode::kVersionMismatch,
          "server protocol version differs from " + std::to_string(kProtocolVersion));
  require(j.contains("skeleton"), ErrorCode::kFormat, "hello carries no skeleton");
  return skeleton_from(j["skeleton"]);
}

std::string export_fk_vectors(const SkeletonSpec& skeleton, int count, std::uint64_t seed) {
  require(count >= 1, ErrorCode::kInvalidArgument, "need at least one FK test vector");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-1.5, 1.5), pos(-2.0, 2.0);
  std::normal_distribution<double> normal;
  json cases = json::array();
  for (int i = 0; i < count; ++i) {
    const Vec3 p(pos(rng), pos(rng), 0.5 + 0.25 * pos(rng));
    Quat r(normal(rng), normal(rng), normal(rng), normal(rng));
    r.normalize();
    Eigen::VectorXd q(skeleton.num_dofs());
    for (Eigen::Index k = 0; k < q.size(); ++k) q[k] = angle(rng);
    const BodyPose body = forward_kinematics(skeleton, p, r, q);
    json positions = json::array(), orientations = json::array();
    for (std::size_t l = 0; l < body.link_positions.size(); ++l) {
      positions.push_back(vec_json(body.link_positions[l]));
      orientations.push_back(quat_json(body.link_orientations[l]));
    }
    cases.push_back({{"root_position", vec_json(p)},
                     {"root_quaternion", quat_json(r)},
                     {"q", vec_json(q)},
                     {"link_positions", std::move(positions)},
                     {"link_orientations", std::move(orientations)}});
  }
  return json({{"version", 1},
               {"tolerance", 1e-6},
               {"skeleton", skeleton_json(skeleton)},
               {"cases", std::move(cases)}})
      .dump(1);
}

}  // namespace motionstream
