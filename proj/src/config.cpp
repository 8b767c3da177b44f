// Copyright 2026 The demotraj Authors
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

#include "demotraj/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

using nlohmann::json;

void RequireObject(const json& j, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
}

void CheckKeys(const json& j, std::initializer_list<std::string_view> allowed,
               const std::string& context) {
  RequireObject(j, context);
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(context + ": unknown key '" + key + "'");
    }
  }
}

double Number(const json& j, const std::string& context) {
  if (!j.is_number()) throw ConfigError(context + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(context + ": not finite");
  return v;
}

template <typename T>
T Integer(const json& j, const std::string& context) {
  if (!j.is_number_integer()) throw ConfigError(context + ": expected an integer");
  return j.get<T>();
}

bool Boolean(const json& j, const std::string& context) {
  if (!j.is_boolean()) throw ConfigError(context + ": expected true or false");
  return j.get<bool>();
}

std::string String(const json& j, const std::string& context) {
  if (!j.is_string()) throw ConfigError(context + ": expected a string");
  return j.get<std::string>();
}

std::vector<double> Numbers(const json& j, const std::string& context,
                            std::optional<std::size_t> size = std::nullopt) {
  if (!j.is_array()) throw ConfigError(context + ": expected an array");
  if (size && j.size() != *size) {
    throw ConfigError(context + ": expected " + std::to_string(*size) + " values");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(Number(j[i], context + "[" + std::to_string(i) + "]"));
  }
  return out;
}

Vec3 Vector3(const json& j, const std::string& context) {
  const auto v = Numbers(j, context, 3);
  return {v[0], v[1], v[2]};
}

UnitQuaternion QuaternionXyzw(const json& j, const std::string& context) {
  const auto v = Numbers(j, context, 4);
  try {
    return UnitQuaternion(v[0], v[1], v[2], v[3]);
  } catch (const InputError& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

// Applies `fn` to j[key] when present.
template <typename Fn>
void Optional(const json& j, const char* key, Fn&& fn) {
  if (auto it = j.find(key); it != j.end()) fn(*it);
}

SyncConfig SyncFromJson(const json& j, const std::string& ctx) {
  CheckKeys(j, {"pose_rate_hz", "camera_rate_hz", "max_pair_offset_s", "target_rate_hz"},
            ctx);
  SyncConfig s;
  Optional(j, "pose_rate_hz",
           [&](const json& v) { s.pose_rate_hz = Integer<int>(v, ctx + ".pose_rate_hz"); });
  Optional(j, "camera_rate_hz", [&](const json& v) {
    s.camera_rate_hz = Integer<int>(v, ctx + ".camera_rate_hz");
  });
  Optional(j, "max_pair_offset_s", [&](const json& v) {
    s.max_pair_offset_s = Number(v, ctx + ".max_pair_offset_s");
  });
  Optional(j, "target_rate_hz", [&](const json& v) {
    s.target_rate_hz = Integer<int>(v, ctx + ".target_rate_hz");
  });
  return s;
}

void QualityFromJson(const json& j, const std::string& ctx, QualityThresholds* q,
                     DriftConfig* d) {
  CheckKeys(j,
            {"v_max", "a_max", "dtheta_max", "high_conf_fraction", "mode", "max_violations",
             "drift"},
            ctx);
  Optional(j, "v_max", [&](const json& v) { q->v_max = Number(v, ctx + ".v_max"); });
  Optional(j, "a_max", [&](const json& v) { q->a_max = Number(v, ctx + ".a_max"); });
  Optional(j, "dtheta_max",
           [&](const json& v) { q->dtheta_max = Number(v, ctx + ".dtheta_max"); });
  Optional(j, "high_conf_fraction", [&](const json& v) {
    q->high_conf_fraction = Number(v, ctx + ".high_conf_fraction");
  });
  Optional(j, "mode", [&](const json& v) {
    const std::string mode = String(v, ctx + ".mode");
    if (mode == "strict") {
      q->mode = QualityMode::Strict;
    } else if (mode == "lenient") {
      q->mode = QualityMode::Lenient;
    } else {
      throw ConfigError(ctx + ".mode: expected strict or lenient");
    }
  });
  Optional(j, "max_violations", [&](const json& v) {
    q->max_violations = Integer<std::size_t>(v, ctx + ".max_violations");
  });
  Optional(j, "drift", [&](const json& dj) {
    const std::string dctx = ctx + ".drift";
    CheckKeys(dj, {"align_tol_m", "closure_tol_m"}, dctx);
    Optional(dj, "align_tol_m",
             [&](const json& v) { d->align_tol_m = Number(v, dctx + ".align_tol_m"); });
    Optional(dj, "closure_tol_m",
             [&](const json& v) { d->closure_tol_m = Number(v, dctx + ".closure_tol_m"); });
  });
}

GripperCalib CalibFromJson(const json& j, const std::string& ctx, bool allow_impute,
                           ImputeMethod* impute) {
  if (allow_impute) {
    CheckKeys(j,
              {"d_max_px", "d_min_px", "g_max_mm", "axis_u_px", "left_id", "right_id",
               "impute"},
              ctx);
  } else {
    CheckKeys(j, {"d_max_px", "d_min_px", "g_max_mm", "axis_u_px", "left_id", "right_id"},
              ctx);
  }
  GripperCalib c;
  auto need = [&](const char* key) -> const json& {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + ": missing '" + key + "'");
    return *it;
  };
  c.d_max_px = Number(need("d_max_px"), ctx + ".d_max_px");
  c.d_min_px = Number(need("d_min_px"), ctx + ".d_min_px");
  c.g_max_mm = Number(need("g_max_mm"), ctx + ".g_max_mm");
  c.axis_u_px = Number(need("axis_u_px"), ctx + ".axis_u_px");
  Optional(j, "left_id", [&](const json& v) { c.left_id = Integer<int>(v, ctx + ".left_id"); });
  Optional(j, "right_id",
           [&](const json& v) { c.right_id = Integer<int>(v, ctx + ".right_id"); });
  if (impute != nullptr) {
    Optional(j, "impute", [&](const json& v) {
      const std::string m = String(v, ctx + ".impute");
      if (m == "linear") {
        *impute = ImputeMethod::Linear;
      } else if (m == "hold") {
        *impute = ImputeMethod::Hold;
      } else {
        throw ConfigError(ctx + ".impute: expected linear or hold");
      }
    });
  }
  return c;
}

IkConfig IkFromJson(const json& j, const std::string& ctx) {
  CheckKeys(j,
            {"max_iters", "pos_tol_m", "rot_tol_rad", "damping", "step_limit_rad",
             "position_weight", "orientation_weight"},
            ctx);
  IkConfig c;
  Optional(j, "max_iters",
           [&](const json& v) { c.max_iters = Integer<int>(v, ctx + ".max_iters"); });
  Optional(j, "pos_tol_m", [&](const json& v) { c.pos_tol_m = Number(v, ctx + ".pos_tol_m"); });
  Optional(j, "rot_tol_rad",
           [&](const json& v) { c.rot_tol_rad = Number(v, ctx + ".rot_tol_rad"); });
  Optional(j, "damping", [&](const json& v) { c.damping = Number(v, ctx + ".damping"); });
  Optional(j, "step_limit_rad",
           [&](const json& v) { c.step_limit_rad = Number(v, ctx + ".step_limit_rad"); });
  Optional(j, "position_weight",
           [&](const json& v) { c.position_weight = Number(v, ctx + ".position_weight"); });
  Optional(j, "orientation_weight", [&](const json& v) {
    c.orientation_weight = Number(v, ctx + ".orientation_weight");
  });
  return c;
}

json ParseFile(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::string("cannot open ") + what + " '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace

Pose pose_from_json(const json& j, const std::string& context) {
  if (j.is_array()) {
    const auto v = Numbers(j, context, 7);
    try {
      return Pose::from_row(std::span<const double, 7>(v.data(), 7));
    } catch (const InputError& e) {
      throw ConfigError(context + ": " + e.what());
    }
  }
  CheckKeys(j, {"position", "orientation_xyzw", "rpy"}, context);
  Pose p;
  Optional(j, "position", [&](const json& v) { p.position = Vector3(v, context + ".position"); });
  if (j.contains("orientation_xyzw") && j.contains("rpy")) {
    throw ConfigError(context + ": give either orientation_xyzw or rpy");
  }
  Optional(j, "orientation_xyzw", [&](const json& v) {
    p.orientation = QuaternionXyzw(v, context + ".orientation_xyzw");
  });
  Optional(j, "rpy", [&](const json& v) {
    const Vec3 rpy = Vector3(v, context + ".rpy");
    p.orientation = UnitQuaternion::from_rpy(rpy.x(), rpy.y(), rpy.z());
  });
  return p;
}

json pose_to_json(const Pose& p) {
  const auto q = p.orientation.xyzw();
  return {{"position", {p.position.x(), p.position.y(), p.position.z()}},
          {"orientation_xyzw", {q[0], q[1], q[2], q[3]}}};
}

GripperCalib gripper_calib_from_json(const json& j) {
  return CalibFromJson(j, "gripper", false, nullptr);
}

void PipelineConfig::validate() const {
  if (!base_gripper.is_finite()) throw ConfigError("base_gripper is not finite");
  if (!camera_offset.allFinite()) throw ConfigError("camera_offset is not finite");
  sync.validate();
  quality.validate();
  if (!(drift.align_tol_m >= 0.0) || !(drift.closure_tol_m >= drift.align_tol_m)) {
    throw ConfigError("drift tolerances need 0 <= align_tol_m <= closure_tol_m");
  }
  if (gripper) gripper->validate();
  if (compensation) compensation->validate();
  ik.validate();
  if (output_mode == Representation::Joint && chain_path.empty()) {
    throw ConfigError("output_mode 'joint' requires 'chain'");
  }
  if (camera_name.empty() || camera_name.find('/') != std::string::npos) {
    throw ConfigError("camera_name must be non-empty and contain no '/'");
  }
  if (episode_index < 0) throw ConfigError("episode_index must be >= 0");
}

std::string PipelineConfig::digest() const { return sha256_hex(canonical); }

PipelineConfig pipeline_config_from_json(const json& j,
                                         const std::filesystem::path& base_dir) {
  CheckKeys(j,
            {"base_gripper", "camera_offset", "base_rotation_xyzw", "sync", "quality",
             "gripper", "compensation", "chain", "home_posture", "ik", "output_mode",
             "camera_name", "task", "episode_index", "output_dir"},
            "config");
  PipelineConfig c;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };
  Optional(j, "base_gripper",
           [&](const json& v) { c.base_gripper = pose_from_json(v, "base_gripper"); });
  Optional(j, "camera_offset",
           [&](const json& v) { c.camera_offset = Vector3(v, "camera_offset"); });
  Optional(j, "base_rotation_xyzw", [&](const json& v) {
    c.base_rotation = QuaternionXyzw(v, "base_rotation_xyzw");
  });
  Optional(j, "sync", [&](const json& v) { c.sync = SyncFromJson(v, "sync"); });
  Optional(j, "quality",
           [&](const json& v) { QualityFromJson(v, "quality", &c.quality, &c.drift); });
  Optional(j, "gripper",
           [&](const json& v) { c.gripper = CalibFromJson(v, "gripper", true, &c.impute); });
  Optional(j, "compensation", [&](const json& v) {
    CheckKeys(v, {"d_close_m", "d_open_m", "w_max_m"}, "compensation");
    CompensationParams p;
    p.d_close = Number(v.value("d_close_m", json(0.0)), "compensation.d_close_m");
    p.d_open = Number(v.value("d_open_m", json(0.0)), "compensation.d_open_m");
    if (!v.contains("w_max_m")) throw ConfigError("compensation: missing 'w_max_m'");
    p.w_max = Number(v["w_max_m"], "compensation.w_max_m");
    c.compensation = p;
  });
  Optional(j, "chain", [&](const json& v) { c.chain_path = resolve(String(v, "chain")); });
  Optional(j, "home_posture", [&](const json& v) {
    const auto q = Numbers(v, "home_posture");
    c.home_posture = Eigen::Map<const JointVector>(q.data(), static_cast<Eigen::Index>(q.size()));
  });
  Optional(j, "ik", [&](const json& v) { c.ik = IkFromJson(v, "ik"); });
  Optional(j, "output_mode", [&](const json& v) {
    c.output_mode = representation_from_string(String(v, "output_mode"));
  });
  Optional(j, "camera_name", [&](const json& v) { c.camera_name = String(v, "camera_name"); });
  Optional(j, "task", [&](const json& v) { c.task = String(v, "task"); });
  Optional(j, "episode_index", [&](const json& v) {
    c.episode_index = Integer<std::int64_t>(v, "episode_index");
  });
  Optional(j, "output_dir",
           [&](const json& v) { c.output_dir = resolve(String(v, "output_dir")); });
  c.canonical = j.dump();
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
  return pipeline_config_from_json(ParseFile(path, "config"), path.parent_path());
}

GeneratorSpec generator_spec_from_json(const json& j) {
  CheckKeys(j,
            {"trajectory", "width_waypoints_mm", "pose_rate_hz", "camera_rate_hz", "noise",
             "gripper"},
            "spec");
  GeneratorSpec s;
  if (!j.contains("trajectory")) throw ConfigError("spec: missing 'trajectory'");
  const json& tj = j["trajectory"];
  CheckKeys(tj, {"waypoints", "duration_s", "profile"}, "spec.trajectory");
  if (!tj.contains("waypoints") || !tj["waypoints"].is_array()) {
    throw ConfigError("spec.trajectory: 'waypoints' must be an array");
  }
  for (std::size_t i = 0; i < tj["waypoints"].size(); ++i) {
    s.trajectory.waypoints.push_back(pose_from_json(
        tj["waypoints"][i], "spec.trajectory.waypoints[" + std::to_string(i) + "]"));
  }
  if (!tj.contains("duration_s")) throw ConfigError("spec.trajectory: missing 'duration_s'");
  s.trajectory.duration_s = Number(tj["duration_s"], "spec.trajectory.duration_s");
  Optional(tj, "profile", [&](const json& v) {
    s.trajectory.profile = profile_from_string(String(v, "spec.trajectory.profile"));
  });
  if (!j.contains("width_waypoints_mm")) {
    throw ConfigError("spec: missing 'width_waypoints_mm'");
  }
  s.width_waypoints_mm = Numbers(j["width_waypoints_mm"], "spec.width_waypoints_mm");
  Optional(j, "pose_rate_hz",
           [&](const json& v) { s.pose_rate_hz = Integer<int>(v, "spec.pose_rate_hz"); });
  Optional(j, "camera_rate_hz",
           [&](const json& v) { s.camera_rate_hz = Integer<int>(v, "spec.camera_rate_hz"); });
  Optional(j, "noise", [&](const json& nj) {
    const std::string ctx = "spec.noise";
    CheckKeys(nj,
              {"pos_sigma_m", "rot_sigma_rad", "drift_walk_sigma_m", "snap_back",
               "snap_radius_m", "drops", "marker_dropout", "marker_px_sigma", "marker_v_px"},
              ctx);
    NoiseModel& n = s.noise;
    Optional(nj, "pos_sigma_m",
             [&](const json& v) { n.pos_sigma_m = Number(v, ctx + ".pos_sigma_m"); });
    Optional(nj, "rot_sigma_rad",
             [&](const json& v) { n.rot_sigma_rad = Number(v, ctx + ".rot_sigma_rad"); });
    Optional(nj, "drift_walk_sigma_m", [&](const json& v) {
      n.drift_walk_sigma_m = Number(v, ctx + ".drift_walk_sigma_m");
    });
    Optional(nj, "snap_back",
             [&](const json& v) { n.snap_back = Boolean(v, ctx + ".snap_back"); });
    Optional(nj, "snap_radius_m",
             [&](const json& v) { n.snap_radius_m = Number(v, ctx + ".snap_radius_m"); });
    Optional(nj, "marker_dropout",
             [&](const json& v) { n.marker_dropout = Number(v, ctx + ".marker_dropout"); });
    Optional(nj, "marker_px_sigma",
             [&](const json& v) { n.marker_px_sigma = Number(v, ctx + ".marker_px_sigma"); });
    Optional(nj, "marker_v_px",
             [&](const json& v) { n.marker_v_px = Number(v, ctx + ".marker_v_px"); });
    Optional(nj, "drops", [&](const json& dj) {
      const std::string dctx = ctx + ".drops";
      CheckKeys(dj, {"probability", "mean_run_length", "level"}, dctx);
      Optional(dj, "probability",
               [&](const json& v) { n.drops.probability = Number(v, dctx + ".probability"); });
      Optional(dj, "mean_run_length", [&](const json& v) {
        n.drops.mean_run_length = Number(v, dctx + ".mean_run_length");
      });
      Optional(dj, "level", [&](const json& v) {
        const std::string level = String(v, dctx + ".level");
        if (level == "failed") {
          n.drops.level = ConfidenceLevel::Failed;
        } else if (level == "low") {
          n.drops.level = ConfidenceLevel::Low;
        } else if (level == "medium") {
          n.drops.level = ConfidenceLevel::Medium;
        } else {
          throw ConfigError(dctx + ".level: expected failed, low or medium");
        }
      });
    });
  });
  if (!j.contains("gripper")) throw ConfigError("spec: missing 'gripper'");
  s.calib = CalibFromJson(j["gripper"], "spec.gripper", false, nullptr);
  s.validate();
  return s;
}

GeneratorSpec load_generator_spec(const std::filesystem::path& path) {
  return generator_spec_from_json(ParseFile(path, "generator spec"));
}

}  // namespace demotraj
