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

// JSON configuration for the pipeline and the stream generator.
//
// Poses are written either as {"position": [x, y, z], "orientation_xyzw":
// [qx, qy, qz, qw]} ("rpy": [r, p, y] may replace the quaternion) or as a
// flat 7-array [x, y, z, qx, qy, qz, qw]. Unknown keys are rejected. Relative
// file paths resolve against the directory of the configuration file.
//
// Pipeline configuration keys (defaults in brackets):
//
//   base_gripper        pose of the gripper in the robot base frame at the
//                       tracker's initial pose [identity]
//   camera_offset       camera-to-gripper offset in metres [0, 0, 0]
//   base_rotation_xyzw  rotation applied to tracker orientations
//                       [base_gripper orientation]
//   sync                {pose_rate_hz [200], camera_rate_hz [60],
//                        max_pair_offset_s, target_rate_hz}
//   quality             {v_max [1.5], a_max [20], dtheta_max [0.3],
//                        high_conf_fraction [0.95], mode ["strict"],
//                        max_violations [0],
//                        drift {align_tol_m [0.01], closure_tol_m [0.05]}}
//   gripper             {d_max_px, d_min_px, g_max_mm, axis_u_px,
//                        left_id [0], right_id [1], impute ["linear"]}
//   compensation        {d_close_m, d_open_m, w_max_m}
//   chain               chain file, .urdf/.xml or native text
//   home_posture        IK seed for the first frame [zeros]
//   ik                  {max_iters, pos_tol_m, rot_tol_rad, damping,
//                        step_limit_rad, position_weight, orientation_weight}
//   output_mode         "tcp_absolute" | "tcp_relative" | "joint"
//   camera_name         ["wrist"]
//   task                ["task"]
//   episode_index       [0]
//   output_dir          ["."]
//
// Generator spec keys:
//
//   trajectory          {waypoints [pose...], duration_s, profile ["min_jerk"]}
//   width_waypoints_mm  [w...]
//   pose_rate_hz [200], camera_rate_hz [60]
//   noise               {pos_sigma_m, rot_sigma_rad, drift_walk_sigma_m,
//                        snap_back, snap_radius_m, marker_dropout,
//                        marker_px_sigma, marker_v_px,
//                        drops {probability, mean_run_length, level}}
//   gripper             as above, without impute

#ifndef DEMOTRAJ_CONFIG_HPP_
#define DEMOTRAJ_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "demotraj/compensation.hpp"
#include "demotraj/dataset.hpp"
#include "demotraj/geometry.hpp"
#include "demotraj/gripper.hpp"
#include "demotraj/kinematics.hpp"
#include "demotraj/quality.hpp"
#include "demotraj/simgen.hpp"
#include "demotraj/sync.hpp"

namespace demotraj {

struct DriftConfig {
  double align_tol_m = 0.01;
  double closure_tol_m = 0.05;
};

struct PipelineConfig {
  Pose base_gripper;
  Vec3 camera_offset = Vec3::Zero();
  std::optional<UnitQuaternion> base_rotation;
  SyncConfig sync;
  QualityThresholds quality;
  DriftConfig drift;
  std::optional<GripperCalib> gripper;
  ImputeMethod impute = ImputeMethod::Linear;
  std::optional<CompensationParams> compensation;
  std::filesystem::path chain_path;
  std::optional<JointVector> home_posture;
  IkConfig ik;
  Representation output_mode = Representation::TcpAbsolute;
  std::string camera_name = kDefaultCameraName;
  std::string task = "task";
  std::int64_t episode_index = 0;
  std::filesystem::path output_dir = ".";
  // Canonical JSON of the parsed document, the input of the digest.
  std::string canonical;

  // Throws ConfigError.
  void validate() const;
  // Hex SHA-256 of `canonical`.
  std::string digest() const;
};

Pose pose_from_json(const nlohmann::json& j, const std::string& context);
nlohmann::json pose_to_json(const Pose& p);

GripperCalib gripper_calib_from_json(const nlohmann::json& j);

// Throws ConfigError with the offending key.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
// Throws ConfigError when the file is missing or malformed.
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

GeneratorSpec generator_spec_from_json(const nlohmann::json& j);
GeneratorSpec load_generator_spec(const std::filesystem::path& path);

}  // namespace demotraj

#endif  // DEMOTRAJ_CONFIG_HPP_
