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

// Synthetic ground truth and sensor streams.
//
// Waypoints share the duration equally. Within a segment the progress is
// s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5 (MinJerk) or s(tau) = tau (Linear);
// position is interpolated linearly in s and orientation by slerp.
//
// Noise model:
//   pos_sigma_m         RMS of the 3-D position noise (sigma / sqrt(3) per axis)
//   rot_sigma_rad       rotation by N(0, rot_sigma) about a random unit axis
//   drift_walk_sigma_m  per-axis random-walk step of a position bias, one step
//                       per pose sample
//   snap_back           the bias is zeroed while the true position lies within
//                       snap_radius_m of its start after having left it
//   drops               runs of reduced confidence start with `probability` at
//                       each interior sample; run lengths are geometric with
//                       mean `mean_run_length`; the first and last samples are
//                       never dropped
//   marker_dropout      probability that a single marker detection is missing
//   marker_px_sigma     Gaussian pixel noise on marker u coordinates
//
// Every noise component draws from its own engine seeded from (seed, id), so
// changing one component leaves the others unchanged, and timestamps and
// counts never depend on the seed.

#ifndef DEMOTRAJ_SIMGEN_HPP_
#define DEMOTRAJ_SIMGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "demotraj/geometry.hpp"
#include "demotraj/gripper.hpp"
#include "demotraj/records.hpp"

namespace demotraj {

enum class Profile { MinJerk, Linear };
std::string_view to_string(Profile p);
// Accepts "min_jerk" and "linear"; throws ConfigError otherwise.
Profile profile_from_string(std::string_view name);

// Progress s in [0, 1] at tau in [0, 1].
double profile_value(Profile p, double tau);

struct TrajectorySpec {
  std::vector<Pose> waypoints;
  double duration_s = 0.0;
  Profile profile = Profile::MinJerk;

  // Throws ConfigError.
  void validate() const;
};

struct TimedPose {
  double t = 0.0;
  Pose pose;
};

Pose evaluate_trajectory(const TrajectorySpec& spec, double t);
// Samples at k / rate_hz for k = 0 .. floor(duration * rate_hz).
std::vector<TimedPose> generate_truth(const TrajectorySpec& spec, double rate_hz);

// Scalar counterpart of evaluate_trajectory. A single waypoint is constant.
double evaluate_scalar_profile(std::span<const double> waypoints, double duration_s,
                               Profile profile, double t);

// Frames at j / camera_rate_hz covering [0, end_time_s].
std::size_t camera_frame_count(double end_time_s, int camera_rate_hz);

struct ConfidenceDrops {
  double probability = 0.0;
  double mean_run_length = 3.0;
  ConfidenceLevel level = ConfidenceLevel::Low;
};

struct NoiseModel {
  double pos_sigma_m = 0.0;
  double rot_sigma_rad = 0.0;
  double drift_walk_sigma_m = 0.0;
  bool snap_back = false;
  double snap_radius_m = 0.02;
  ConfidenceDrops drops;
  double marker_dropout = 0.0;
  double marker_px_sigma = 0.0;
  double marker_v_px = 900.0;

  // Throws ConfigError.
  void validate() const;
};

struct SimStreams {
  std::vector<PoseSample> poses;       // noisy tracker log
  std::vector<CameraSample> frames;    // camera log with marker detections
  std::vector<PoseSample> truth;       // noiseless tracker poses
  std::vector<double> frame_width_mm;  // true opening at every frame
};

// `truth` must sit on the grid k / pose_rate_hz. `width_truth_mm` holds one
// value per camera frame (camera_frame_count of the last truth time).
SimStreams sample_streams(std::span<const TimedPose> truth, int pose_rate_hz,
                          int camera_rate_hz, const NoiseModel& noise,
                          const GripperCalib& calib,
                          std::span<const double> width_truth_mm, std::uint64_t seed);

struct GeneratorSpec {
  TrajectorySpec trajectory;
  std::vector<double> width_waypoints_mm;  // follows the trajectory profile
  int pose_rate_hz = 200;
  int camera_rate_hz = 60;
  NoiseModel noise;
  GripperCalib calib;

  // Throws ConfigError.
  void validate() const;
};

SimStreams generate(const GeneratorSpec& spec, std::uint64_t seed);

// Adds `offset` to every sample from `index` on, a position step whose only
// velocity exceedance is at `index`.
void inject_step(std::span<PoseSample> poses, std::size_t index, const Vec3& offset);

}  // namespace demotraj

#endif  // DEMOTRAJ_SIMGEN_HPP_
