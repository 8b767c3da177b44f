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

#include "demotraj/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

// Noise component ids mixed into the seed.
enum Component : std::uint64_t {
  kPositionNoise = 1,
  kRotationNoise = 2,
  kDrift = 3,
  kDrops = 4,
  kMarkerDropout = 5,
  kMarkerPixels = 6,
};

std::mt19937_64 Engine(std::uint64_t seed, Component c) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(c)};
  return std::mt19937_64(seq);
}

// Segment index and local progress for time t.
std::pair<std::size_t, double> Locate(std::size_t n_waypoints, double duration, double t) {
  const double u = std::clamp(t / duration, 0.0, 1.0) * static_cast<double>(n_waypoints - 1);
  const auto idx =
      std::min(static_cast<std::size_t>(std::floor(u)), n_waypoints - 2);
  return {idx, u - static_cast<double>(idx)};
}

Vec3 RandomUnit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  while (true) {
    Vec3 v(n(rng), n(rng), n(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

}  // namespace

std::string_view to_string(Profile p) {
  return p == Profile::MinJerk ? "min_jerk" : "linear";
}

Profile profile_from_string(std::string_view name) {
  if (name == "min_jerk") return Profile::MinJerk;
  if (name == "linear") return Profile::Linear;
  throw ConfigError("unknown profile '" + std::string(name) +
                    "' (expected min_jerk or linear)");
}

double profile_value(Profile p, double tau) {
  if (p == Profile::Linear) return tau;
  const double t3 = tau * tau * tau;
  return t3 * (10.0 + tau * (-15.0 + 6.0 * tau));
}

void TrajectorySpec::validate() const {
  if (waypoints.size() < 2) throw ConfigError("trajectory needs at least 2 waypoints");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) {
    throw ConfigError("trajectory duration must be positive");
  }
  for (const Pose& p : waypoints) {
    if (!p.is_finite()) throw ConfigError("trajectory waypoint is not finite");
  }
}

Pose evaluate_trajectory(const TrajectorySpec& spec, double t) {
  const auto [idx, tau] = Locate(spec.waypoints.size(), spec.duration_s, t);
  const double s = profile_value(spec.profile, tau);
  const Pose& a = spec.waypoints[idx];
  const Pose& b = spec.waypoints[idx + 1];
  // (1 - s) a + s b reproduces both endpoints exactly.
  return {(1.0 - s) * a.position + s * b.position, slerp(a.orientation, b.orientation, s)};
}

std::vector<TimedPose> generate_truth(const TrajectorySpec& spec, double rate_hz) {
  spec.validate();
  if (!(rate_hz > 0.0)) throw ConfigError("truth rate must be positive");
  const auto last = static_cast<std::size_t>(std::floor(spec.duration_s * rate_hz + 1e-9));
  std::vector<TimedPose> out;
  out.reserve(last + 1);
  for (std::size_t k = 0; k <= last; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    out.push_back({t, evaluate_trajectory(spec, t)});
  }
  return out;
}

double evaluate_scalar_profile(std::span<const double> waypoints, double duration_s,
                               Profile profile, double t) {
  if (waypoints.empty()) throw ConfigError("scalar profile needs at least 1 waypoint");
  if (waypoints.size() == 1) return waypoints.front();
  const auto [idx, tau] = Locate(waypoints.size(), duration_s, t);
  const double s = profile_value(profile, tau);
  return (1.0 - s) * waypoints[idx] + s * waypoints[idx + 1];
}

std::size_t camera_frame_count(double end_time_s, int camera_rate_hz) {
  return static_cast<std::size_t>(std::floor(end_time_s * camera_rate_hz + 1e-9)) + 1;
}

void NoiseModel::validate() const {
  if (!(pos_sigma_m >= 0.0) || !(rot_sigma_rad >= 0.0) || !(drift_walk_sigma_m >= 0.0) ||
      !(marker_px_sigma >= 0.0)) {
    throw ConfigError("noise sigmas must be >= 0");
  }
  if (!(snap_radius_m >= 0.0)) throw ConfigError("snap_radius_m must be >= 0");
  if (!(drops.probability >= 0.0 && drops.probability <= 1.0)) {
    throw ConfigError("drop probability must lie in [0, 1]");
  }
  if (!(drops.mean_run_length >= 1.0)) throw ConfigError("mean_run_length must be >= 1");
  if (drops.level == ConfidenceLevel::High) {
    throw ConfigError("drop level must be below High");
  }
  if (!(marker_dropout >= 0.0 && marker_dropout <= 1.0)) {
    throw ConfigError("marker_dropout must lie in [0, 1]");
  }
}

SimStreams sample_streams(std::span<const TimedPose> truth, int pose_rate_hz,
                          int camera_rate_hz, const NoiseModel& noise,
                          const GripperCalib& calib,
                          std::span<const double> width_truth_mm, std::uint64_t seed) {
  noise.validate();
  calib.validate();
  if (truth.empty()) throw InputError("sample_streams: empty truth");
  if (pose_rate_hz < 1 || camera_rate_hz < 1) throw ConfigError("rates must be >= 1 Hz");
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double grid = static_cast<double>(k) / pose_rate_hz;
    if (std::abs(truth[k].t - grid) > 1e-9) {
      throw InputError("truth sample " + std::to_string(k) + " is off the pose grid");
    }
  }
  const std::size_t n_frames = camera_frame_count(truth.back().t, camera_rate_hz);
  if (width_truth_mm.size() != n_frames) {
    throw InputError("width truth has " + std::to_string(width_truth_mm.size()) +
                     " values, expected " + std::to_string(n_frames));
  }

  SimStreams out;
  const std::size_t n = truth.size();
  out.truth.reserve(n);
  out.poses.reserve(n);

  auto pos_rng = Engine(seed, kPositionNoise);
  auto rot_rng = Engine(seed, kRotationNoise);
  auto drift_rng = Engine(seed, kDrift);
  std::normal_distribution<double> pos_n(0.0, noise.pos_sigma_m / std::sqrt(3.0));
  std::normal_distribution<double> rot_n(0.0, noise.rot_sigma_rad);
  std::normal_distribution<double> drift_n(0.0, noise.drift_walk_sigma_m);

  const Vec3 start = truth.front().pose.position;
  Vec3 bias = Vec3::Zero();
  bool left_start = false;
  for (std::size_t k = 0; k < n; ++k) {
    const Pose& tp = truth[k].pose;
    out.truth.push_back({truth[k].t, tp, ConfidenceLevel::High, false});

    if (k > 0 && noise.drift_walk_sigma_m > 0.0) {
      bias += Vec3(drift_n(drift_rng), drift_n(drift_rng), drift_n(drift_rng));
    }
    if (noise.snap_back) {
      const double r = (tp.position - start).norm();
      if (r > noise.snap_radius_m) {
        left_start = true;
      } else if (left_start) {
        bias.setZero();
      }
    }
    Pose p = tp;
    if (noise.pos_sigma_m > 0.0) {
      p.position += Vec3(pos_n(pos_rng), pos_n(pos_rng), pos_n(pos_rng));
    }
    p.position += bias;
    if (noise.rot_sigma_rad > 0.0) {
      const Vec3 axis = RandomUnit(rot_rng);
      p.orientation = p.orientation * UnitQuaternion::from_axis_angle(axis, rot_n(rot_rng));
    }
    out.poses.push_back({truth[k].t, p, ConfidenceLevel::High, false});
  }

  if (noise.drops.probability > 0.0 && n > 2) {
    auto drop_rng = Engine(seed, kDrops);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::geometric_distribution<int> extra(1.0 / noise.drops.mean_run_length);
    for (std::size_t i = 1; i + 1 < n;) {
      if (u(drop_rng) < noise.drops.probability) {
        const auto len = 1 + static_cast<std::size_t>(extra(drop_rng));
        const std::size_t end = std::min(i + len, n - 1);
        for (std::size_t j = i; j < end; ++j) out.poses[j].confidence = noise.drops.level;
        i = end + 1;
      } else {
        ++i;
      }
    }
  }

  auto dropout_rng = Engine(seed, kMarkerDropout);
  auto pixel_rng = Engine(seed, kMarkerPixels);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> px_n(0.0, noise.marker_px_sigma);
  out.frames.reserve(n_frames);
  out.frame_width_mm.assign(width_truth_mm.begin(), width_truth_mm.end());
  for (std::size_t j = 0; j < n_frames; ++j) {
    CameraSample frame;
    frame.t = static_cast<double>(j) / camera_rate_hz;
    frame.frame_index = static_cast<std::int64_t>(j);
    char ref[32];
    std::snprintf(ref, sizeof ref, "frame_%06zu.jpg", j);
    frame.image_ref = ref;
    const double half = 0.5 * distance_from_width(width_truth_mm[j], calib);
    const MarkerDetection markers[2] = {
        {calib.left_id, calib.axis_u_px - half, noise.marker_v_px},
        {calib.right_id, calib.axis_u_px + half, noise.marker_v_px}};
    for (MarkerDetection m : markers) {
      const bool dropped = noise.marker_dropout > 0.0 && u(dropout_rng) < noise.marker_dropout;
      if (noise.marker_px_sigma > 0.0) m.u += px_n(pixel_rng);
      if (!dropped) frame.detections.push_back(m);
    }
    out.frames.push_back(std::move(frame));
  }
  return out;
}

void GeneratorSpec::validate() const {
  trajectory.validate();
  noise.validate();
  calib.validate();
  if (width_waypoints_mm.empty()) throw ConfigError("width_waypoints_mm must not be empty");
  for (double w : width_waypoints_mm) {
    if (!(w >= 0.0 && w <= calib.g_max_mm)) {
      throw ConfigError("width waypoint " + std::to_string(w) + " outside [0, g_max_mm]");
    }
  }
  if (pose_rate_hz < 1 || camera_rate_hz < 1) throw ConfigError("rates must be >= 1 Hz");
}

SimStreams generate(const GeneratorSpec& spec, std::uint64_t seed) {
  spec.validate();
  const auto truth = generate_truth(spec.trajectory, spec.pose_rate_hz);
  const std::size_t n_frames = camera_frame_count(truth.back().t, spec.camera_rate_hz);
  std::vector<double> widths(n_frames);
  for (std::size_t j = 0; j < n_frames; ++j) {
    const double t = static_cast<double>(j) / spec.camera_rate_hz;
    widths[j] = evaluate_scalar_profile(spec.width_waypoints_mm, spec.trajectory.duration_s,
                                        spec.trajectory.profile, t);
  }
  return sample_streams(truth, spec.pose_rate_hz, spec.camera_rate_hz, spec.noise,
                        spec.calib, widths, seed);
}

void inject_step(std::span<PoseSample> poses, std::size_t index, const Vec3& offset) {
  if (index >= poses.size()) throw InputError("inject_step index out of range");
  for (std::size_t i = index; i < poses.size(); ++i) poses[i].pose.position += offset;
}

}  // namespace demotraj
