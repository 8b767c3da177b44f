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

// End-to-end processing of one recording.
//
// Stages, in order:
//   environment  share of High-confidence poses           (gate)
//   repair       interpolation of low-confidence poses    (gate)
//   sync         decimation and nearest pose pairing
//   transform    tracker poses to TCP poses in the base frame
//   smoothness   velocity/acceleration/rotation limits on the synced TCP (gate)
//   drift        endpoint check against the initial pose  (advisory)
//   widths       gripper opening per synced frame
//   ik           joint trajectory, joint output mode only
//   assemble     episode arrays
//
// A failed gate or stage stops the run; the result then names the stage and
// carries everything computed so far.

#ifndef DEMOTRAJ_PIPELINE_HPP_
#define DEMOTRAJ_PIPELINE_HPP_

#include <exception>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "demotraj/compensation.hpp"
#include "demotraj/config.hpp"
#include "demotraj/dataset.hpp"
#include "demotraj/kinematics.hpp"
#include "demotraj/quality.hpp"
#include "demotraj/records.hpp"
#include "demotraj/sync.hpp"

namespace demotraj {

// TCP pose in the base frame for one tracker reading.
Pose tracker_to_tcp(const PipelineConfig& cfg, const Pose& tracker);
std::vector<Pose> tracker_to_tcp(const PipelineConfig& cfg, std::span<const Pose> tracker);

// Width per frame from marker detections, gaps imputed.
WidthSeries frame_widths(std::span<const CameraSample> frames, const GripperCalib& calib,
                         ImputeMethod method);

struct PipelineResult {
  QualityReport quality;
  std::optional<SyncStats> sync;
  std::vector<SyncedFrame> synced;
  std::vector<Pose> tcp;
  std::optional<WidthSeries> widths;
  std::optional<JointTrajectory> joints;
  std::optional<Episode> episode;

  std::string failed_stage;  // empty on success
  std::string failure;
  bool gate_failure = false;  // a quality gate, as opposed to a processing error
  std::exception_ptr error;   // the underlying exception, if any

  bool ok() const { return episode.has_value(); }
};

// `chain` is loaded from cfg.chain_path when null and the output mode needs it.
// Throws ConfigError on configuration problems only.
PipelineResult run_pipeline(const PipelineConfig& cfg, std::span<const PoseSample> poses,
                            std::span<const CameraSample> frames,
                            const KinematicChain* chain = nullptr);

// Absolute TCP poses of a TCP-representation episode. Throws InputError for
// joint episodes.
std::vector<Pose> episode_tcp(const Episode& ep);

struct CompensationFrame {
  std::size_t index = 0;
  double width_m = 0.0;
  double distance_m = 0.0;
  Vec3 displacement = Vec3::Zero();
  std::optional<JointVector> theta;  // absent when IK failed
  double position_residual = 0.0;
  double rotation_residual = 0.0;
};

struct CompensationSummary {
  std::vector<CompensationFrame> frames;
  std::vector<std::size_t> failed_frames;
  std::vector<std::size_t> clamped_frames;  // width outside [0, w_max]
  double min_displacement_m = 0.0;
  double max_displacement_m = 0.0;
  double mean_displacement_m = 0.0;
};

// Per-frame compensated IK, warm-started from the previous solution (or the
// seed after a failure). Widths come from the episode's gripper_width in mm.
// Throws SchemaError when the episode has no widths.
CompensationSummary compensate_episode(const Episode& ep, const KinematicChain& chain,
                                       const CompensationParams& params,
                                       const JointVector& seed, const IkConfig& ik,
                                       WidthRangePolicy policy = WidthRangePolicy::Clamp);

nlohmann::json to_json(const CompensationSummary& summary);

struct SweepRow {
  double width_m = 0.0;
  double distance_m = 0.0;
  Pose corrected;
};

// `steps` + 1 evenly spaced widths over [0, w_max] applied to `pose`.
std::vector<SweepRow> compensation_sweep(const Pose& pose, const CompensationParams& params,
                                         std::size_t steps);

// Nearest-in-time truth sample for each query time, as in stream pairing.
// Throws InputError when a query lies farther than max_offset_s from every
// truth sample.
std::vector<Pose> match_by_time(std::span<const double> query_times,
                                std::span<const PoseSample> truth, double max_offset_s);

}  // namespace demotraj

#endif  // DEMOTRAJ_PIPELINE_HPP_
