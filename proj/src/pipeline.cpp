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

#include "demotraj/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

void Fail(PipelineResult& r, const char* stage, bool gate, const std::string& message) {
  r.failed_stage = stage;
  r.gate_failure = gate;
  r.failure = message;
  r.error = std::current_exception();
}

}  // namespace

Pose tracker_to_tcp(const PipelineConfig& cfg, const Pose& tracker) {
  const Pose camera =
      cfg.base_rotation
          ? camera_pose_in_base(cfg.base_gripper, cfg.camera_offset, tracker, *cfg.base_rotation)
          : camera_pose_in_base(cfg.base_gripper, cfg.camera_offset, tracker);
  return tcp_from_camera(camera, cfg.camera_offset);
}

std::vector<Pose> tracker_to_tcp(const PipelineConfig& cfg, std::span<const Pose> tracker) {
  std::vector<Pose> out;
  out.reserve(tracker.size());
  for (const Pose& p : tracker) out.push_back(tracker_to_tcp(cfg, p));
  return out;
}

WidthSeries frame_widths(std::span<const CameraSample> frames, const GripperCalib& calib,
                         ImputeMethod method) {
  std::vector<std::optional<WidthSample>> raw;
  raw.reserve(frames.size());
  for (const auto& f : frames) {
    try {
      raw.push_back(width_from_frame(f.detections, calib));
    } catch (const DetectionError& e) {
      throw DetectionError("frame " + std::to_string(f.frame_index) + ": " + e.what());
    }
  }
  return impute_series(raw, method);
}

PipelineResult run_pipeline(const PipelineConfig& cfg, std::span<const PoseSample> poses,
                            std::span<const CameraSample> frames,
                            const KinematicChain* chain) {
  cfg.validate();
  PipelineResult r;

  std::optional<ParsedChain> loaded;
  if (cfg.output_mode == Representation::Joint && chain == nullptr) {
    try {
      loaded = load_chain(cfg.chain_path);
    } catch (const Error& e) {
      throw ConfigError("chain '" + cfg.chain_path.string() + "': " + e.what());
    }
    chain = &loaded->chain;
  }

  try {
    r.quality = validate_environment(poses, cfg.quality);
  } catch (const Error& e) {
    Fail(r, "environment", true, e.what());
    return r;
  }
  if (r.quality.verdict == Verdict::Fail) {
    Fail(r, "environment", true,
         "High-confidence share " + std::to_string(r.quality.high_fraction) +
             " below threshold " + std::to_string(cfg.quality.high_conf_fraction));
    return r;
  }

  RepairResult repaired;
  try {
    repaired = repair_low_confidence(poses);
  } catch (const Error& e) {
    Fail(r, "repair", true, e.what());
    r.quality.verdict = Verdict::Fail;
    return r;
  }
  r.quality.repaired_indices = repaired.repaired_indices;

  try {
    SyncResult synced = subsample_and_pair(frames, repaired.poses, cfg.sync);
    r.sync = synced.stats;
    r.synced = std::move(synced.frames);
    if (r.synced.empty()) throw InputError("no synchronized frames");
  } catch (const Error& e) {
    Fail(r, "sync", false, e.what());
    return r;
  }

  r.tcp.reserve(r.synced.size());
  for (const auto& f : r.synced) r.tcp.push_back(tracker_to_tcp(cfg, f.pose.pose));

  if (r.tcp.size() >= 3) {
    std::vector<double> times;
    times.reserve(r.synced.size());
    for (const auto& f : r.synced) times.push_back(f.tick_time);
    try {
      r.quality.violations = smoothness_check(times, r.tcp, cfg.quality);
    } catch (const Error& e) {
      Fail(r, "smoothness", true, e.what());
      r.quality.verdict = Verdict::Fail;
      return r;
    }
  }
  {
    std::vector<Pose> tracker;
    tracker.reserve(repaired.poses.size());
    for (const auto& p : repaired.poses) tracker.push_back(p.pose);
    r.quality.drift = drift_check(tracker, tracker.front(), cfg.drift.align_tol_m,
                                  cfg.drift.closure_tol_m);
  }
  update_verdict(r.quality, cfg.quality);
  if (r.quality.verdict == Verdict::Fail) {
    Fail(r, "smoothness", true,
         std::to_string(r.quality.violations.size()) + " smoothness violation(s)");
    return r;
  }

  if (cfg.gripper) {
    std::vector<CameraSample> cams;
    cams.reserve(r.synced.size());
    for (const auto& f : r.synced) cams.push_back(f.camera);
    try {
      r.widths = frame_widths(cams, *cfg.gripper, cfg.impute);
    } catch (const Error& e) {
      Fail(r, "widths", false, e.what());
      return r;
    }
  }

  std::vector<JointVector> joints;
  if (cfg.output_mode == Representation::Joint) {
    const JointVector seed = cfg.home_posture.value_or(
        JointVector::Zero(static_cast<Eigen::Index>(chain->dof())));
    try {
      r.joints = joint_trajectory(*chain, r.tcp, seed, cfg.ik);
    } catch (const UnreachableTargetError& e) {
      Fail(r, "ik", false,
           e.frame() ? "frame " + std::to_string(*e.frame()) + ": " + e.what() : e.what());
      return r;
    } catch (const Error& e) {
      Fail(r, "ik", false, e.what());
      return r;
    }
    joints = r.joints->joints;
  }

  try {
    AssemblyInput in;
    in.synced = r.synced;
    in.tcp = r.tcp;
    in.joints = joints;
    in.widths = r.widths ? &*r.widths : nullptr;
    in.mode = cfg.output_mode;
    in.camera_name = cfg.camera_name;
    r.episode = assemble(in);
  } catch (const Error& e) {
    Fail(r, "assemble", false, e.what());
    return r;
  }
  return r;
}

std::vector<Pose> episode_tcp(const Episode& ep) {
  if (ep.qpos.cols() != static_cast<Eigen::Index>(kRowWidth)) {
    throw InputError("qpos must have 7 columns");
  }
  std::vector<Pose> rows;
  rows.reserve(ep.length());
  for (Eigen::Index i = 0; i < ep.qpos.rows(); ++i) {
    rows.push_back(Pose::from_row(std::span<const double, 7>(ep.qpos.row(i).data(), 7)));
  }
  switch (ep.representation) {
    case Representation::TcpAbsolute:
      return rows;
    case Representation::TcpRelative: {
      if (!ep.initial_pose) throw InputError("tcp_relative episode lacks initial_pose");
      std::vector<RelativePose> steps;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        steps.push_back({rows[i].position, rows[i].orientation});
      }
      return integrate_relative(*ep.initial_pose, steps);
    }
    case Representation::Joint:
      break;
  }
  throw InputError("episode holds joint angles, not TCP poses");
}

CompensationSummary compensate_episode(const Episode& ep, const KinematicChain& chain,
                                       const CompensationParams& params,
                                       const JointVector& seed, const IkConfig& ik,
                                       WidthRangePolicy policy) {
  params.validate();
  if (!ep.gripper_width) {
    throw SchemaError("/observations/gripper_width", "required for compensation");
  }
  const std::vector<Pose> tcp = episode_tcp(ep);
  if (ep.gripper_width->size() != tcp.size()) {
    throw SchemaError("/observations/gripper_width", "length differs from qpos");
  }
  CompensationSummary out;
  out.min_displacement_m = std::numeric_limits<double>::infinity();
  JointVector warm = seed;
  double total = 0.0;
  for (std::size_t i = 0; i < tcp.size(); ++i) {
    CompensationFrame f;
    f.index = i;
    f.width_m = (*ep.gripper_width)[i] / 1000.0;
    if (!width_in_range(f.width_m, params)) out.clamped_frames.push_back(i);
    f.distance_m = compensation_distance(f.width_m, params, policy);
    const Pose target = corrected_tcp(tcp[i], f.distance_m);
    f.displacement = target.position - tcp[i].position;
    try {
      const IkResult res = solve_ik(chain, target, warm, ik);
      f.theta = res.theta;
      f.position_residual = res.position_residual;
      f.rotation_residual = res.rotation_residual;
      warm = res.theta;
    } catch (const UnreachableTargetError& e) {
      f.position_residual = e.position_residual();
      f.rotation_residual = e.rotation_residual();
      out.failed_frames.push_back(i);
      warm = seed;
    } catch (const NumericalError&) {
      f.position_residual = std::numeric_limits<double>::quiet_NaN();
      f.rotation_residual = std::numeric_limits<double>::quiet_NaN();
      out.failed_frames.push_back(i);
      warm = seed;
    }
    const double mag = f.displacement.norm();
    out.min_displacement_m = std::min(out.min_displacement_m, mag);
    out.max_displacement_m = std::max(out.max_displacement_m, mag);
    total += mag;
    out.frames.push_back(std::move(f));
  }
  out.mean_displacement_m = total / static_cast<double>(tcp.size());
  return out;
}

nlohmann::json to_json(const CompensationSummary& summary) {
  return {{"frames", summary.frames.size()},
          {"failed_frames", summary.failed_frames},
          {"clamped_frames", summary.clamped_frames},
          {"displacement_m",
           {{"min", summary.min_displacement_m},
            {"max", summary.max_displacement_m},
            {"mean", summary.mean_displacement_m}}}};
}

std::vector<SweepRow> compensation_sweep(const Pose& pose, const CompensationParams& params,
                                         std::size_t steps) {
  params.validate();
  if (steps == 0) throw InputError("compensation sweep needs at least 1 step");
  std::vector<SweepRow> rows;
  rows.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double w = k == steps ? params.w_max
                                : params.w_max * static_cast<double>(k) /
                                      static_cast<double>(steps);
    const double d = compensation_distance(w, params);
    rows.push_back({w, d, corrected_tcp(pose, d)});
  }
  return rows;
}

std::vector<Pose> match_by_time(std::span<const double> query_times,
                                std::span<const PoseSample> truth, double max_offset_s) {
  if (truth.empty()) throw InputError("match_by_time: empty truth");
  std::vector<Pose> out;
  out.reserve(query_times.size());
  std::size_t j = 0;
  for (std::size_t i = 0; i < query_times.size(); ++i) {
    const double t = query_times[i];
    if (i > 0 && !(t >= query_times[i - 1])) {
      throw InputError("match_by_time: query times must be non-decreasing");
    }
    while (j + 1 < truth.size() && std::abs(truth[j + 1].t - t) < std::abs(truth[j].t - t)) {
      ++j;
    }
    if (std::abs(truth[j].t - t) > max_offset_s) {
      throw InputError("no truth sample within " + std::to_string(max_offset_s) +
                       " s of t=" + std::to_string(t));
    }
    out.push_back(truth[j].pose);
  }
  return out;
}

}  // namespace demotraj
