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

#include "demotraj/quality.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "demotraj/error.hpp"
#include "demotraj/simgen.hpp"
#include "test_util.hpp"

namespace demotraj {
namespace {

using testing::MakePose;
using testing::Rz;

std::vector<PoseSample> Stream(std::size_t n, std::size_t high) {
  std::vector<PoseSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].t = i * 0.005;
    out[i].confidence = i < high ? ConfidenceLevel::High : ConfidenceLevel::Low;
  }
  return out;
}

TEST(ValidateEnvironmentTest, HighShareThreshold) {
  const QualityThresholds thr;
  const QualityReport pass = validate_environment(Stream(100, 96), thr);
  EXPECT_DOUBLE_EQ(pass.high_fraction, 0.96);
  EXPECT_EQ(pass.verdict, Verdict::Pass);
  EXPECT_EQ(validate_environment(Stream(100, 94), thr).verdict, Verdict::Fail);
  EXPECT_EQ(validate_environment(Stream(100, 95), thr).verdict, Verdict::Pass);
  const QualityReport all = validate_environment(Stream(10, 10), thr);
  EXPECT_DOUBLE_EQ(all.high_fraction, 1.0);
  EXPECT_EQ(all.verdict, Verdict::Pass);
}

TEST(ValidateEnvironmentTest, EmptyStreamIsAnError) {
  EXPECT_THROW(validate_environment({}, QualityThresholds{}), ValidationError);
}

TEST(ConfidenceTest, TotalOrder) {
  EXPECT_LT(ConfidenceLevel::Failed, ConfidenceLevel::Low);
  EXPECT_LT(ConfidenceLevel::Low, ConfidenceLevel::Medium);
  EXPECT_LT(ConfidenceLevel::Medium, ConfidenceLevel::High);
  EXPECT_EQ(confidence_from_int(2), ConfidenceLevel::Medium);
  EXPECT_FALSE(confidence_from_int(4).has_value());
  EXPECT_FALSE(confidence_from_int(-1).has_value());
}

TEST(RepairTest, LinearMidpoint) {
  std::vector<PoseSample> s(3);
  for (int i = 0; i < 3; ++i) s[i].t = i * 0.005;
  s[2].pose.position = Vec3(0, 0, 0.1);
  s[1].pose.position = Vec3(5, 5, 5);
  s[1].confidence = ConfidenceLevel::Low;
  const RepairResult r = repair_low_confidence(s);
  EXPECT_VEC3_NEAR(r.poses[1].pose.position, Vec3(0, 0, 0.05), 1e-15);
  EXPECT_TRUE(r.poses[1].repaired);
  EXPECT_EQ(r.poses[1].confidence, ConfidenceLevel::High);
  EXPECT_EQ(r.repaired_indices, (std::vector<std::size_t>{1}));
}

TEST(RepairTest, CleanStreamIsUnchanged) {
  auto s = Stream(20, 20);
  for (std::size_t i = 0; i < s.size(); ++i) s[i].pose.position = Vec3(i, 2.0 * i, 0);
  const RepairResult r = repair_low_confidence(s);
  EXPECT_TRUE(r.repaired_indices.empty());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(r.poses[i].pose.to_row(), s[i].pose.to_row());
  }
}

TEST(RepairTest, SlerpsAcrossALowSpan) {
  std::vector<PoseSample> s(5);
  for (int i = 0; i < 5; ++i) {
    s[i].t = i * 0.005;
    s[i].confidence = ConfidenceLevel::Low;
  }
  s[0].confidence = ConfidenceLevel::High;
  s[4].confidence = ConfidenceLevel::High;
  s[4].pose.orientation = Rz(std::numbers::pi / 2);
  const RepairResult r = repair_low_confidence(s);
  ASSERT_EQ(r.repaired_indices.size(), 3u);
  for (int i = 1; i <= 3; ++i) {
    // Axis-angle scaling: fraction i/4 of a quarter turn about z.
    EXPECT_ROT_NEAR(r.poses[i].pose.orientation,
                    UnitQuaternion::from_axis_angle(Vec3::UnitZ(), i * std::numbers::pi / 8),
                    1e-14);
  }
}

TEST(RepairTest, UsesTimestampsNotIndices) {
  std::vector<PoseSample> s(3);
  s[0].t = 0.0;
  s[1].t = 0.001;
  s[2].t = 0.004;
  s[2].pose.position = Vec3(4, 0, 0);
  s[1].confidence = ConfidenceLevel::Failed;
  EXPECT_VEC3_NEAR(repair_low_confidence(s).poses[1].pose.position, Vec3(1, 0, 0), 1e-12);
}

TEST(RepairTest, NeverTouchesHighSamplesAndKeepsLength) {
  std::mt19937_64 rng(61);
  std::vector<PoseSample> s(201);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i].t = i * 0.005;
    s[i].pose = testing::RandomPose(rng);
    s[i].confidence = i % 7 == 3    ? ConfidenceLevel::Low
                      : i % 11 == 5 ? ConfidenceLevel::Medium
                                    : ConfidenceLevel::High;
  }
  const RepairResult r = repair_low_confidence(s);
  ASSERT_EQ(r.poses.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i].confidence == ConfidenceLevel::High) {
      EXPECT_EQ(r.poses[i].pose.to_row(), s[i].pose.to_row());
      EXPECT_FALSE(r.poses[i].repaired);
    } else {
      EXPECT_TRUE(r.poses[i].repaired);
    }
  }
}

TEST(RepairTest, LowRunAtAnEndIsUnrepairable) {
  auto s = Stream(10, 10);
  s[8].confidence = ConfidenceLevel::Low;
  s[9].confidence = ConfidenceLevel::Low;
  try {
    repair_low_confidence(s);
    FAIL() << "expected UnrepairableError";
  } catch (const UnrepairableError& e) {
    EXPECT_EQ(e.first_index(), 8u);
    EXPECT_EQ(e.last_index(), 9u);
  }
  auto head = Stream(10, 10);
  head[0].confidence = ConfidenceLevel::Failed;
  EXPECT_THROW(repair_low_confidence(head), UnrepairableError);
}

TEST(RepairTest, MediumEndpointIsAnAnchor) {
  auto s = Stream(3, 3);
  s[0].confidence = ConfidenceLevel::Medium;
  s[1].confidence = ConfidenceLevel::Low;
  s[2].pose.position = Vec3(2, 0, 0);
  const RepairResult r = repair_low_confidence(s);
  EXPECT_EQ(r.repaired_indices, (std::vector<std::size_t>{1}));
  EXPECT_VEC3_NEAR(r.poses[1].pose.position, Vec3(1, 0, 0), 1e-15);
}

TEST(SmoothnessTest, StationaryHasNoViolations) {
  auto s = Stream(50, 50);
  EXPECT_TRUE(smoothness_check(s, QualityThresholds{}).empty());
}

TEST(SmoothnessTest, TeleportIsAVelocityViolation) {
  std::vector<PoseSample> s(5);
  for (int i = 0; i < 5; ++i) s[i].t = i * 0.05;
  s[2].pose.position = Vec3(1, 0, 0);
  QualityThresholds thr;
  thr.v_max = 1.0;
  thr.a_max = 1e9;
  const auto v = smoothness_check(s, thr);
  bool found = false;
  for (const auto& x : v) {
    if (x.kind == ViolationKind::Velocity && x.index == 2) {
      found = true;
      EXPECT_NEAR(x.value, 20.0, 1e-12);
      EXPECT_DOUBLE_EQ(x.threshold, 1.0);
    }
  }
  EXPECT_TRUE(found);
}

TEST(SmoothnessTest, FiniteDifferencesMatchHandValues) {
  // x = t^2 sampled at dt = 0.1: acceleration 2 everywhere.
  std::vector<double> times;
  std::vector<Pose> poses;
  for (int i = 0; i < 6; ++i) {
    const double t = 0.1 * i;
    times.push_back(t);
    poses.push_back(MakePose(Rz(0.05 * i), t * t, 0, 0));
  }
  QualityThresholds thr;
  thr.v_max = 0.85;   // velocities (i-1,i): 0.1, 0.3, ..., 0.9
  thr.a_max = 1.99;
  thr.dtheta_max = 0.049;
  const auto v = smoothness_check(times, poses, thr);
  std::set<std::size_t> vel;
  std::set<std::size_t> acc;
  std::set<std::size_t> rot;
  for (const auto& x : v) {
    if (x.kind == ViolationKind::Velocity) vel.insert(x.index);
    if (x.kind == ViolationKind::Acceleration) {
      acc.insert(x.index);
      EXPECT_NEAR(x.value, 2.0, 1e-9);
    }
    if (x.kind == ViolationKind::Orientation) rot.insert(x.index);
  }
  EXPECT_EQ(vel, (std::set<std::size_t>{5}));
  EXPECT_EQ(acc, (std::set<std::size_t>{1, 2, 3, 4}));
  EXPECT_EQ(rot, (std::set<std::size_t>{1, 2, 3, 4, 5}));
}

TEST(SmoothnessTest, NeedsIncreasingTimesAndThreeSamples) {
  auto s = Stream(4, 4);
  s[2].t = s[1].t;
  EXPECT_THROW(smoothness_check(s, QualityThresholds{}), InputError);
  EXPECT_THROW(smoothness_check(Stream(2, 2), QualityThresholds{}), InputError);
}

TEST(SmoothnessTest, InjectedStepsAreFlaggedExactly) {
  TrajectorySpec spec;
  spec.waypoints = {MakePose(UnitQuaternion(), 0, 0, 0), MakePose(Rz(0.3), 0.2, 0.1, 0.05)};
  spec.duration_s = 10.0;
  const auto truth = generate_truth(spec, 200.0);
  std::vector<PoseSample> s;
  for (const auto& tp : truth) s.push_back({tp.t, tp.pose, ConfidenceLevel::High, false});
  const std::set<std::size_t> injected{150, 777, 1500};
  for (std::size_t i : injected) inject_step(s, i, Vec3(0.02, 0, 0));
  std::set<std::size_t> flagged;
  for (const auto& v : smoothness_check(s, QualityThresholds{})) {
    if (v.kind == ViolationKind::Velocity) flagged.insert(v.index);
  }
  EXPECT_EQ(flagged, injected);
}

TEST(VerdictTest, LenientModeToleratesAFewViolations) {
  QualityReport r = validate_environment(Stream(10, 10), QualityThresholds{});
  r.violations.resize(2);
  QualityThresholds thr;
  update_verdict(r, thr);
  EXPECT_EQ(r.verdict, Verdict::Fail);
  thr.mode = QualityMode::Lenient;
  thr.max_violations = 2;
  update_verdict(r, thr);
  EXPECT_EQ(r.verdict, Verdict::Pass);
  thr.max_violations = 1;
  update_verdict(r, thr);
  EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(DriftTest, ReturningExactlyIsAligned) {
  const std::vector<Pose> traj{MakePose(UnitQuaternion(), 0, 0, 0),
                               MakePose(UnitQuaternion(), 0.3, 0, 0),
                               MakePose(UnitQuaternion(), 0, 0, 0)};
  const DriftVerdict v = drift_check(traj, traj.front(), 0.01, 0.05);
  EXPECT_EQ(v.status, DriftStatus::Aligned);
  EXPECT_EQ(v.endpoint_residual_m, 0.0);
}

std::vector<Pose> SimulatedLoop(bool snap_back, double walk_sigma, double end_offset) {
  TrajectorySpec spec;
  spec.waypoints = {MakePose(UnitQuaternion(), 0, 0, 0), MakePose(UnitQuaternion(), 0.3, 0, 0),
                    MakePose(UnitQuaternion(), end_offset, 0, 0)};
  spec.duration_s = 10.0;
  NoiseModel noise;
  noise.drift_walk_sigma_m = walk_sigma;
  noise.snap_back = snap_back;
  noise.snap_radius_m = 0.04;
  GripperCalib calib{600, 200, 80, 540, 0, 1};
  const auto truth = generate_truth(spec, 200.0);
  const std::vector<double> widths(camera_frame_count(truth.back().t, 60), 80.0);
  const SimStreams s = sample_streams(truth, 200, 60, noise, calib, widths, 5);
  std::vector<Pose> out;
  for (const auto& p : s.poses) out.push_back(p.pose);
  return out;
}

TEST(DriftTest, SnapBackIsLoopClosed) {
  const auto traj = SimulatedLoop(true, 0.002, 0.03);
  const DriftVerdict v = drift_check(traj, traj.front(), 0.01, 0.05);
  EXPECT_EQ(v.status, DriftStatus::LoopClosed);
  EXPECT_NEAR(v.endpoint_residual_m, 0.03, 1e-9);
}

TEST(DriftTest, LargeDriftWithoutSnapBackNeedsReinitialization) {
  const auto traj = SimulatedLoop(false, 0.002, 0.03);
  const DriftVerdict v = drift_check(traj, traj.front(), 0.01, 0.05);
  EXPECT_GT(v.endpoint_residual_m, 0.05);
  EXPECT_EQ(v.status, DriftStatus::Reinitialize);
}

TEST(DriftTest, MonotonicDriftEndingFarAway) {
  std::vector<Pose> traj;
  for (int i = 0; i <= 50; ++i) traj.push_back(MakePose(UnitQuaternion(), 0.001 * i, 0, 0));
  const DriftVerdict v = drift_check(traj, traj.front(), 0.01, 0.05);
  EXPECT_NEAR(v.endpoint_residual_m, 0.05, 1e-15);
  EXPECT_EQ(v.status, DriftStatus::Reinitialize);
}

TEST(TranslationErrorTest, Examples) {
  std::vector<Pose> truth;
  std::vector<Pose> shifted;
  for (int i = 0; i < 10; ++i) {
    truth.push_back(MakePose(Rz(0.1 * i), 0.1 * i, 0, 0));
    shifted.push_back(MakePose(Rz(0.1 * i), 0.1 * i, 0.01, 0));
  }
  const auto zero = translation_error(truth, truth);
  EXPECT_EQ(zero.mean_mm, 0.0);
  EXPECT_EQ(zero.max_mm, 0.0);
  EXPECT_EQ(zero.rmse_mm, 0.0);
  const auto ten = translation_error(shifted, truth);
  EXPECT_NEAR(ten.mean_mm, 10.0, 1e-9);
  EXPECT_NEAR(ten.max_mm, 10.0, 1e-9);
  EXPECT_NEAR(ten.rmse_mm, 10.0, 1e-9);
  EXPECT_EQ(ten.count, 10u);
  shifted.pop_back();
  EXPECT_THROW(translation_error(shifted, truth), InputError);
}

TEST(ReportTest, TextAndJsonCarryTheVerdict) {
  const QualityReport r = validate_environment(Stream(100, 96), QualityThresholds{});
  EXPECT_NE(to_text(r).find("verdict: pass"), std::string::npos) << to_text(r);
  EXPECT_EQ(to_json(r)["verdict"], "pass");
}

}  // namespace
}  // namespace demotraj
