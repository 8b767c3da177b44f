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

#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "demotraj/error.hpp"
#include "demotraj/gripper.hpp"
#include "test_util.hpp"

namespace demotraj {
namespace {

using testing::MakePose;
using testing::Rx;
using testing::Rz;

GripperCalib Calib() {
  GripperCalib c;
  c.d_max_px = 600.0;
  c.d_min_px = 200.0;
  c.g_max_mm = 80.0;
  c.axis_u_px = 540.0;
  return c;
}

GeneratorSpec Spec() {
  GeneratorSpec s;
  s.trajectory.waypoints = {MakePose(UnitQuaternion(), 0, 0, 0),
                            MakePose(Rz(0.3), 0.1, 0.05, 0.02),
                            MakePose(Rx(0.2) * Rz(0.3), 0.0, 0.1, 0.05)};
  s.trajectory.duration_s = 3.0;
  s.width_waypoints_mm = {80.0, 20.0, 60.0};
  s.calib = Calib();
  return s;
}

TEST(ProfileTest, MinJerkPolynomial) {
  EXPECT_EQ(profile_value(Profile::MinJerk, 0.0), 0.0);
  EXPECT_EQ(profile_value(Profile::MinJerk, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(profile_value(Profile::MinJerk, 0.5), 0.5);
  for (double tau : {0.1, 0.3, 0.7}) {
    EXPECT_NEAR(profile_value(Profile::MinJerk, tau),
                10 * std::pow(tau, 3) - 15 * std::pow(tau, 4) + 6 * std::pow(tau, 5), 1e-15);
  }
  EXPECT_EQ(profile_value(Profile::Linear, 0.25), 0.25);
  EXPECT_EQ(profile_from_string("linear"), Profile::Linear);
  EXPECT_THROW(profile_from_string("cubic"), ConfigError);
}

TEST(TrajectoryTest, IdenticalWaypointsAreConstant) {
  TrajectorySpec spec;
  spec.waypoints = {MakePose(Rz(0.4), 1, 2, 3), MakePose(Rz(0.4), 1, 2, 3)};
  spec.duration_s = 2.0;
  for (const auto& tp : generate_truth(spec, 50.0)) {
    EXPECT_VEC3_NEAR(tp.pose.position, Vec3(1, 2, 3), 1e-15);
    EXPECT_ROT_NEAR(tp.pose.orientation, Rz(0.4), 1e-15);
  }
}

TEST(TrajectoryTest, EndpointsAndMidpoint) {
  TrajectorySpec spec;
  spec.waypoints = {MakePose(UnitQuaternion(), 0.1, 0.2, 0.3), MakePose(Rz(1.0), 0.5, -0.2, 0.7)};
  spec.duration_s = 4.0;
  const Pose a = evaluate_trajectory(spec, 0.0);
  const Pose b = evaluate_trajectory(spec, 4.0);
  EXPECT_EQ(a.to_row(), spec.waypoints[0].to_row());
  EXPECT_VEC3_NEAR(b.position, spec.waypoints[1].position, 0.0);
  EXPECT_ROT_NEAR(b.orientation, Rz(1.0), 1e-15);
  const Pose mid = evaluate_trajectory(spec, 2.0);
  EXPECT_VEC3_NEAR(mid.position, Vec3(0.3, 0.0, 0.5), 1e-15);
  EXPECT_ROT_NEAR(mid.orientation, Rz(0.5), 1e-15);
}

TEST(TrajectoryTest, MinJerkHasZeroBoundaryVelocity) {
  TrajectorySpec spec;
  spec.waypoints = {MakePose(UnitQuaternion(), 0, 0, 0), MakePose(UnitQuaternion(), 1, 0, 0),
                    MakePose(UnitQuaternion(), 1, 1, 0)};
  spec.duration_s = 2.0;
  const double h = 1e-6;
  for (double t : {0.0, 1.0}) {
    const double v = (evaluate_trajectory(spec, t + h).position -
                      evaluate_trajectory(spec, t).position).norm() / h;
    EXPECT_LT(v, 1e-4) << t;
  }
  EXPECT_VEC3_NEAR(evaluate_trajectory(spec, 1.0).position, Vec3(1, 0, 0), 1e-15);
}

TEST(TrajectoryTest, UniformGrid) {
  TrajectorySpec spec;
  spec.waypoints = {Pose::identity(), MakePose(UnitQuaternion(), 1, 0, 0)};
  spec.duration_s = 1.0;
  const auto truth = generate_truth(spec, 200.0);
  ASSERT_EQ(truth.size(), 201u);
  for (std::size_t k = 0; k < truth.size(); ++k) EXPECT_EQ(truth[k].t, k / 200.0);
  EXPECT_EQ(camera_frame_count(1.0, 60), 61u);
}

TEST(TrajectoryTest, SpecValidation) {
  TrajectorySpec spec;
  spec.duration_s = 1.0;
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.waypoints = {Pose::identity()};
  spec.duration_s = 0.0;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(SampleStreamsTest, NoiselessStreamsEqualTruth) {
  const SimStreams s = generate(Spec(), 1);
  ASSERT_EQ(s.poses.size(), s.truth.size());
  ASSERT_EQ(s.poses.size(), 601u);
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    EXPECT_EQ(s.poses[i].pose.to_row(), s.truth[i].pose.to_row());
    EXPECT_EQ(s.poses[i].confidence, ConfidenceLevel::High);
  }
  ASSERT_EQ(s.frames.size(), 181u);
  EXPECT_EQ(s.frames[0].image_ref, "frame_000000.jpg");
  EXPECT_EQ(s.frame_width_mm.size(), s.frames.size());
}

TEST(SampleStreamsTest, FullOpeningPlacesMarkersAtMaxDistance) {
  GeneratorSpec spec = Spec();
  spec.width_waypoints_mm = {80.0};
  const SimStreams s = generate(spec, 3);
  for (const auto& f : s.frames) {
    ASSERT_EQ(f.detections.size(), 2u);
    EXPECT_NEAR(std::abs(f.detections[1].u - f.detections[0].u), 600.0, 1e-9);
    EXPECT_EQ(f.detections[0].v, f.detections[1].v);
  }
}

TEST(SampleStreamsTest, WidthLawClosesTheLoop) {
  const SimStreams s = generate(Spec(), 3);
  for (std::size_t i = 0; i < s.frames.size(); ++i) {
    const auto w = width_from_frame(s.frames[i].detections, Calib());
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->width_mm, s.frame_width_mm[i], 1e-9) << i;
  }
}

TEST(SampleStreamsTest, SameSeedSameStreams) {
  GeneratorSpec spec = Spec();
  spec.noise.pos_sigma_m = 0.005;
  spec.noise.rot_sigma_rad = 0.01;
  spec.noise.drops.probability = 0.01;
  spec.noise.marker_dropout = 0.1;
  spec.noise.marker_px_sigma = 0.5;
  const SimStreams a = generate(spec, 42);
  const SimStreams b = generate(spec, 42);
  const SimStreams c = generate(spec, 43);
  ASSERT_EQ(a.poses.size(), b.poses.size());
  ASSERT_EQ(a.poses.size(), c.poses.size());
  ASSERT_EQ(a.frames.size(), c.frames.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.poses.size(); ++i) {
    EXPECT_EQ(a.poses[i].pose.to_row(), b.poses[i].pose.to_row());
    EXPECT_EQ(a.poses[i].confidence, b.poses[i].confidence);
    EXPECT_EQ(a.poses[i].t, c.poses[i].t);
    differs |= a.poses[i].pose.position != c.poses[i].pose.position;
  }
  EXPECT_TRUE(differs);
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    EXPECT_EQ(a.frames[i].t, c.frames[i].t);
    ASSERT_EQ(a.frames[i].detections.size(), b.frames[i].detections.size());
  }
}

TEST(SampleStreamsTest, NoiseComponentsAreIndependent) {
  GeneratorSpec spec = Spec();
  spec.noise.pos_sigma_m = 0.005;
  const SimStreams a = generate(spec, 9);
  spec.noise.marker_px_sigma = 2.0;
  const SimStreams b = generate(spec, 9);
  for (std::size_t i = 0; i < a.poses.size(); ++i) {
    EXPECT_EQ(a.poses[i].pose.to_row(), b.poses[i].pose.to_row());
  }
}

TEST(SampleStreamsTest, PositionNoiseHasTheRequestedRms) {
  GeneratorSpec spec = Spec();
  spec.trajectory.duration_s = 50.0;
  spec.noise.pos_sigma_m = 0.005;
  const SimStreams s = generate(spec, 77);
  double sq = 0.0;
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    sq += (s.poses[i].pose.position - s.truth[i].pose.position).squaredNorm();
  }
  EXPECT_NEAR(std::sqrt(sq / s.poses.size()), 0.005, 0.0002);
}

TEST(SampleStreamsTest, DropsNeverTouchTheEnds) {
  GeneratorSpec spec = Spec();
  spec.noise.drops.probability = 0.2;
  spec.noise.drops.level = ConfidenceLevel::Medium;
  const SimStreams s = generate(spec, 5);
  EXPECT_EQ(s.poses.front().confidence, ConfidenceLevel::High);
  EXPECT_EQ(s.poses.back().confidence, ConfidenceLevel::High);
  std::size_t dropped = 0;
  for (const auto& p : s.poses) {
    if (p.confidence != ConfidenceLevel::High) {
      EXPECT_EQ(p.confidence, ConfidenceLevel::Medium);
      ++dropped;
    }
  }
  EXPECT_GT(dropped, 0u);
}

TEST(SampleStreamsTest, MarkerDropoutRemovesDetections) {
  GeneratorSpec spec = Spec();
  spec.noise.marker_dropout = 0.5;
  const SimStreams s = generate(spec, 5);
  std::size_t total = 0;
  for (const auto& f : s.frames) total += f.detections.size();
  EXPECT_LT(total, 2 * s.frames.size());
  EXPECT_GT(total, 0u);
}

TEST(SampleStreamsTest, WidthCountMustMatchFrames) {
  TrajectorySpec traj = Spec().trajectory;
  const auto truth = generate_truth(traj, 200.0);
  const std::vector<double> widths(3, 80.0);
  EXPECT_THROW(sample_streams(truth, 200, 60, NoiseModel{}, Calib(), widths, 0), Error);
}

TEST(InjectStepTest, OffsetsTheTail) {
  std::vector<PoseSample> s(5);
  inject_step(s, 2, Vec3(1, 0, 0));
  EXPECT_EQ(s[1].pose.position.x(), 0.0);
  EXPECT_EQ(s[2].pose.position.x(), 1.0);
  EXPECT_EQ(s[4].pose.position.x(), 1.0);
}

TEST(ScalarProfileTest, FollowsWaypoints) {
  const std::vector<double> w{80.0, 20.0};
  EXPECT_EQ(evaluate_scalar_profile(w, 2.0, Profile::MinJerk, 0.0), 80.0);
  EXPECT_EQ(evaluate_scalar_profile(w, 2.0, Profile::MinJerk, 2.0), 20.0);
  EXPECT_DOUBLE_EQ(evaluate_scalar_profile(w, 2.0, Profile::MinJerk, 1.0), 50.0);
  const std::vector<double> one{33.0};
  EXPECT_EQ(evaluate_scalar_profile(one, 2.0, Profile::Linear, 1.3), 33.0);
}

}  // namespace
}  // namespace demotraj
