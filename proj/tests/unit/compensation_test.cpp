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

#include "demotraj/compensation.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "demotraj/error.hpp"
#include "test_util.hpp"

namespace demotraj {
namespace {

using testing::DataPath;
using testing::MakePose;
using testing::Rx;

CompensationParams Params(double d_close = 0.010, double d_open = 0.0, double w_max = 0.08) {
  CompensationParams p;
  p.d_close = d_close;
  p.d_open = d_open;
  p.w_max = w_max;
  return p;
}

TEST(CompensationDistanceTest, Endpoints) {
  const CompensationParams p = Params(0.0123, 0.0017, 0.085);
  EXPECT_EQ(compensation_distance(p.w_max, p), p.d_open);
  EXPECT_EQ(compensation_distance(0.0, p), p.d_close);
}

TEST(CompensationDistanceTest, MidpointAndLinearity) {
  const CompensationParams p = Params();
  EXPECT_NEAR(compensation_distance(0.04, p), 0.005, 1e-15);
  // Slope form d_close - (d_close - d_open) / w_max * w as the oracle.
  const CompensationParams q = Params(0.02, 0.004, 0.1);
  for (int i = 0; i <= 100; ++i) {
    const double w = 0.001 * i;
    EXPECT_NEAR(compensation_distance(w, q), 0.02 - (0.02 - 0.004) / 0.1 * w, 1e-15);
  }
}

TEST(CompensationDistanceTest, OutOfRangeWidths) {
  const CompensationParams p = Params();
  EXPECT_FALSE(width_in_range(-0.001, p));
  EXPECT_FALSE(width_in_range(0.09, p));
  EXPECT_EQ(compensation_distance(-0.001, p), p.d_close);
  EXPECT_EQ(compensation_distance(0.09, p), p.d_open);
  EXPECT_THROW(compensation_distance(0.09, p, WidthRangePolicy::Strict), DomainError);
  EXPECT_THROW(compensation_distance(NAN, p), DomainError);
}

TEST(CompensationParamsTest, Validation) {
  EXPECT_NO_THROW(Params().validate());
  EXPECT_NO_THROW(Params(0.0, 0.0).validate());
  EXPECT_THROW(Params(0.01, 0.0, 0.0).validate(), ConfigError);
  EXPECT_THROW(Params(-0.01, 0.0).validate(), ConfigError);
}

TEST(CorrectedTcpTest, Examples) {
  const Pose p = MakePose(Rx(0.7), 0.1, 0.2, 0.3);
  const Pose same = corrected_tcp(p, 0.0);
  EXPECT_EQ(same.to_row(), p.to_row());

  const Pose down = corrected_tcp(MakePose(UnitQuaternion(), 0.1, 0.2, 0.3), 0.01);
  EXPECT_VEC3_NEAR(down.position, Vec3(0.1, 0.2, 0.29), 1e-15);

  // Rx(90) maps local z onto world -y.
  const Pose turned = corrected_tcp(MakePose(Rx(std::numbers::pi / 2), 0, 0, 0), 0.01);
  EXPECT_VEC3_NEAR(turned.position, Vec3(0, 0.01, 0), 1e-15);
}

TEST(CorrectedTcpTest, DisplacementIsAlongLocalZ) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> dist(0.0, 0.02);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = testing::RandomPose(rng);
    const double d = dist(rng);
    const Pose c = corrected_tcp(p, d);
    EXPECT_EQ(c.orientation.xyzw(), p.orientation.xyzw());
    const Vec3 z = p.orientation.matrix().col(2);
    const Vec3 shift = p.position - c.position;
    EXPECT_LE((shift - d * z).norm(), 1e-12);
    EXPECT_LE(shift.cross(z).norm(), 1e-12);
    EXPECT_NEAR(shift.norm(), d, 1e-12);
  }
}

class CompensatedCommandTest : public ::testing::Test {
 protected:
  void SetUp() override {
    chain_ = load_chain(DataPath("arm6.chain")).chain;
    home_.resize(6);
    home_ << 0.3, -1.5, 1.4, -1.47, -std::numbers::pi / 2, 0.2;
  }
  KinematicChain chain_;
  JointVector home_;
};

TEST_F(CompensatedCommandTest, FullyOpenWithZeroOpenOffsetIsPlainIk) {
  const Pose target = forward_kinematics(chain_, home_);
  const CompensationParams p = Params();
  JointVector seed = home_;
  seed[0] += 0.1;
  const JointVector a = compensated_joint_command(chain_, target, p.w_max, p, seed);
  const JointVector b = solve_ik(chain_, target, seed).theta;
  EXPECT_EQ(a, b);
}

TEST_F(CompensatedCommandTest, ForwardKinematicsReachesCorrectedTarget) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> dq(-0.3, 0.3);
  std::uniform_real_distribution<double> w(0.0, 0.08);
  const CompensationParams p = Params(0.012, 0.0, 0.08);
  for (int i = 0; i < 50; ++i) {
    JointVector q = home_;
    for (int k = 0; k < 6; ++k) q[k] += dq(rng);
    const Pose pose = forward_kinematics(chain_, q);
    const double width = w(rng);
    const JointVector theta = compensated_joint_command(chain_, pose, width, p, q);
    const Pose got = forward_kinematics(chain_, theta);
    const double d = compensation_distance(width, p);
    const Vec3 expected = pose.position - d * pose.orientation.matrix().col(2);
    EXPECT_LE((got.position - expected).norm(), 1e-6);
    EXPECT_LE(angular_distance(got.orientation, pose.orientation), 1e-6);
  }
}

TEST_F(CompensatedCommandTest, DisplacementIsLinearInWidthThroughTheStack) {
  const Pose pose = forward_kinematics(chain_, home_);
  const CompensationParams p = Params(0.012, 0.002, 0.08);
  std::vector<double> mags;
  JointVector seed = home_;
  for (int i = 0; i <= 8; ++i) {
    const double width = 0.01 * i;
    seed = compensated_joint_command(chain_, pose, width, p, seed);
    mags.push_back((forward_kinematics(chain_, seed).position - pose.position).norm());
  }
  for (int i = 0; i <= 8; ++i) {
    EXPECT_NEAR(mags[i], 0.012 - 0.00125 * i, 2e-6) << i;
  }
}

}  // namespace
}  // namespace demotraj
