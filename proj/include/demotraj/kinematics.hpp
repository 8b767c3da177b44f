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

// Serial revolute chains: parsing, forward kinematics, geometric Jacobian and
// damped-least-squares inverse kinematics.

#ifndef DEMOTRAJ_KINEMATICS_HPP_
#define DEMOTRAJ_KINEMATICS_HPP_

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "demotraj/geometry.hpp"

namespace demotraj {

using JointVector = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

// Revolute joint. `origin` is the fixed transform from the parent frame to the
// joint frame at zero angle; the joint rotates about `axis` in that frame.
struct Joint {
  std::string name;
  Pose origin;
  Vec3 axis = Vec3::UnitZ();
  double lower = 0.0;  // rad
  double upper = 0.0;
};

struct KinematicChain {
  std::vector<Joint> joints;  // base to flange
  Pose flange_to_gripper;

  std::size_t dof() const { return joints.size(); }
  // Throws ConfigError.
  void validate() const;
  bool within_limits(const JointVector& theta) const;
  JointVector clamp(const JointVector& theta) const;
};

enum class ChainFormat { Auto, Urdf, Native };

struct ChainParseOptions {
  // Non-revolute movable joints (prismatic, planar, floating) are treated as
  // fixed with a warning unless this is set, in which case parsing fails.
  bool reject_unsupported_joints = false;
};

struct ParsedChain {
  KinematicChain chain;
  std::vector<std::string> warnings;
};

// URDF subset: <robot>, <link>, <joint type="revolute|continuous|fixed"> with
// <parent>, <child>, <origin xyz rpy>, <axis xyz> and <limit lower upper>.
// Everything else is skipped. Fixed joints are folded into the next joint's
// origin; trailing fixed joints form flange_to_gripper.
//
// Native format, one statement per line, '#' starts a comment:
//   joint <name> [xyz x y z] [rpy r p y] axis ax ay az limit lower upper
//   fixed [xyz x y z] [rpy r p y]
//   tool [xyz x y z] [rpy r p y]
// `fixed` folds a constant transform into the chain at that point; `tool`
// (at most once, after the last joint) is the flange-to-gripper offset.
//
// Throws ParseError (with line) or UnsupportedTopologyError.
ParsedChain parse_chain(std::string_view text, ChainFormat format = ChainFormat::Auto,
                        const ChainParseOptions& options = {},
                        const std::string& source = "<chain>");
// Format chosen from the extension (.urdf/.xml) unless given.
ParsedChain load_chain(const std::filesystem::path& path,
                       ChainFormat format = ChainFormat::Auto,
                       const ChainParseOptions& options = {});

// TCP pose. Throws DomainError when theta is outside the limits or has the
// wrong size.
Pose forward_kinematics(const KinematicChain& chain, const JointVector& theta);

// Geometric Jacobian of the TCP: rows 0-2 linear velocity, rows 3-5 angular
// velocity, both in the base frame.
Jacobian jacobian(const KinematicChain& chain, const JointVector& theta);

struct IkConfig {
  int max_iters = 200;
  double pos_tol_m = 1e-6;
  double rot_tol_rad = 1e-6;
  double damping = 1e-3;
  double step_limit_rad = 0.5;  // per joint per iteration
  // Residual weights; a zero weight removes that residual (and its
  // tolerance) from the problem.
  double position_weight = 1.0;
  double orientation_weight = 1.0;

  // Throws ConfigError.
  void validate() const;
};

struct IkResult {
  JointVector theta;
  int iterations = 0;
  double position_residual = 0.0;  // m
  double rotation_residual = 0.0;  // rad, geodesic
};

// Damped least squares from `seed`. Every iterate is clamped to the joint
// limits. Throws UnreachableTargetError carrying the best residual when the
// tolerances are not met, NumericalError on a non-finite Jacobian, DomainError
// when the seed violates the limits.
IkResult solve_ik(const KinematicChain& chain, const Pose& target,
                  const JointVector& seed, const IkConfig& cfg = {});

struct JointTrajectory {
  std::vector<JointVector> joints;
  // |theta_i - theta_{i-1}|_inf for i >= 1.
  std::vector<double> step_jumps;
  double max_step_jump = 0.0;
};

// Solves each pose warm-started from the previous solution. Failures are
// rethrown with the frame index.
JointTrajectory joint_trajectory(const KinematicChain& chain,
                                 std::span<const Pose> tcp,
                                 const JointVector& seed0,
                                 const IkConfig& cfg = {});

}  // namespace demotraj

#endif  // DEMOTRAJ_KINEMATICS_HPP_
