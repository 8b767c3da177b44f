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

// Rigid-body algebra for trajectory processing.
//
// Rotations are stored as unit quaternions. Every constructor normalizes and
// canonicalizes the sign (qw >= 0) so that equal rotations compare equal
// component-wise; all distance functions additionally treat q and -q as the
// same rotation.
//
// Frame conventions used by the trajectory transforms:
//   base_gripper   gripper center in the robot base frame at recording start
//   tracker        tracker pose relative to its own initial pose, axes aligned
//                  with the robot base frame
//   delta_c2g      offset from tracker (camera) center to the gripper center

#ifndef DEMOTRAJ_GEOMETRY_HPP_
#define DEMOTRAJ_GEOMETRY_HPP_

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace demotraj {

using Vec3 = Eigen::Vector3d;

class UnitQuaternion {
 public:
  // Identity rotation.
  UnitQuaternion() : q_(Eigen::Quaterniond::Identity()) {}

  // Throws InputError on non-finite or zero-norm input.
  UnitQuaternion(double qx, double qy, double qz, double qw);
  explicit UnitQuaternion(const Eigen::Quaterniond& q);

  static UnitQuaternion identity() { return {}; }
  // `axis` need not be normalized; a zero axis yields the identity.
  static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
  // Exponential map of a rotation vector (axis * angle).
  static UnitQuaternion from_rotation_vector(const Vec3& v);
  // Fixed-axis roll/pitch/yaw: R = Rz(yaw) * Ry(pitch) * Rx(roll).
  static UnitQuaternion from_rpy(double roll, double pitch, double yaw);
  static UnitQuaternion from_matrix(const Eigen::Matrix3d& m);

  double x() const { return q_.x(); }
  double y() const { return q_.y(); }
  double z() const { return q_.z(); }
  double w() const { return q_.w(); }
  // (qx, qy, qz, qw)
  std::array<double, 4> xyzw() const { return {q_.x(), q_.y(), q_.z(), q_.w()}; }

  const Eigen::Quaterniond& eigen() const { return q_; }
  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }

  Vec3 rotate(const Vec3& v) const { return q_ * v; }
  UnitQuaternion inverse() const;
  // Logarithm map; the returned angle lies in [0, pi].
  Vec3 rotation_vector() const;
  double angle() const;

  friend UnitQuaternion operator*(const UnitQuaternion& a,
                                  const UnitQuaternion& b);

 private:
  struct Raw {};
  UnitQuaternion(const Eigen::Quaterniond& q, Raw) : q_(q) {}

  Eigen::Quaterniond q_;
};

// Sign-invariant Euclidean distance min(|a - b|, |a + b|).
double quaternion_distance(const UnitQuaternion& a, const UnitQuaternion& b);
// Geodesic angle of a^-1 * b, in [0, pi].
double angular_distance(const UnitQuaternion& a, const UnitQuaternion& b);
// Shortest-path spherical interpolation; s = 0 gives a, s = 1 gives b.
UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b,
                     double s);

struct Pose {
  Vec3 position = Vec3::Zero();
  UnitQuaternion orientation;

  static Pose identity() { return {}; }
  bool is_finite() const { return position.allFinite(); }
  // Row layout used by logs and episode files: x, y, z, qx, qy, qz, qw.
  std::array<double, 7> to_row() const;
  static Pose from_row(std::span<const double, 7> row);
};

// Rotate-then-translate composition: a * b.
Pose compose(const Pose& a, const Pose& b);
Pose inverse(const Pose& p);

// Relative motion between consecutive TCP frames.
struct RelativePose {
  Vec3 translation = Vec3::Zero();
  UnitQuaternion rotation;
};

// Which frame a relative translation is expressed in. Base keeps the plain
// position difference; Local rotates it into the frame of the earlier pose.
enum class TranslationFrame { Base, Local };

// Camera pose in the robot base frame from the tracker reading:
//   position    = p_b2g + p_i - R_b2g * delta_c2g
//   orientation = R_base * R_i
// The first overload uses R_base = R_b2g.
Pose camera_pose_in_base(const Pose& base_gripper, const Vec3& delta_c2g,
                         const Pose& tracker);
Pose camera_pose_in_base(const Pose& base_gripper, const Vec3& delta_c2g,
                         const Pose& tracker,
                         const UnitQuaternion& base_rotation);

// TCP pose from the camera pose: p_ee = p_cam + R_cam * delta_c2g.
Pose tcp_from_camera(const Pose& camera, const Vec3& delta_c2g);

RelativePose relative_step(const Pose& current, const Pose& next,
                           TranslationFrame frame = TranslationFrame::Base);

// Chains relative steps onto `initial`; the result has steps.size() + 1
// poses and is the exact inverse of relative_step.
std::vector<Pose> integrate_relative(
    const Pose& initial, std::span<const RelativePose> steps,
    TranslationFrame frame = TranslationFrame::Base);

}  // namespace demotraj

#endif  // DEMOTRAJ_GEOMETRY_HPP_
