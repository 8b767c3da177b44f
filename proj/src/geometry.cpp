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

#include "demotraj/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

// Normalizes and flips to the qw >= 0 hemisphere. For qw == 0 the first
// non-zero vector component is made positive so the choice stays unique.
Eigen::Quaterniond Canonical(Eigen::Quaterniond q) {
  const double n = q.norm();
  if (!std::isfinite(n) || n == 0.0) {
    throw InputError("quaternion must be finite and non-zero");
  }
  // Skipping norms already within rounding keeps renormalization idempotent.
  if (std::abs(n - 1.0) > 4 * std::numeric_limits<double>::epsilon()) {
    q.coeffs() /= n;
  }
  bool flip = q.w() < 0.0;
  if (q.w() == 0.0) {
    if (q.x() != 0.0) {
      flip = q.x() < 0.0;
    } else if (q.y() != 0.0) {
      flip = q.y() < 0.0;
    } else {
      flip = q.z() < 0.0;
    }
  }
  if (flip) q.coeffs() = -q.coeffs();
  return q;
}

}  // namespace

UnitQuaternion::UnitQuaternion(double qx, double qy, double qz, double qw)
    : q_(Canonical(Eigen::Quaterniond(qw, qx, qy, qz))) {}

UnitQuaternion::UnitQuaternion(const Eigen::Quaterniond& q)
    : q_(Canonical(q)) {}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis,
                                               double angle) {
  const double n = axis.norm();
  if (n == 0.0 || angle == 0.0) return {};
  return UnitQuaternion(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis / n)));
}

UnitQuaternion UnitQuaternion::from_rotation_vector(const Vec3& v) {
  const double angle = v.norm();
  if (angle < 1e-12) {
    // First-order expansion avoids dividing by a vanishing angle.
    return UnitQuaternion(0.5 * v.x(), 0.5 * v.y(), 0.5 * v.z(), 1.0);
  }
  return from_axis_angle(v / angle, angle);
}

UnitQuaternion UnitQuaternion::from_rpy(double roll, double pitch,
                                        double yaw) {
  const Eigen::Quaterniond q = Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                               Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                               Eigen::AngleAxisd(roll, Vec3::UnitX());
  return UnitQuaternion(q);
}

UnitQuaternion UnitQuaternion::from_matrix(const Eigen::Matrix3d& m) {
  return UnitQuaternion(Eigen::Quaterniond(m));
}

UnitQuaternion UnitQuaternion::inverse() const {
  // The conjugate of a canonical quaternion is canonical except when qw == 0.
  return UnitQuaternion(q_.conjugate());
}

Vec3 UnitQuaternion::rotation_vector() const {
  const Vec3 v = q_.vec();
  const double s = v.norm();
  if (s < 1e-12) return 2.0 * v / q_.w();
  const double angle = 2.0 * std::atan2(s, q_.w());
  return v * (angle / s);
}

double UnitQuaternion::angle() const {
  return 2.0 * std::atan2(q_.vec().norm(), std::abs(q_.w()));
}

UnitQuaternion operator*(const UnitQuaternion& a, const UnitQuaternion& b) {
  return UnitQuaternion(a.q_ * b.q_);
}

double quaternion_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  const Eigen::Vector4d ca = a.eigen().coeffs();
  const Eigen::Vector4d cb = b.eigen().coeffs();
  return std::min((ca - cb).norm(), (ca + cb).norm());
}

double angular_distance(const UnitQuaternion& a, const UnitQuaternion& b) {
  const Eigen::Quaterniond d = a.eigen().conjugate() * b.eigen();
  return 2.0 * std::atan2(d.vec().norm(), std::abs(d.w()));
}

UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b,
                     double s) {
  if (s == 0.0) return a;
  if (s == 1.0) return b;
  // Scale the relative rotation vector; this is slerp along the shortest arc.
  const UnitQuaternion rel = a.inverse() * b;
  return a * UnitQuaternion::from_rotation_vector(s * rel.rotation_vector());
}

std::array<double, 7> Pose::to_row() const {
  return {position.x(),    position.y(),    position.z(),   orientation.x(),
          orientation.y(), orientation.z(), orientation.w()};
}

Pose Pose::from_row(std::span<const double, 7> row) {
  Pose p;
  p.position = Vec3(row[0], row[1], row[2]);
  if (!p.position.allFinite()) throw InputError("pose position not finite");
  p.orientation = UnitQuaternion(row[3], row[4], row[5], row[6]);
  return p;
}

Pose compose(const Pose& a, const Pose& b) {
  return {a.position + a.orientation.rotate(b.position),
          a.orientation * b.orientation};
}

Pose inverse(const Pose& p) {
  const UnitQuaternion inv = p.orientation.inverse();
  return {-inv.rotate(p.position), inv};
}

Pose camera_pose_in_base(const Pose& base_gripper, const Vec3& delta_c2g,
                         const Pose& tracker) {
  return camera_pose_in_base(base_gripper, delta_c2g, tracker,
                             base_gripper.orientation);
}

Pose camera_pose_in_base(const Pose& base_gripper, const Vec3& delta_c2g,
                         const Pose& tracker,
                         const UnitQuaternion& base_rotation) {
  Pose cam;
  cam.position = base_gripper.position + tracker.position -
                 base_gripper.orientation.rotate(delta_c2g);
  cam.orientation = base_rotation * tracker.orientation;
  return cam;
}

Pose tcp_from_camera(const Pose& camera, const Vec3& delta_c2g) {
  return {camera.position + camera.orientation.rotate(delta_c2g),
          camera.orientation};
}

RelativePose relative_step(const Pose& current, const Pose& next,
                           TranslationFrame frame) {
  RelativePose rel;
  rel.translation = next.position - current.position;
  if (frame == TranslationFrame::Local) {
    rel.translation = current.orientation.inverse().rotate(rel.translation);
  }
  rel.rotation = current.orientation.inverse() * next.orientation;
  return rel;
}

std::vector<Pose> integrate_relative(const Pose& initial,
                                     std::span<const RelativePose> steps,
                                     TranslationFrame frame) {
  std::vector<Pose> out;
  out.reserve(steps.size() + 1);
  out.push_back(initial);
  for (const RelativePose& step : steps) {
    const Pose& prev = out.back();
    Pose next;
    next.position = prev.position + (frame == TranslationFrame::Local
                                         ? prev.orientation.rotate(step.translation)
                                         : step.translation);
    next.orientation = prev.orientation * step.rotation;
    out.push_back(next);
  }
  return out;
}

}  // namespace demotraj
