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

#include <algorithm>
#include <cmath>
#include <string>

#include "demotraj/error.hpp"

namespace demotraj {

void CompensationParams::validate() const {
  if (!(d_open >= 0.0) || !(d_close >= 0.0) || !std::isfinite(d_open) ||
      !std::isfinite(d_close)) {
    throw ConfigError("compensation needs finite d_close >= 0 and d_open >= 0");
  }
  if (!(w_max > 0.0) || !std::isfinite(w_max)) throw ConfigError("compensation w_max must be positive");
}

bool width_in_range(double w, const CompensationParams& params) {
  return w >= 0.0 && w <= params.w_max;
}

double compensation_distance(double w, const CompensationParams& params,
                             WidthRangePolicy policy) {
  if (!std::isfinite(w)) throw DomainError("gripper width is not finite");
  if (!width_in_range(w, params)) {
    if (policy == WidthRangePolicy::Strict) {
      throw DomainError("gripper width " + std::to_string(w) + " m outside [0, " +
                        std::to_string(params.w_max) + "]");
    }
    w = std::clamp(w, 0.0, params.w_max);
  }
  // Convex combination form: s == 0 and s == 1 hit the endpoints bit-exactly.
  const double s = w / params.w_max;
  return params.d_close * (1.0 - s) + params.d_open * s;
}

Pose corrected_tcp(const Pose& pose, double d) {
  const Vec3 z_axis = pose.orientation.rotate(Vec3::UnitZ());
  return {pose.position - d * z_axis, pose.orientation};
}

JointVector compensated_joint_command(const KinematicChain& chain, const Pose& pose,
                                      double w, const CompensationParams& params,
                                      const JointVector& seed, const IkConfig& cfg,
                                      WidthRangePolicy policy) {
  const double d = compensation_distance(w, params, policy);
  return solve_ik(chain, corrected_tcp(pose, d), seed, cfg).theta;
}

}  // namespace demotraj
