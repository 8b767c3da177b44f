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

// TCP correction for grippers whose jaws move the tool point as they close.
// The commanded TCP is pulled back along its own z axis by a distance that
// falls linearly from d_close (jaws closed) to d_open (jaws fully open).
//
// The width may be the commanded or the measured opening; both are in metres.

#ifndef DEMOTRAJ_COMPENSATION_HPP_
#define DEMOTRAJ_COMPENSATION_HPP_

#include "demotraj/geometry.hpp"
#include "demotraj/kinematics.hpp"

namespace demotraj {

struct CompensationParams {
  double d_close = 0.0;  // m, at width 0
  double d_open = 0.0;   // m, at width w_max
  double w_max = 0.0;    // m

  // Throws ConfigError.
  void validate() const;
};

enum class WidthRangePolicy {
  Clamp,   // widths outside [0, w_max] are clamped
  Strict,  // widths outside [0, w_max] throw DomainError
};

bool width_in_range(double w, const CompensationParams& params);

// d(w) = d_close - (d_close - d_open) / w_max * w, evaluated so that the two
// endpoints are reproduced exactly.
double compensation_distance(double w, const CompensationParams& params,
                             WidthRangePolicy policy = WidthRangePolicy::Clamp);

// position' = position - d * (R * e_z); orientation unchanged.
Pose corrected_tcp(const Pose& pose, double d);

// IK on the corrected TCP, keeping the original orientation.
JointVector compensated_joint_command(const KinematicChain& chain, const Pose& pose,
                                      double w, const CompensationParams& params,
                                      const JointVector& seed, const IkConfig& cfg = {},
                                      WidthRangePolicy policy = WidthRangePolicy::Clamp);

}  // namespace demotraj

#endif  // DEMOTRAJ_COMPENSATION_HPP_
