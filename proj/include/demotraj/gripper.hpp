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

// Gripper opening from the pixel distance between two jaw markers.
//
//   W = clamp((d - d_min) / (d_max - d_min), 0, 1) * G_max
//
// With a single visible marker the missing one is obtained by reflecting the
// visible center across the vertical image line u = axis_u_px.

#ifndef DEMOTRAJ_GRIPPER_HPP_
#define DEMOTRAJ_GRIPPER_HPP_

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "demotraj/records.hpp"

namespace demotraj {

struct GripperCalib {
  double d_max_px = 0.0;  // marker distance at full opening
  double d_min_px = 0.0;  // marker distance when closed
  double g_max_mm = 0.0;  // physical opening at d_max
  double axis_u_px = 0.0;
  int left_id = 0;
  int right_id = 1;

  // Throws ConfigError.
  void validate() const;
};

enum class WidthProvenance { TwoMarkers, Mirrored, Imputed };
std::string_view to_string(WidthProvenance p);

struct WidthSample {
  double width_mm = 0.0;
  WidthProvenance provenance = WidthProvenance::TwoMarkers;
};

// Clamped linear pixel-distance to width map.
double width_from_distance(double d_px, const GripperCalib& calib);
// Inverse of the unclamped map; used to synthesize detections.
double distance_from_width(double width_mm, const GripperCalib& calib);

MarkerDetection mirror_marker(const MarkerDetection& m, double axis_u_px);

// nullopt when neither jaw marker is visible. Markers other than the two jaw
// ids are ignored. Throws DetectionError on duplicate ids within the frame.
std::optional<WidthSample> width_from_frame(
    std::span<const MarkerDetection> detections, const GripperCalib& calib);

enum class ImputeMethod {
  Linear,  // interior gaps interpolated between observed neighbours
  Hold,    // interior gaps take the previous observed value
};

struct WidthSeries {
  std::vector<double> widths;  // mm
  std::vector<WidthProvenance> provenance;
};

// Fills gaps; leading and trailing gaps hold the nearest observed value.
// Observed values pass through unchanged. Throws ImputationError when every
// entry is missing.
WidthSeries impute_series(std::span<const std::optional<WidthSample>> raw,
                          ImputeMethod method = ImputeMethod::Linear);

}  // namespace demotraj

#endif  // DEMOTRAJ_GRIPPER_HPP_
