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

#include "demotraj/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "demotraj/error.hpp"

namespace demotraj {

void GripperCalib::validate() const {
  if (!(d_max_px > d_min_px) || !(d_min_px >= 0.0)) {
    throw ConfigError("gripper calibration needs d_max_px > d_min_px >= 0");
  }
  if (!(g_max_mm > 0.0)) throw ConfigError("g_max_mm must be positive");
  if (!std::isfinite(axis_u_px)) throw ConfigError("axis_u_px must be finite");
  if (left_id == right_id) {
    throw ConfigError("left_id and right_id must differ");
  }
}

std::string_view to_string(WidthProvenance p) {
  switch (p) {
    case WidthProvenance::TwoMarkers:
      return "two_markers";
    case WidthProvenance::Mirrored:
      return "mirrored";
    case WidthProvenance::Imputed:
      return "imputed";
  }
  return "unknown";
}

double width_from_distance(double d_px, const GripperCalib& calib) {
  const double s = (d_px - calib.d_min_px) / (calib.d_max_px - calib.d_min_px);
  return std::clamp(s, 0.0, 1.0) * calib.g_max_mm;
}

double distance_from_width(double width_mm, const GripperCalib& calib) {
  return calib.d_min_px +
         (width_mm / calib.g_max_mm) * (calib.d_max_px - calib.d_min_px);
}

MarkerDetection mirror_marker(const MarkerDetection& m, double axis_u_px) {
  return {m.marker_id, 2.0 * axis_u_px - m.u, m.v};
}

std::optional<WidthSample> width_from_frame(
    std::span<const MarkerDetection> detections, const GripperCalib& calib) {
  const MarkerDetection* left = nullptr;
  const MarkerDetection* right = nullptr;
  std::set<int> seen;
  for (const MarkerDetection& d : detections) {
    if (!seen.insert(d.marker_id).second) {
      throw DetectionError("marker id " + std::to_string(d.marker_id) +
                           " detected twice in one frame");
    }
    if (d.marker_id == calib.left_id) left = &d;
    if (d.marker_id == calib.right_id) right = &d;
  }

  if (left != nullptr && right != nullptr) {
    const double d = std::hypot(left->u - right->u, left->v - right->v);
    return WidthSample{width_from_distance(d, calib), WidthProvenance::TwoMarkers};
  }
  const MarkerDetection* known = left != nullptr ? left : right;
  if (known == nullptr) return std::nullopt;
  const MarkerDetection other = mirror_marker(*known, calib.axis_u_px);
  const double d = std::hypot(known->u - other.u, known->v - other.v);
  return WidthSample{width_from_distance(d, calib), WidthProvenance::Mirrored};
}

WidthSeries impute_series(std::span<const std::optional<WidthSample>> raw,
                          ImputeMethod method) {
  std::vector<std::size_t> observed;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i]) observed.push_back(i);
  }
  if (observed.empty()) {
    throw ImputationError("width series has no observed value to impute from");
  }

  WidthSeries out;
  out.widths.resize(raw.size());
  out.provenance.assign(raw.size(), WidthProvenance::Imputed);
  for (std::size_t i : observed) {
    out.widths[i] = raw[i]->width_mm;
    out.provenance[i] = raw[i]->provenance;
  }

  for (std::size_t i = 0; i < observed.front(); ++i) {
    out.widths[i] = out.widths[observed.front()];
  }
  for (std::size_t i = observed.back() + 1; i < raw.size(); ++i) {
    out.widths[i] = out.widths[observed.back()];
  }
  for (std::size_t k = 0; k + 1 < observed.size(); ++k) {
    const std::size_t a = observed[k];
    const std::size_t b = observed[k + 1];
    const double wa = out.widths[a];
    const double wb = out.widths[b];
    for (std::size_t i = a + 1; i < b; ++i) {
      if (method == ImputeMethod::Hold) {
        out.widths[i] = wa;
      } else {
        const double s = static_cast<double>(i - a) / static_cast<double>(b - a);
        out.widths[i] = wa + s * (wb - wa);
      }
    }
  }
  return out;
}

}  // namespace demotraj
