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

// Sensor sample types shared by the stream buffers, the quality gates and
// the log readers.

#ifndef DEMOTRAJ_RECORDS_HPP_
#define DEMOTRAJ_RECORDS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "demotraj/geometry.hpp"

namespace demotraj {

// Tracker confidence, totally ordered.
enum class ConfidenceLevel : std::uint8_t {
  Failed = 0,
  Low = 1,
  Medium = 2,
  High = 3,
};

std::string_view to_string(ConfidenceLevel level);
// Accepts 0..3; anything else yields nullopt.
std::optional<ConfidenceLevel> confidence_from_int(int value);

struct MarkerDetection {
  int marker_id = 0;
  double u = 0.0;  // pixels
  double v = 0.0;
};

// One tracker reading on the unified clock.
struct PoseSample {
  double t = 0.0;
  Pose pose;
  ConfidenceLevel confidence = ConfidenceLevel::High;
  // Set by repair_low_confidence on interpolated samples.
  bool repaired = false;
};

struct CameraSample {
  double t = 0.0;
  std::int64_t frame_index = 0;
  std::string image_ref;
  std::vector<MarkerDetection> detections;
};

using StreamRecord = std::variant<PoseSample, CameraSample>;

inline double timestamp(const StreamRecord& r) {
  return std::visit([](const auto& s) { return s.t; }, r);
}

}  // namespace demotraj

#endif  // DEMOTRAJ_RECORDS_HPP_
