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

#include "demotraj/records.hpp"

namespace demotraj {

std::string_view to_string(ConfidenceLevel level) {
  switch (level) {
    case ConfidenceLevel::Failed:
      return "failed";
    case ConfidenceLevel::Low:
      return "low";
    case ConfidenceLevel::Medium:
      return "medium";
    case ConfidenceLevel::High:
      return "high";
  }
  return "unknown";
}

std::optional<ConfidenceLevel> confidence_from_int(int value) {
  if (value < 0 || value > 3) return std::nullopt;
  return static_cast<ConfidenceLevel>(value);
}

}  // namespace demotraj
