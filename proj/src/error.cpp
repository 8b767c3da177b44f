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

#include "demotraj/error.hpp"

#include <sstream>
#include <utility>

namespace demotraj {
namespace {

std::string MonotonicityMessage(const std::string& stream, double last_t,
                                double new_t) {
  std::ostringstream os;
  os.precision(17);
  os << "stream '" << stream << "': timestamp " << new_t
     << " does not follow last timestamp " << last_t;
  return os.str();
}

std::string ParseMessage(const std::string& source, std::size_t line,
                         const std::string& what) {
  std::ostringstream os;
  os << source;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  return os.str();
}

std::string UnreachableMessage(double pos, double rot,
                               std::optional<std::size_t> frame) {
  std::ostringstream os;
  if (frame) os << "frame " << *frame << ": ";
  os << "target unreachable (best residual " << pos << " m, " << rot
     << " rad)";
  return os.str();
}

}  // namespace

MonotonicityError::MonotonicityError(std::string stream, double last_t,
                                     double new_t)
    : InputError(MonotonicityMessage(stream, last_t, new_t)),
      stream_(std::move(stream)),
      last_t_(last_t),
      new_t_(new_t) {}

ParseError::ParseError(const std::string& source, std::size_t line,
                       const std::string& what)
    : Error(ParseMessage(source, line, what)), line_(line) {}

UnrepairableError::UnrepairableError(std::size_t first, std::size_t last)
    : Error("low-confidence run [" + std::to_string(first) + ", " +
            std::to_string(last) + "] touches the end of the stream"),
      first_(first),
      last_(last) {}

UnreachableTargetError::UnreachableTargetError(
    double position_residual, double rotation_residual,
    std::optional<std::size_t> frame)
    : Error(UnreachableMessage(position_residual, rotation_residual, frame)),
      position_residual_(position_residual),
      rotation_residual_(rotation_residual),
      frame_(frame) {}

SchemaError::SchemaError(std::string path, const std::string& what)
    : Error("schema error at '" + path + "': " + what), path_(std::move(path)) {}

}  // namespace demotraj
