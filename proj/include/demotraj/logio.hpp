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

// Line-delimited sensor logs, one file per sensor.
//
// Fields are separated by a single comma, no whitespace. Lines starting with
// '#' and empty lines are ignored.
//
//   pose log:    t,x,y,z,qx,qy,qz,qw,confidence
//                confidence is 0 (failed), 1 (low), 2 (medium) or 3 (high)
//   camera log:  t,frame_index,image_ref[,marker_id,u_px,v_px]...
//                image_ref must not contain commas
//
// Numbers are written in shortest round-trip form, so a log written and read
// back reproduces every double exactly. Readers report the 1-based line of
// the first malformed record.

#ifndef DEMOTRAJ_LOGIO_HPP_
#define DEMOTRAJ_LOGIO_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "demotraj/records.hpp"

namespace demotraj {

inline constexpr const char* kPoseLogHeader =
    "# t,x,y,z,qx,qy,qz,qw,confidence";
inline constexpr const char* kCameraLogHeader =
    "# t,frame_index,image_ref[,marker_id,u_px,v_px]...";

std::vector<PoseSample> parse_pose_log(std::istream& in,
                                       const std::string& source = "<pose log>");
std::vector<CameraSample> parse_camera_log(
    std::istream& in, const std::string& source = "<camera log>");

std::vector<PoseSample> read_pose_log(const std::filesystem::path& path);
std::vector<CameraSample> read_camera_log(const std::filesystem::path& path);

void write_pose_log(std::ostream& out, std::span<const PoseSample> poses);
void write_camera_log(std::ostream& out, std::span<const CameraSample> frames);

void save_pose_log(const std::filesystem::path& path,
                   std::span<const PoseSample> poses);
void save_camera_log(const std::filesystem::path& path,
                     std::span<const CameraSample> frames);

// Shortest round-trip decimal form of `v`.
std::string format_double(double v);

}  // namespace demotraj

#endif  // DEMOTRAJ_LOGIO_HPP_
