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

// Multi-rate stream buffering and camera/pose synchronization.
//
// Streams share one clock. The camera stream is decimated to the greatest
// common frequency of the nominal rates (every k-th stored frame index) and
// each retained frame is paired with the nearest pose sample in time.

#ifndef DEMOTRAJ_SYNC_HPP_
#define DEMOTRAJ_SYNC_HPP_

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "demotraj/records.hpp"

namespace demotraj {

int greatest_common_frequency(std::span<const int> rates_hz);

struct SyncConfig {
  int pose_rate_hz = 200;
  int camera_rate_hz = 60;
  // Defaults to half the pose sampling interval.
  std::optional<double> max_pair_offset_s;
  // Must divide both rates; defaults to their greatest common frequency.
  std::optional<int> target_rate_hz;

  int target_rate() const;
  // camera_rate / target_rate.
  int decimation_factor() const;
  double max_pair_offset() const;
  // Throws ConfigError.
  void validate() const;
};

// Pair offsets this close to the bound are accepted (clock resolution).
inline constexpr double kPairOffsetSlackS = 1e-9;

struct SyncedFrame {
  double tick_time = 0.0;
  CameraSample camera;
  PoseSample pose;
  // pose time - camera time
  double pair_offset_s = 0.0;
  // Index of the paired sample in the pose buffer.
  std::size_t pose_index = 0;
};

struct SyncStats {
  int target_rate_hz = 0;
  int decimation_factor = 0;
  std::size_t camera_frames = 0;
  std::size_t retained_frames = 0;
  std::size_t emitted_frames = 0;
  std::size_t dropped_frames = 0;
  double max_abs_offset_s = 0.0;
  double mean_abs_offset_s = 0.0;
  // Camera and pose time spans do not overlap.
  bool empty_overlap = false;
};

struct SyncResult {
  std::vector<SyncedFrame> frames;
  SyncStats stats;
};

// Both buffers must be sorted by time (as StreamBuffers guarantees).
SyncResult subsample_and_pair(std::span<const CameraSample> camera,
                              std::span<const PoseSample> poses,
                              const SyncConfig& cfg);

enum class StreamKind { Pose, Camera };

// Per-stream append-only buffers. Streams are declared up front; afterwards
// each stream may be fed by one producer thread concurrently with the others.
// Snapshots copy under the stream's lock.
class StreamBuffers {
 public:
  StreamBuffers() = default;

  void add_stream(const std::string& id, StreamKind kind);
  bool has_stream(const std::string& id) const;

  // Throws MonotonicityError on a non-increasing timestamp, InputError on an
  // unknown stream or a payload of the wrong kind.
  void ingest(const std::string& id, StreamRecord record);

  // Empties every buffer; declared streams are kept.
  void reset();

  std::size_t size(const std::string& id) const;
  std::vector<PoseSample> pose_snapshot(const std::string& id) const;
  std::vector<CameraSample> camera_snapshot(const std::string& id) const;

 private:
  struct Stream {
    StreamKind kind;
    mutable std::mutex mu;
    std::vector<PoseSample> poses;
    std::vector<CameraSample> frames;
  };

  const Stream& find(const std::string& id) const;
  Stream& find(const std::string& id);

  std::map<std::string, std::unique_ptr<Stream>> streams_;
};

}  // namespace demotraj

#endif  // DEMOTRAJ_SYNC_HPP_
