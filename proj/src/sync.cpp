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

#include "demotraj/sync.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "demotraj/error.hpp"

namespace demotraj {

int greatest_common_frequency(std::span<const int> rates_hz) {
  if (rates_hz.empty()) throw ConfigError("no sensor rates given");
  int g = 0;
  for (int r : rates_hz) {
    if (r < 1) {
      throw ConfigError("sensor rate must be >= 1 Hz, got " + std::to_string(r));
    }
    g = std::gcd(g, r);
  }
  return g;
}

int SyncConfig::target_rate() const {
  if (target_rate_hz) return *target_rate_hz;
  const int rates[] = {pose_rate_hz, camera_rate_hz};
  return greatest_common_frequency(rates);
}

int SyncConfig::decimation_factor() const {
  validate();
  return camera_rate_hz / target_rate();
}

double SyncConfig::max_pair_offset() const {
  return max_pair_offset_s.value_or(0.5 / pose_rate_hz);
}

void SyncConfig::validate() const {
  const int rates[] = {pose_rate_hz, camera_rate_hz};
  greatest_common_frequency(rates);  // rejects rates < 1
  if (target_rate_hz) {
    const int t = *target_rate_hz;
    if (t < 1 || camera_rate_hz % t != 0 || pose_rate_hz % t != 0) {
      throw ConfigError("target rate " + std::to_string(t) +
                        " Hz gives a non-integer decimation of " +
                        std::to_string(camera_rate_hz) + " Hz / " +
                        std::to_string(pose_rate_hz) + " Hz streams");
    }
  }
  const double bound = 0.5 / pose_rate_hz;
  const double off = max_pair_offset();
  if (!(off >= 0.0) || off > bound) {
    throw ConfigError("max_pair_offset_s must lie in [0, " +
                      std::to_string(bound) + "]");
  }
}

SyncResult subsample_and_pair(std::span<const CameraSample> camera,
                              std::span<const PoseSample> poses,
                              const SyncConfig& cfg) {
  if (camera.empty() || poses.empty()) {
    throw InputError("subsample_and_pair needs non-empty camera and pose buffers");
  }
  const int k = cfg.decimation_factor();
  const double max_off = cfg.max_pair_offset() + kPairOffsetSlackS;

  SyncResult result;
  SyncStats& st = result.stats;
  st.target_rate_hz = cfg.target_rate();
  st.decimation_factor = k;
  st.camera_frames = camera.size();

  if (camera.back().t < poses.front().t - max_off ||
      camera.front().t > poses.back().t + max_off) {
    st.empty_overlap = true;
    for (const CameraSample& c : camera) {
      if ((c.frame_index - camera.front().frame_index) % k == 0) {
        ++st.retained_frames;
      }
    }
    st.dropped_frames = st.retained_frames;
    return result;
  }

  const std::int64_t first_index = camera.front().frame_index;
  double sum_abs = 0.0;
  std::size_t j = 0;
  for (const CameraSample& frame : camera) {
    if ((frame.frame_index - first_index) % k != 0) continue;
    ++st.retained_frames;

    while (j + 1 < poses.size() && poses[j + 1].t <= frame.t) ++j;
    std::size_t best = j;
    if (poses[j].t <= frame.t && j + 1 < poses.size() &&
        std::abs(poses[j + 1].t - frame.t) < std::abs(poses[j].t - frame.t)) {
      best = j + 1;
    }

    const double offset = poses[best].t - frame.t;
    if (std::abs(offset) > max_off) {
      ++st.dropped_frames;
      continue;
    }
    sum_abs += std::abs(offset);
    st.max_abs_offset_s = std::max(st.max_abs_offset_s, std::abs(offset));
    result.frames.push_back({frame.t, frame, poses[best], offset, best});
  }
  st.emitted_frames = result.frames.size();
  if (st.emitted_frames > 0) {
    st.mean_abs_offset_s = sum_abs / static_cast<double>(st.emitted_frames);
  }
  return result;
}

void StreamBuffers::add_stream(const std::string& id, StreamKind kind) {
  if (streams_.count(id) != 0) {
    throw ConfigError("stream '" + id + "' declared twice");
  }
  auto s = std::make_unique<Stream>();
  s->kind = kind;
  streams_.emplace(id, std::move(s));
}

bool StreamBuffers::has_stream(const std::string& id) const {
  return streams_.count(id) != 0;
}

const StreamBuffers::Stream& StreamBuffers::find(const std::string& id) const {
  auto it = streams_.find(id);
  if (it == streams_.end()) throw InputError("unknown stream '" + id + "'");
  return *it->second;
}

StreamBuffers::Stream& StreamBuffers::find(const std::string& id) {
  auto it = streams_.find(id);
  if (it == streams_.end()) throw InputError("unknown stream '" + id + "'");
  return *it->second;
}

void StreamBuffers::ingest(const std::string& id, StreamRecord record) {
  Stream& s = find(id);
  const double t = timestamp(record);
  if (!std::isfinite(t)) {
    throw InputError("stream '" + id + "': non-finite timestamp");
  }
  std::lock_guard<std::mutex> lock(s.mu);
  if (auto* pose = std::get_if<PoseSample>(&record)) {
    if (s.kind != StreamKind::Pose) {
      throw InputError("stream '" + id + "' does not accept pose samples");
    }
    if (!s.poses.empty() && !(t > s.poses.back().t)) {
      throw MonotonicityError(id, s.poses.back().t, t);
    }
    s.poses.push_back(std::move(*pose));
  } else {
    auto& frame = std::get<CameraSample>(record);
    if (s.kind != StreamKind::Camera) {
      throw InputError("stream '" + id + "' does not accept camera samples");
    }
    if (!s.frames.empty()) {
      if (!(t > s.frames.back().t)) {
        throw MonotonicityError(id, s.frames.back().t, t);
      }
      if (frame.frame_index <= s.frames.back().frame_index) {
        throw InputError("stream '" + id + "': frame index " +
                         std::to_string(frame.frame_index) +
                         " does not follow " +
                         std::to_string(s.frames.back().frame_index));
      }
    }
    s.frames.push_back(std::move(frame));
  }
}

void StreamBuffers::reset() {
  for (auto& [id, s] : streams_) {
    std::lock_guard<std::mutex> lock(s->mu);
    s->poses.clear();
    s->poses.shrink_to_fit();
    s->frames.clear();
    s->frames.shrink_to_fit();
  }
}

std::size_t StreamBuffers::size(const std::string& id) const {
  const Stream& s = find(id);
  std::lock_guard<std::mutex> lock(s.mu);
  return s.kind == StreamKind::Pose ? s.poses.size() : s.frames.size();
}

std::vector<PoseSample> StreamBuffers::pose_snapshot(const std::string& id) const {
  const Stream& s = find(id);
  if (s.kind != StreamKind::Pose) {
    throw InputError("stream '" + id + "' is not a pose stream");
  }
  std::lock_guard<std::mutex> lock(s.mu);
  return s.poses;
}

std::vector<CameraSample> StreamBuffers::camera_snapshot(
    const std::string& id) const {
  const Stream& s = find(id);
  if (s.kind != StreamKind::Camera) {
    throw InputError("stream '" + id + "' is not a camera stream");
  }
  std::lock_guard<std::mutex> lock(s.mu);
  return s.frames;
}

}  // namespace demotraj
