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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

std::vector<PoseSample> PoseGrid(std::size_t n, double rate, double t0 = 0.0) {
  std::vector<PoseSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].t = t0 + static_cast<double>(i) / rate;
    out[i].pose.position = Vec3(static_cast<double>(i), 0, 0);
  }
  return out;
}

std::vector<CameraSample> CameraGrid(std::size_t n, double rate, double t0 = 0.0) {
  std::vector<CameraSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].t = t0 + static_cast<double>(i) / rate;
    out[i].frame_index = static_cast<std::int64_t>(i);
    out[i].image_ref = "f" + std::to_string(i);
  }
  return out;
}

// Exhaustive nearest pose; ties go to the earlier sample.
std::size_t BruteNearest(const std::vector<PoseSample>& poses, double t) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < poses.size(); ++i) {
    if (std::abs(poses[i].t - t) < std::abs(poses[best].t - t)) best = i;
  }
  return best;
}

TEST(GreatestCommonFrequencyTest, Examples) {
  EXPECT_EQ(greatest_common_frequency(std::vector<int>{200, 60}), 20);
  EXPECT_EQ(greatest_common_frequency(std::vector<int>{60, 60}), 60);
  EXPECT_EQ(greatest_common_frequency(std::vector<int>{30, 200}), 10);
}

TEST(GreatestCommonFrequencyTest, MatchesStdGcd) {
  for (int a = 1; a < 120; a += 7) {
    for (int b = 1; b < 250; b += 11) {
      EXPECT_EQ(greatest_common_frequency(std::vector<int>{a, b}), std::gcd(a, b));
    }
  }
}

TEST(GreatestCommonFrequencyTest, RejectsBadInput) {
  EXPECT_THROW(greatest_common_frequency(std::vector<int>{}), ConfigError);
  EXPECT_THROW(greatest_common_frequency(std::vector<int>{200, 0}), ConfigError);
}

TEST(SyncConfigTest, DefaultsFollowTheRates) {
  SyncConfig cfg;
  EXPECT_EQ(cfg.target_rate(), 20);
  EXPECT_EQ(cfg.decimation_factor(), 3);
  EXPECT_DOUBLE_EQ(cfg.max_pair_offset(), 0.0025);
  cfg.target_rate_hz = 7;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.target_rate_hz = 10;
  EXPECT_EQ(cfg.decimation_factor(), 6);
}

TEST(StreamBuffersTest, IngestAppendsAndRejectsNonMonotonic) {
  StreamBuffers b;
  b.add_stream("pose", StreamKind::Pose);
  b.add_stream("cam", StreamKind::Camera);
  PoseSample p;
  p.t = 0.0;
  b.ingest("pose", p);
  p.t = 0.005;
  b.ingest("pose", p);
  EXPECT_EQ(b.size("pose"), 2u);
  p.t = 0.0;
  try {
    b.ingest("pose", p);
    FAIL() << "expected MonotonicityError";
  } catch (const MonotonicityError& e) {
    EXPECT_EQ(e.stream(), "pose");
    EXPECT_DOUBLE_EQ(e.last_timestamp(), 0.005);
    EXPECT_DOUBLE_EQ(e.rejected_timestamp(), 0.0);
  }
  EXPECT_EQ(b.size("pose"), 2u);
  EXPECT_EQ(b.size("cam"), 0u);
}

TEST(StreamBuffersTest, RejectsUnknownStreamsAndWrongPayloads) {
  StreamBuffers b;
  b.add_stream("pose", StreamKind::Pose);
  EXPECT_THROW(b.ingest("other", PoseSample{}), InputError);
  EXPECT_THROW(b.ingest("pose", CameraSample{}), InputError);
  EXPECT_THROW(b.add_stream("pose", StreamKind::Pose), ConfigError);
}

TEST(StreamBuffersTest, ResetKeepsStreams) {
  StreamBuffers b;
  b.add_stream("pose", StreamKind::Pose);
  b.reset();
  EXPECT_EQ(b.size("pose"), 0u);
  for (int i = 0; i < 10000; ++i) {
    PoseSample p;
    p.t = i * 0.005;
    b.ingest("pose", p);
  }
  b.reset();
  EXPECT_EQ(b.size("pose"), 0u);
  PoseSample p;
  p.t = 0.0;
  b.ingest("pose", p);
  EXPECT_EQ(b.size("pose"), 1u);
}

TEST(StreamBuffersTest, ShuffledInterleavingKeepsPerStreamOrder) {
  std::mt19937_64 rng(41);
  std::vector<std::pair<int, double>> merged;
  for (int i = 0; i < 500; ++i) merged.push_back({0, i * 0.005});
  for (int i = 0; i < 150; ++i) merged.push_back({1, i / 60.0});
  // Random interleaving that keeps each stream's own order.
  std::vector<int> order;
  for (const auto& m : merged) order.push_back(m.first);
  std::shuffle(order.begin(), order.end(), rng);
  StreamBuffers b;
  b.add_stream("pose", StreamKind::Pose);
  b.add_stream("cam", StreamKind::Camera);
  int pi = 0;
  int ci = 0;
  for (int which : order) {
    if (which == 0) {
      PoseSample p;
      p.t = pi++ * 0.005;
      b.ingest("pose", p);
    } else {
      CameraSample c;
      c.t = ci / 60.0;
      c.frame_index = ci++;
      b.ingest("cam", c);
    }
  }
  const auto poses = b.pose_snapshot("pose");
  const auto frames = b.camera_snapshot("cam");
  ASSERT_EQ(poses.size(), 500u);
  ASSERT_EQ(frames.size(), 150u);
  for (std::size_t i = 1; i < poses.size(); ++i) EXPECT_GT(poses[i].t, poses[i - 1].t);
  for (std::size_t i = 0; i < frames.size(); ++i) EXPECT_EQ(frames[i].frame_index, (long)i);
}

TEST(StreamBuffersTest, OneProducerPerStreamConcurrently) {
  StreamBuffers b;
  b.add_stream("pose", StreamKind::Pose);
  b.add_stream("cam", StreamKind::Camera);
  std::thread tp([&] {
    for (int i = 0; i < 20000; ++i) {
      PoseSample p;
      p.t = i * 0.005;
      b.ingest("pose", p);
    }
  });
  std::thread tc([&] {
    for (int i = 0; i < 6000; ++i) {
      CameraSample c;
      c.t = i / 60.0;
      c.frame_index = i;
      b.ingest("cam", c);
    }
  });
  tp.join();
  tc.join();
  EXPECT_EQ(b.size("pose"), 20000u);
  EXPECT_EQ(b.size("cam"), 6000u);
}

TEST(SubsampleAndPairTest, KeepsEveryThirdFrame) {
  const auto poses = PoseGrid(2001, 200.0);
  const auto frames = CameraGrid(600, 60.0);
  const SyncResult r = subsample_and_pair(frames, poses, SyncConfig{});
  ASSERT_EQ(r.frames.size(), 200u);
  for (std::size_t i = 0; i < r.frames.size(); ++i) {
    EXPECT_EQ(r.frames[i].camera.frame_index, static_cast<std::int64_t>(3 * i));
  }
  EXPECT_EQ(r.stats.target_rate_hz, 20);
  EXPECT_EQ(r.stats.decimation_factor, 3);
  EXPECT_EQ(r.stats.camera_frames, 600u);
  EXPECT_EQ(r.stats.retained_frames, 200u);
  EXPECT_EQ(r.stats.dropped_frames, 0u);
  EXPECT_LE(r.stats.max_abs_offset_s, 1e-12);
}

TEST(SubsampleAndPairTest, ExactGridPairsWithZeroOffset) {
  const auto poses = PoseGrid(101, 200.0);
  CameraSample c;
  c.t = 0.050;
  const std::vector<CameraSample> frames{c};
  const SyncResult r = subsample_and_pair(frames, poses, SyncConfig{});
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.frames[0].pose_index, 10u);
  EXPECT_NEAR(r.frames[0].pair_offset_s, 0.0, 1e-15);
}

TEST(SubsampleAndPairTest, TiesGoToTheEarlierPose) {
  std::vector<PoseSample> poses(2);
  poses[0].t = 0.0;
  poses[1].t = 0.004;
  CameraSample c;
  c.t = 0.002;
  const SyncResult r = subsample_and_pair(std::vector<CameraSample>{c}, poses, SyncConfig{});
  ASSERT_EQ(r.frames.size(), 1u);
  EXPECT_EQ(r.frames[0].pose_index, 0u);
}

TEST(SubsampleAndPairTest, MatchesBruteForceOnJitteredStreams) {
  std::mt19937_64 rng(97);
  std::uniform_real_distribution<double> jitter(-0.0015, 0.0015);
  for (int trial = 0; trial < 5; ++trial) {
    auto poses = PoseGrid(3000, 200.0);
    for (std::size_t i = 1; i < poses.size(); ++i) poses[i].t += 0.4 * jitter(rng);
    auto frames = CameraGrid(900, 60.0);
    for (auto& f : frames) f.t += jitter(rng);
    const SyncResult r = subsample_and_pair(frames, poses, SyncConfig{});
    std::size_t k = 0;
    for (std::size_t i = 0; i < frames.size(); i += 3) {
      const std::size_t best = BruteNearest(poses, frames[i].t);
      if (std::abs(poses[best].t - frames[i].t) > 0.0025 + kPairOffsetSlackS) continue;
      ASSERT_LT(k, r.frames.size());
      EXPECT_EQ(r.frames[k].camera.frame_index, frames[i].frame_index);
      EXPECT_EQ(r.frames[k].pose_index, best);
      EXPECT_EQ(r.frames[k].pair_offset_s, poses[best].t - frames[i].t);
      ++k;
    }
    EXPECT_EQ(k, r.frames.size());
    EXPECT_EQ(r.stats.emitted_frames + r.stats.dropped_frames, r.stats.retained_frames);
    for (std::size_t i = 1; i < r.frames.size(); ++i) {
      EXPECT_GT(r.frames[i].tick_time, r.frames[i - 1].tick_time);
    }
  }
}

TEST(SubsampleAndPairTest, DropsFramesWithoutANearbyPose) {
  auto poses = PoseGrid(201, 200.0);
  // Remove poses around t = 0.5 s.
  poses.erase(std::remove_if(poses.begin(), poses.end(),
                             [](const PoseSample& p) { return p.t > 0.48 && p.t < 0.52; }),
              poses.end());
  const auto frames = CameraGrid(61, 60.0);
  const SyncResult r = subsample_and_pair(frames, poses, SyncConfig{});
  EXPECT_EQ(r.stats.retained_frames, 21u);
  EXPECT_EQ(r.stats.dropped_frames, 1u);
  EXPECT_EQ(r.frames.size(), 20u);
  for (const auto& f : r.frames) EXPECT_LE(std::abs(f.pair_offset_s), 0.0025 + 1e-9);
}

TEST(SubsampleAndPairTest, DisjointSpansGiveEmptyOutput) {
  const auto poses = PoseGrid(100, 200.0);
  const auto frames = CameraGrid(30, 60.0, 10.0);
  const SyncResult r = subsample_and_pair(frames, poses, SyncConfig{});
  EXPECT_TRUE(r.frames.empty());
  EXPECT_TRUE(r.stats.empty_overlap);
  EXPECT_EQ(r.stats.dropped_frames, r.stats.retained_frames);
}

TEST(SubsampleAndPairTest, EmptyBuffersAreRejected) {
  EXPECT_THROW(subsample_and_pair({}, PoseGrid(3, 200.0), SyncConfig{}), InputError);
  EXPECT_THROW(subsample_and_pair(CameraGrid(3, 60.0), {}, SyncConfig{}), InputError);
}

TEST(SubsampleAndPairTest, IsDeterministic) {
  const auto poses = PoseGrid(1000, 200.0);
  const auto frames = CameraGrid(300, 60.0, 0.0007);
  const SyncResult a = subsample_and_pair(frames, poses, SyncConfig{});
  const SyncResult b = subsample_and_pair(frames, poses, SyncConfig{});
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (std::size_t i = 0; i < a.frames.size(); ++i) {
    EXPECT_EQ(a.frames[i].pose_index, b.frames[i].pose_index);
    EXPECT_EQ(a.frames[i].pair_offset_s, b.frames[i].pair_offset_s);
  }
}

}  // namespace
}  // namespace demotraj
