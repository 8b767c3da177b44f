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

#ifndef DEMOTRAJ_TESTS_TEST_UTIL_HPP_
#define DEMOTRAJ_TESTS_TEST_UTIL_HPP_

#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "demotraj/geometry.hpp"

namespace demotraj::testing {

inline std::filesystem::path DataPath(const std::string& name) {
  return std::filesystem::path(DEMOTRAJ_TEST_DATA_DIR) / name;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("demotraj_test_" + std::to_string(stamp) + "_" + std::to_string(counter_++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  static inline int counter_ = 0;
  std::filesystem::path path_;
};

// Rotation about a coordinate axis built from an explicit matrix, independent
// of the library's axis-angle path.
inline UnitQuaternion Rz(double a) {
  Eigen::Matrix3d m;
  m << std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a), 0, 0, 0, 1;
  return UnitQuaternion::from_matrix(m);
}
inline UnitQuaternion Rx(double a) {
  Eigen::Matrix3d m;
  m << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  return UnitQuaternion::from_matrix(m);
}

inline Pose MakePose(const UnitQuaternion& q, double x, double y, double z) {
  Pose p;
  p.position = Vec3(x, y, z);
  p.orientation = q;
  return p;
}

inline UnitQuaternion RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return UnitQuaternion(n(rng), n(rng), n(rng), n(rng));
}

inline Pose RandomPose(std::mt19937_64& rng, double extent = 1.0) {
  std::uniform_real_distribution<double> u(-extent, extent);
  Pose p;
  p.position = Vec3(u(rng), u(rng), u(rng));
  p.orientation = RandomRotation(rng);
  return p;
}

inline double MaxAbs(const Vec3& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace demotraj::testing

#define EXPECT_VEC3_NEAR(a, b, tol) \
  EXPECT_LE(((a) - (b)).cwiseAbs().maxCoeff(), (tol)) << "got " << (a).transpose()

#define EXPECT_ROT_NEAR(a, b, tol) \
  EXPECT_LE(::demotraj::quaternion_distance((a), (b)), (tol))

#endif  // DEMOTRAJ_TESTS_TEST_UTIL_HPP_
