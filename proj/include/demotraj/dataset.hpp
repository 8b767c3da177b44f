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

// Demonstration episodes and their HDF5 layout.
//
// One file per episode, episode_<idx>.hdf5:
//
//   /observations/images/<camera>  uint8 (T, H, W, 3), or variable-length
//                                  UTF-8 strings (T,) holding image paths
//   /observations/qpos             float64 (T, 7)
//   /action                        float64 (T, 7), mirrors qpos
//   root attribute "sim"           bool (HDF5 enum FALSE=0/TRUE=1 on int8,
//                                  the h5py boolean encoding)
//
// Optional extension datasets, written only when present:
//
//   /observations/gripper_width    float64 (T, 1), millimetres
//   /observations/timestamps       float64 (T,), seconds on the unified clock
//
// Attributes on /observations/qpos:
//   "representation"  "tcp_absolute" | "tcp_relative" | "joint"
//   "initial_pose"    float64 (7,), tcp_relative only
// Attribute on each image dataset:
//   "source_resolution_hw"  int64 (2,), nominal capture height and width
//
// Row layouts of qpos/action:
//   tcp_absolute  [x, y, z, qx, qy, qz, qw] of the TCP in the robot base frame
//   tcp_relative  row i is the step from TCP i to TCP i+1 (translation in the
//                 base frame, rotation R_i^-1 R_{i+1}); the last row is the
//                 zero step
//   joint         joint angles in chain order, zero-padded to 7 columns
//
// Files are written to a temporary sibling and renamed, without object
// timestamps and with contiguous storage, so equal episodes give identical
// bytes.

#ifndef DEMOTRAJ_DATASET_HPP_
#define DEMOTRAJ_DATASET_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "demotraj/geometry.hpp"
#include "demotraj/gripper.hpp"
#include "demotraj/kinematics.hpp"
#include "demotraj/sync.hpp"

namespace demotraj {

inline constexpr const char* kDefaultCameraName = "wrist";
inline constexpr std::size_t kMaxEpisodesPerDirectory = 50;
inline constexpr std::size_t kRowWidth = 7;
// Nominal capture resolution recorded with every image dataset.
inline constexpr std::array<std::int64_t, 2> kNominalResolutionHW = {1920, 1080};

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Representation { TcpAbsolute, TcpRelative, Joint };
std::string_view to_string(Representation r);
// Throws ConfigError on an unknown name.
Representation representation_from_string(std::string_view name);

// Embedded frames, row-major (T, H, W, 3).
struct ImageStack {
  std::size_t frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> pixels;

  bool operator==(const ImageStack&) const = default;
};

struct CameraImages {
  std::string name = kDefaultCameraName;
  // Embedded pixels or external image references (one path per frame).
  std::variant<ImageStack, std::vector<std::string>> data;
  std::array<std::int64_t, 2> source_resolution_hw = kNominalResolutionHW;

  std::size_t frames() const;
  bool operator==(const CameraImages&) const = default;
};

// Dataset outside the known layout, kept byte-for-byte across read/write.
struct ExtraDataset {
  std::string path;                     // e.g. "/observations/tactile"
  std::vector<unsigned char> datatype;  // H5Tencode blob
  std::vector<std::uint64_t> dims;
  std::vector<unsigned char> bytes;

  bool operator==(const ExtraDataset&) const = default;
};

struct Episode {
  std::vector<CameraImages> cameras;  // read back in name order
  RowMatrix qpos;
  RowMatrix action;
  std::optional<std::vector<double>> gripper_width;  // mm
  std::optional<std::vector<double>> timestamps;     // s
  std::optional<bool> sim = false;
  Representation representation = Representation::TcpAbsolute;
  std::optional<Pose> initial_pose;  // tcp_relative
  std::vector<ExtraDataset> extras;

  // Rows of qpos.
  std::size_t length() const { return static_cast<std::size_t>(qpos.rows()); }
};

struct AssemblyInput {
  std::span<const SyncedFrame> synced;
  std::span<const Pose> tcp;           // TCP modes
  std::span<const JointVector> joints; // joint mode
  const WidthSeries* widths = nullptr;
  Representation mode = Representation::TcpAbsolute;
  std::string camera_name = kDefaultCameraName;
};

// Builds an episode with external image references taken from the synced
// camera samples. Throws AssemblyError when the inputs differ in length or a
// joint vector has more than 7 entries.
Episode assemble(const AssemblyInput& in);

// Throws IoError; on failure no file is left at `path`.
void write_episode(const std::filesystem::path& path, const Episode& ep);
// Throws SchemaError naming the missing or malformed object, IoError.
Episode read_episode(const std::filesystem::path& path);

// Every object in the file, sorted: "/action (Dataset)",
// "/observations (Group)", ..., and root attributes as "@sim".
std::vector<std::string> list_hierarchy(const std::filesystem::path& path);

struct Finding {
  std::string check;  // shape, columns, quaternion_norm, sim, finite, images
  std::string message;
  std::optional<std::size_t> row;
};

struct ValidationReport {
  std::vector<Finding> findings;
  bool ok() const { return findings.empty(); }
};

inline constexpr double kQuaternionNormTolerance = 1e-6;

ValidationReport validate_episode(const Episode& ep);
nlohmann::json to_json(const ValidationReport& report);

// Reproducibility record written next to each episode as JSON.
struct EpisodeManifest {
  std::string task;
  std::int64_t episode_index = 0;
  std::vector<std::string> sources;
  std::string config_digest;  // hex SHA-256 of the pipeline configuration
  Representation representation = Representation::TcpAbsolute;
};

nlohmann::json to_json(const EpisodeManifest& m);
EpisodeManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const std::filesystem::path& path, const EpisodeManifest& m);
EpisodeManifest read_manifest(const std::filesystem::path& path);

// Hex SHA-256 of `bytes`.
std::string sha256_hex(std::string_view bytes);

// Lays out <root>/<task>_partNNN/episode_<idx>.hdf5 with at most
// kMaxEpisodesPerDirectory episodes per part directory; the manifest goes to
// episode_<idx>.json alongside.
class EpisodeBatchWriter {
 public:
  EpisodeBatchWriter(std::filesystem::path root, std::string task,
                     std::size_t per_directory = kMaxEpisodesPerDirectory);

  std::filesystem::path path_for(std::int64_t episode_index) const;
  std::filesystem::path write(const Episode& ep, EpisodeManifest manifest);

 private:
  std::filesystem::path root_;
  std::string task_;
  std::size_t per_directory_;
};

}  // namespace demotraj

#endif  // DEMOTRAJ_DATASET_HPP_
