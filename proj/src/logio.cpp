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

#include "demotraj/logio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>

#include "demotraj/error.hpp"

namespace demotraj {
namespace {

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

class LineParser {
 public:
  LineParser(const std::string& source, std::size_t line)
      : source_(source), line_(line) {}

  double Real(std::string_view field, const char* name) const {
    double v = 0.0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() ||
        !std::isfinite(v)) {
      Fail(std::string("bad ") + name + " '" + std::string(field) + "'");
    }
    return v;
  }

  long long Integer(std::string_view field, const char* name) const {
    long long v = 0;
    const auto [ptr, ec] =
        std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      Fail(std::string("bad ") + name + " '" + std::string(field) + "'");
    }
    return v;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ParseError(source_, line_, what);
  }

 private:
  const std::string& source_;
  std::size_t line_;
};

bool SkipLine(std::string_view line) {
  return line.empty() || line.front() == '#';
}

std::string_view StripCr(const std::string& line) {
  std::string_view v(line);
  if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
  return v;
}

template <typename Fn>
void ForEachLine(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view v = StripCr(line);
    if (SkipLine(v)) continue;
    fn(v, number);
  }
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

template <typename Fn>
void SaveText(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  fn(out);
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<PoseSample> parse_pose_log(std::istream& in,
                                       const std::string& source) {
  std::vector<PoseSample> out;
  ForEachLine(in, [&](std::string_view line, std::size_t number) {
    const LineParser p(source, number);
    const auto f = SplitFields(line);
    if (f.size() != 9) {
      p.Fail("expected 9 fields, found " + std::to_string(f.size()));
    }
    PoseSample s;
    s.t = p.Real(f[0], "timestamp");
    const double row[7] = {p.Real(f[1], "x"),  p.Real(f[2], "y"),
                           p.Real(f[3], "z"),  p.Real(f[4], "qx"),
                           p.Real(f[5], "qy"), p.Real(f[6], "qz"),
                           p.Real(f[7], "qw")};
    try {
      s.pose = Pose::from_row(std::span<const double, 7>(row, 7));
    } catch (const InputError& e) {
      p.Fail(e.what());
    }
    const auto level = confidence_from_int(
        static_cast<int>(p.Integer(f[8], "confidence")));
    if (!level) p.Fail("confidence must be 0..3");
    s.confidence = *level;
    out.push_back(s);
  });
  return out;
}

std::vector<CameraSample> parse_camera_log(std::istream& in,
                                           const std::string& source) {
  std::vector<CameraSample> out;
  ForEachLine(in, [&](std::string_view line, std::size_t number) {
    const LineParser p(source, number);
    const auto f = SplitFields(line);
    if (f.size() < 3 || (f.size() - 3) % 3 != 0) {
      p.Fail("expected t,frame_index,image_ref followed by marker triples");
    }
    CameraSample s;
    s.t = p.Real(f[0], "timestamp");
    s.frame_index = p.Integer(f[1], "frame_index");
    if (s.frame_index < 0) p.Fail("frame_index must be >= 0");
    s.image_ref = std::string(f[2]);
    for (std::size_t i = 3; i < f.size(); i += 3) {
      MarkerDetection d;
      d.marker_id = static_cast<int>(p.Integer(f[i], "marker_id"));
      d.u = p.Real(f[i + 1], "u_px");
      d.v = p.Real(f[i + 2], "v_px");
      if (d.u < 0.0 || d.v < 0.0) p.Fail("marker center must be >= 0");
      s.detections.push_back(d);
    }
    out.push_back(std::move(s));
  });
  return out;
}

std::vector<PoseSample> read_pose_log(const std::filesystem::path& path) {
  auto in = OpenForRead(path);
  return parse_pose_log(in, path.string());
}

std::vector<CameraSample> read_camera_log(const std::filesystem::path& path) {
  auto in = OpenForRead(path);
  return parse_camera_log(in, path.string());
}

void write_pose_log(std::ostream& out, std::span<const PoseSample> poses) {
  out << kPoseLogHeader << '\n';
  for (const PoseSample& s : poses) {
    out << format_double(s.t);
    for (double v : s.pose.to_row()) out << ',' << format_double(v);
    out << ',' << static_cast<int>(s.confidence) << '\n';
  }
}

void write_camera_log(std::ostream& out, std::span<const CameraSample> frames) {
  out << kCameraLogHeader << '\n';
  for (const CameraSample& s : frames) {
    if (s.image_ref.find(',') != std::string::npos) {
      throw InputError("image_ref '" + s.image_ref + "' contains a comma");
    }
    out << format_double(s.t) << ',' << s.frame_index << ',' << s.image_ref;
    for (const MarkerDetection& d : s.detections) {
      out << ',' << d.marker_id << ',' << format_double(d.u) << ','
          << format_double(d.v);
    }
    out << '\n';
  }
}

void save_pose_log(const std::filesystem::path& path,
                   std::span<const PoseSample> poses) {
  SaveText(path, [&](std::ostream& out) { write_pose_log(out, poses); });
}

void save_camera_log(const std::filesystem::path& path,
                     std::span<const CameraSample> frames) {
  SaveText(path, [&](std::ostream& out) { write_camera_log(out, frames); });
}

}  // namespace demotraj
