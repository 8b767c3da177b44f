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

// Python bindings. Poses cross the boundary as float64 rows
// [x, y, z, qx, qy, qz, qw], singly as shape (7,) and in bulk as (N, 7).

#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <filesystem>
#include <string>
#include <vector>

#include "demotraj/compensation.hpp"
#include "demotraj/config.hpp"
#include "demotraj/dataset.hpp"
#include "demotraj/error.hpp"
#include "demotraj/geometry.hpp"
#include "demotraj/gripper.hpp"
#include "demotraj/kinematics.hpp"
#include "demotraj/logio.hpp"
#include "demotraj/pipeline.hpp"
#include "demotraj/quality.hpp"
#include "demotraj/simgen.hpp"
#include "demotraj/sync.hpp"

namespace py = pybind11;
namespace dt = demotraj;

namespace {

using Rows = py::array_t<double, py::array::c_style | py::array::forcecast>;

dt::Pose PoseFromRow(const Rows& row) {
  if (row.ndim() != 1 || row.shape(0) != 7) throw py::value_error("pose must have shape (7,)");
  return dt::Pose::from_row(std::span<const double, 7>(row.data(), 7));
}

std::vector<dt::Pose> PosesFromRows(const Rows& rows) {
  if (rows.ndim() != 2 || rows.shape(1) != 7) {
    throw py::value_error("poses must have shape (N, 7)");
  }
  std::vector<dt::Pose> out;
  out.reserve(static_cast<std::size_t>(rows.shape(0)));
  for (py::ssize_t i = 0; i < rows.shape(0); ++i) {
    out.push_back(dt::Pose::from_row(std::span<const double, 7>(rows.data(i, 0), 7)));
  }
  return out;
}

py::array_t<double> ToRow(const dt::Pose& p) {
  py::array_t<double> out(7);
  const auto row = p.to_row();
  std::copy(row.begin(), row.end(), out.mutable_data());
  return out;
}

template <typename It, typename Get>
py::array_t<double> ToRows(It begin, It end, Get get) {
  const auto n = static_cast<py::ssize_t>(std::distance(begin, end));
  py::array_t<double> out({n, py::ssize_t{7}});
  double* dst = out.mutable_data();
  for (It it = begin; it != end; ++it, dst += 7) {
    const auto row = get(*it).to_row();
    std::copy(row.begin(), row.end(), dst);
  }
  return out;
}

py::array_t<double> ToRows(const std::vector<dt::Pose>& poses) {
  return ToRows(poses.begin(), poses.end(), [](const dt::Pose& p) -> const dt::Pose& { return p; });
}

py::array_t<double> ToArray(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

dt::TranslationFrame FrameFromString(const std::string& name) {
  if (name == "base") return dt::TranslationFrame::Base;
  if (name == "local") return dt::TranslationFrame::Local;
  throw py::value_error("frame must be 'base' or 'local'");
}

py::dict PoseLogDict(const std::vector<dt::PoseSample>& samples) {
  std::vector<double> t;
  std::vector<int> conf;
  for (const auto& s : samples) {
    t.push_back(s.t);
    conf.push_back(static_cast<int>(s.confidence));
  }
  py::dict d;
  d["t"] = ToArray(t);
  d["pose"] = ToRows(samples.begin(), samples.end(),
                     [](const dt::PoseSample& s) -> const dt::Pose& { return s.pose; });
  d["confidence"] = py::array_t<int>(static_cast<py::ssize_t>(conf.size()), conf.data());
  return d;
}

py::array_t<double> MatrixArray(const dt::RowMatrix& m) {
  py::array_t<double> out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
  std::copy(m.data(), m.data() + m.size(), out.mutable_data());
  return out;
}

py::dict EpisodeDict(const dt::Episode& ep) {
  py::dict d;
  d["qpos"] = MatrixArray(ep.qpos);
  d["action"] = MatrixArray(ep.action);
  d["representation"] = std::string(dt::to_string(ep.representation));
  d["sim"] = ep.sim ? py::object(py::bool_(*ep.sim)) : py::object(py::none());
  d["gripper_width"] = ep.gripper_width ? py::object(ToArray(*ep.gripper_width)) : py::none();
  d["timestamps"] = ep.timestamps ? py::object(ToArray(*ep.timestamps)) : py::none();
  d["initial_pose"] = ep.initial_pose ? py::object(ToRow(*ep.initial_pose)) : py::none();
  py::dict cams;
  for (const auto& cam : ep.cameras) {
    if (const auto* refs = std::get_if<std::vector<std::string>>(&cam.data)) {
      cams[py::str(cam.name)] = *refs;
    } else {
      const auto& s = std::get<dt::ImageStack>(cam.data);
      py::array_t<std::uint8_t> px({static_cast<py::ssize_t>(s.frames),
                                    static_cast<py::ssize_t>(s.height),
                                    static_cast<py::ssize_t>(s.width), py::ssize_t{3}});
      std::copy(s.pixels.begin(), s.pixels.end(), px.mutable_data());
      cams[py::str(cam.name)] = px;
    }
  }
  d["images"] = cams;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "demotraj core bindings";

  auto error = py::register_exception<dt::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<dt::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<dt::InputError>(m, "InputError", error.ptr());
  py::register_exception<dt::ParseError>(m, "ParseError", error.ptr());
  py::register_exception<dt::SchemaError>(m, "SchemaError", error.ptr());
  py::register_exception<dt::IoError>(m, "IoError", error.ptr());
  py::register_exception<dt::UnreachableTargetError>(m, "UnreachableTargetError", error.ptr());

  // Geometry.
  m.def("compose", [](const Rows& a, const Rows& b) {
    return ToRow(dt::compose(PoseFromRow(a), PoseFromRow(b)));
  });
  m.def("inverse", [](const Rows& p) { return ToRow(dt::inverse(PoseFromRow(p))); });
  m.def(
      "relative_steps",
      [](const Rows& poses, const std::string& frame) {
        const auto abs = PosesFromRows(poses);
        std::vector<dt::Pose> steps;
        for (std::size_t i = 0; i + 1 < abs.size(); ++i) {
          const dt::RelativePose r = dt::relative_step(abs[i], abs[i + 1], FrameFromString(frame));
          dt::Pose p;
          p.position = r.translation;
          p.orientation = r.rotation;
          steps.push_back(p);
        }
        return ToRows(steps);
      },
      py::arg("poses"), py::arg("frame") = "base");
  m.def(
      "integrate_relative",
      [](const Rows& initial, const Rows& steps, const std::string& frame) {
        std::vector<dt::RelativePose> rel;
        for (const auto& p : PosesFromRows(steps)) rel.push_back({p.position, p.orientation});
        return ToRows(dt::integrate_relative(PoseFromRow(initial), rel, FrameFromString(frame)));
      },
      py::arg("initial"), py::arg("steps"), py::arg("frame") = "base");
  m.def("camera_pose_in_base",
        [](const Rows& base_gripper, const dt::Vec3& delta_c2g, const Rows& tracker) {
          return ToRow(
              dt::camera_pose_in_base(PoseFromRow(base_gripper), delta_c2g, PoseFromRow(tracker)));
        });
  m.def("tcp_from_camera", [](const Rows& camera, const dt::Vec3& delta_c2g) {
    return ToRow(dt::tcp_from_camera(PoseFromRow(camera), delta_c2g));
  });

  // Synchronization.
  m.def("greatest_common_frequency",
        [](const std::vector<int>& rates) { return dt::greatest_common_frequency(rates); });

  // Gripper width.
  py::class_<dt::GripperCalib>(m, "GripperCalib")
      .def(py::init([](double d_max_px, double d_min_px, double g_max_mm, double axis_u_px) {
             dt::GripperCalib c;
             c.d_max_px = d_max_px;
             c.d_min_px = d_min_px;
             c.g_max_mm = g_max_mm;
             c.axis_u_px = axis_u_px;
             c.validate();
             return c;
           }),
           py::arg("d_max_px"), py::arg("d_min_px"), py::arg("g_max_mm"),
           py::arg("axis_u_px") = 0.0)
      .def_readonly("d_max_px", &dt::GripperCalib::d_max_px)
      .def_readonly("d_min_px", &dt::GripperCalib::d_min_px)
      .def_readonly("g_max_mm", &dt::GripperCalib::g_max_mm)
      .def_readonly("axis_u_px", &dt::GripperCalib::axis_u_px);
  m.def("width_from_distance", &dt::width_from_distance, py::arg("d_px"), py::arg("calib"));
  m.def("distance_from_width", &dt::distance_from_width, py::arg("width_mm"), py::arg("calib"));

  // Compensation.
  py::class_<dt::CompensationParams>(m, "CompensationParams")
      .def(py::init([](double d_close, double d_open, double w_max) {
             dt::CompensationParams p{d_close, d_open, w_max};
             p.validate();
             return p;
           }),
           py::arg("d_close"), py::arg("d_open"), py::arg("w_max"))
      .def_readonly("d_close", &dt::CompensationParams::d_close)
      .def_readonly("d_open", &dt::CompensationParams::d_open)
      .def_readonly("w_max", &dt::CompensationParams::w_max);
  m.def(
      "compensation_distance",
      [](double w, const dt::CompensationParams& p) { return dt::compensation_distance(w, p); },
      py::arg("w"), py::arg("params"));
  m.def("corrected_tcp", [](const Rows& pose, double d) {
    return ToRow(dt::corrected_tcp(PoseFromRow(pose), d));
  });

  // Kinematics.
  py::class_<dt::KinematicChain>(m, "KinematicChain")
      .def_property_readonly("dof", &dt::KinematicChain::dof)
      .def("forward",
           [](const dt::KinematicChain& c, const dt::JointVector& q) {
             return ToRow(dt::forward_kinematics(c, q));
           })
      .def("jacobian",
           [](const dt::KinematicChain& c, const dt::JointVector& q) {
             return Eigen::MatrixXd(dt::jacobian(c, q));
           })
      .def(
          "solve_ik",
          [](const dt::KinematicChain& c, const Rows& target, const dt::JointVector& seed,
             double orientation_weight) {
            dt::IkConfig cfg;
            cfg.orientation_weight = orientation_weight;
            const dt::IkResult r = dt::solve_ik(c, PoseFromRow(target), seed, cfg);
            py::dict d;
            d["theta"] = r.theta;
            d["iterations"] = r.iterations;
            d["position_residual"] = r.position_residual;
            d["rotation_residual"] = r.rotation_residual;
            return d;
          },
          py::arg("target"), py::arg("seed"), py::arg("orientation_weight") = 1.0);
  m.def("load_chain", [](const std::filesystem::path& path) { return dt::load_chain(path).chain; });

  // Logs and simulation.
  m.def("read_pose_log", [](const std::filesystem::path& p) {
    return PoseLogDict(dt::read_pose_log(p));
  });
  m.def(
      "generate",
      [](const std::filesystem::path& spec, std::uint64_t seed) {
        const dt::SimStreams s = dt::generate(dt::load_generator_spec(spec), seed);
        py::dict d;
        d["poses"] = PoseLogDict(s.poses);
        d["truth"] = PoseLogDict(s.truth);
        std::vector<double> ft;
        for (const auto& f : s.frames) ft.push_back(f.t);
        d["frame_t"] = ToArray(ft);
        d["frame_width_mm"] = ToArray(s.frame_width_mm);
        return d;
      },
      py::arg("spec"), py::arg("seed") = 0);

  // Processing and episodes.
  m.def(
      "process",
      [](const std::filesystem::path& config, const std::filesystem::path& poses,
         const std::filesystem::path& camera, const std::filesystem::path& out) {
        const dt::PipelineConfig cfg = dt::load_pipeline_config(config);
        const auto pose_log = dt::read_pose_log(poses);
        const auto camera_log = dt::read_camera_log(camera);
        const dt::PipelineResult r = dt::run_pipeline(cfg, pose_log, camera_log);
        py::dict d;
        d["ok"] = r.ok();
        d["failed_stage"] = r.failed_stage;
        d["failure"] = r.failure;
        d["frames"] = r.synced.size();
        if (r.ok()) dt::write_episode(out, *r.episode);
        return d;
      },
      py::arg("config"), py::arg("poses"), py::arg("camera"), py::arg("out"));
  m.def("read_episode", [](const std::filesystem::path& p) {
    return EpisodeDict(dt::read_episode(p));
  });
  m.def("list_hierarchy", &dt::list_hierarchy);
  m.def("validate_episode", [](const std::filesystem::path& p) {
    py::list out;
    for (const auto& f : dt::validate_episode(dt::read_episode(p)).findings) {
      py::dict d;
      d["check"] = f.check;
      d["message"] = f.message;
      d["row"] = f.row ? py::object(py::int_(*f.row)) : py::none();
      out.append(d);
    }
    return out;
  });
  m.def("translation_error", [](const Rows& estimate, const Rows& reference) {
    const auto s = dt::translation_error(PosesFromRows(estimate), PosesFromRows(reference));
    py::dict d;
    d["count"] = s.count;
    d["mean_mm"] = s.mean_mm;
    d["max_mm"] = s.max_mm;
    d["rmse_mm"] = s.rmse_mm;
    return d;
  });
}
