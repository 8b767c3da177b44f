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

// demotraj: batch driver for the trajectory pipeline.
//
// Exit codes: 0 success, 1 validation or quality-gate failure, 2 usage or
// configuration error, 3 processing error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "demotraj/config.hpp"
#include "demotraj/dataset.hpp"
#include "demotraj/error.hpp"
#include "demotraj/kinematics.hpp"
#include "demotraj/logio.hpp"
#include "demotraj/pipeline.hpp"
#include "demotraj/quality.hpp"
#include "demotraj/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailure = 1;
constexpr int kUsageError = 2;
constexpr int kProcessingError = 3;

void Log(const std::string& msg) { std::cerr << "demotraj: " << msg << '\n'; }

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw demotraj::IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw demotraj::IoError("write to '" + path.string() + "' failed");
}

void WriteJson(const fs::path& path, const json& j) { WriteText(path, j.dump(2) + "\n"); }

// "dir/episode_3.hdf5" -> "dir/episode_3<suffix>"
fs::path Sidecar(const fs::path& path, const std::string& suffix) {
  fs::path out = path;
  out.replace_extension();
  out += suffix;
  return out;
}

// Runs `body`, mapping library errors onto exit codes.
int Guard(const std::function<int()>& body) {
  try {
    return body();
  } catch (const demotraj::ConfigError& e) {
    Log(std::string("configuration error: ") + e.what());
    return kUsageError;
  } catch (const demotraj::SchemaError& e) {
    Log(e.what());
    return kValidationFailure;
  } catch (const demotraj::Error& e) {
    Log(e.what());
    return kProcessingError;
  } catch (const std::exception& e) {
    Log(std::string("unexpected error: ") + e.what());
    return kProcessingError;
  }
}

struct GenerateArgs {
  std::string spec;
  std::string out_dir;
  std::uint64_t seed = 0;
};

int Generate(const GenerateArgs& a) {
  if (!fs::exists(a.spec)) {
    Log("generator spec not found: " + a.spec);
    return kUsageError;
  }
  const demotraj::GeneratorSpec spec = demotraj::load_generator_spec(a.spec);
  const demotraj::SimStreams streams = demotraj::generate(spec, a.seed);
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  demotraj::save_pose_log(dir / "poses.csv", streams.poses);
  demotraj::save_camera_log(dir / "camera.csv", streams.frames);
  demotraj::save_pose_log(dir / "truth.csv", streams.truth);
  Log("wrote " + std::to_string(streams.poses.size()) + " poses, " +
      std::to_string(streams.frames.size()) + " frames to " + dir.string());
  return kOk;
}

struct ProcessArgs {
  std::string config;
  std::string poses;
  std::string camera;
  std::string out;
};

int Process(const ProcessArgs& a) {
  const demotraj::PipelineConfig cfg = demotraj::load_pipeline_config(a.config);
  const auto poses = demotraj::read_pose_log(a.poses);
  const auto frames = demotraj::read_camera_log(a.camera);

  const fs::path out = a.out.empty() ? cfg.output_dir / ("episode_" +
                                                         std::to_string(cfg.episode_index) +
                                                         ".hdf5")
                                     : fs::path(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());

  const demotraj::PipelineResult r = demotraj::run_pipeline(cfg, poses, frames);

  WriteText(Sidecar(out, ".quality.txt"), demotraj::to_text(r.quality));
  json quality = demotraj::to_json(r.quality);
  if (!r.ok()) quality["failed_stage"] = r.failed_stage;
  WriteJson(Sidecar(out, ".quality.json"), quality);
  if (r.sync) {
    json sync = {{"target_rate_hz", r.sync->target_rate_hz},
                 {"decimation_factor", r.sync->decimation_factor},
                 {"camera_frames", r.sync->camera_frames},
                 {"retained_frames", r.sync->retained_frames},
                 {"emitted_frames", r.sync->emitted_frames},
                 {"dropped_frames", r.sync->dropped_frames},
                 {"max_abs_offset_s", r.sync->max_abs_offset_s},
                 {"mean_abs_offset_s", r.sync->mean_abs_offset_s},
                 {"empty_overlap", r.sync->empty_overlap}};
    WriteJson(Sidecar(out, ".sync.json"), sync);
  }

  if (!r.ok()) {
    Log("stage '" + r.failed_stage + "' failed: " + r.failure);
    return r.gate_failure ? kValidationFailure : kProcessingError;
  }

  demotraj::write_episode(out, *r.episode);
  demotraj::EpisodeManifest manifest;
  manifest.task = cfg.task;
  manifest.episode_index = cfg.episode_index;
  manifest.sources = {fs::absolute(a.poses).lexically_normal().string(),
                      fs::absolute(a.camera).lexically_normal().string()};
  manifest.config_digest = cfg.digest();
  manifest.representation = cfg.output_mode;
  demotraj::write_manifest(Sidecar(out, ".manifest.json"), manifest);
  Log("wrote " + out.string() + " (" + std::to_string(r.episode->length()) + " frames)");
  return kOk;
}

struct CompensateArgs {
  std::string config;
  std::string episode;
  std::string out;
  bool strict_width = false;
  std::size_t sweep = 0;
};

int Compensate(const CompensateArgs& a) {
  const demotraj::PipelineConfig cfg = demotraj::load_pipeline_config(a.config);
  if (!cfg.compensation) throw demotraj::ConfigError("config has no 'compensation' section");
  if (cfg.chain_path.empty()) throw demotraj::ConfigError("config has no 'chain'");
  demotraj::ParsedChain parsed;
  try {
    parsed = demotraj::load_chain(cfg.chain_path);
  } catch (const demotraj::Error& e) {
    throw demotraj::ConfigError("chain '" + cfg.chain_path.string() + "': " + e.what());
  }
  const demotraj::Episode ep = demotraj::read_episode(a.episode);
  const demotraj::JointVector seed = cfg.home_posture.value_or(
      demotraj::JointVector::Zero(static_cast<Eigen::Index>(parsed.chain.dof())));
  const auto summary = demotraj::compensate_episode(
      ep, parsed.chain, *cfg.compensation, seed, cfg.ik,
      a.strict_width ? demotraj::WidthRangePolicy::Strict : demotraj::WidthRangePolicy::Clamp);

  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream csv(out);
  if (!csv) throw demotraj::IoError("cannot write '" + out.string() + "'");
  csv << "frame,width_m,distance_m,dx_m,dy_m,dz_m,position_residual_m,rotation_residual_rad,"
         "ok";
  for (std::size_t j = 0; j < parsed.chain.dof(); ++j) csv << ",theta_" << j;
  csv << '\n';
  using demotraj::format_double;
  for (const auto& f : summary.frames) {
    csv << f.index << ',' << format_double(f.width_m) << ',' << format_double(f.distance_m)
        << ',' << format_double(f.displacement.x()) << ','
        << format_double(f.displacement.y()) << ',' << format_double(f.displacement.z())
        << ',' << format_double(f.position_residual) << ','
        << format_double(f.rotation_residual) << ',' << (f.theta ? 1 : 0);
    for (std::size_t j = 0; j < parsed.chain.dof(); ++j) {
      csv << ','
          << (f.theta ? format_double((*f.theta)[static_cast<Eigen::Index>(j)]) : "nan");
    }
    csv << '\n';
  }
  csv.close();
  WriteJson(Sidecar(out, ".summary.json"), demotraj::to_json(summary));
  if (a.sweep > 0) {
    const auto tcp = demotraj::episode_tcp(ep);
    std::ofstream sweep(Sidecar(out, ".sweep.csv"));
    if (!sweep) throw demotraj::IoError("cannot write the sweep report");
    sweep << "width_m,distance_m,x,y,z\n";
    for (const auto& row : demotraj::compensation_sweep(tcp.front(), *cfg.compensation,
                                                        a.sweep)) {
      sweep << format_double(row.width_m) << ',' << format_double(row.distance_m) << ','
            << format_double(row.corrected.position.x()) << ','
            << format_double(row.corrected.position.y()) << ','
            << format_double(row.corrected.position.z()) << '\n';
    }
  }
  if (!summary.clamped_frames.empty()) {
    Log(std::to_string(summary.clamped_frames.size()) +
        " frame(s) had widths outside [0, w_max] and were clamped");
  }
  for (std::size_t i : summary.failed_frames) {
    const auto& f = summary.frames[i];
    Log("frame " + std::to_string(i) + ": IK did not converge (residual " +
        format_double(f.position_residual) + " m, " + format_double(f.rotation_residual) +
        " rad)");
  }
  return summary.failed_frames.empty() ? kOk : kProcessingError;
}

struct ValidateArgs {
  std::string path;
  std::string json_out;
};

json ValidateFile(const fs::path& path) {
  json j = {{"path", path.string()}};
  try {
    const demotraj::Episode ep = demotraj::read_episode(path);
    const auto report = demotraj::validate_episode(ep);
    j.update(demotraj::to_json(report));
    j["frames"] = ep.length();
  } catch (const demotraj::SchemaError& e) {
    j["ok"] = false;
    j["findings"] = json::array({{{"check", "schema"}, {"message", e.what()}}});
  } catch (const demotraj::IoError& e) {
    j["ok"] = false;
    j["findings"] = json::array({{{"check", "file"}, {"message", e.what()}}});
  }
  return j;
}

int Validate(const ValidateArgs& a) {
  const fs::path path(a.path);
  if (!fs::exists(path)) {
    Log("no such file or directory: " + a.path);
    return kUsageError;
  }
  json result;
  bool ok = true;
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".hdf5") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    std::map<std::string, std::size_t> per_dir;
    json episodes = json::array();
    std::size_t passed = 0;
    for (const auto& f : files) {
      json r = ValidateFile(f);
      if (r["ok"].get<bool>()) ++passed;
      ++per_dir[f.parent_path().string()];
      episodes.push_back(std::move(r));
    }
    json dir_findings = json::array();
    for (const auto& [dir, count] : per_dir) {
      if (count > demotraj::kMaxEpisodesPerDirectory) {
        dir_findings.push_back(
            {{"check", "directory_size"},
             {"message", dir + " holds " + std::to_string(count) + " episodes, more than " +
                             std::to_string(demotraj::kMaxEpisodesPerDirectory)}});
      }
    }
    ok = passed == files.size() && dir_findings.empty() && !files.empty();
    result = {{"ok", ok},
              {"episodes", files.size()},
              {"passed", passed},
              {"failed", files.size() - passed},
              {"directory_findings", dir_findings},
              {"reports", episodes}};
    std::cout << "episodes: " << files.size() << "\npassed: " << passed
              << "\nfailed: " << files.size() - passed << '\n';
    for (const auto& r : episodes) {
      if (!r["ok"].get<bool>()) std::cout << "FAIL " << r["path"].get<std::string>() << '\n';
    }
    for (const auto& f : dir_findings) std::cout << f["message"].get<std::string>() << '\n';
    if (files.empty()) std::cout << "no episode files found\n";
  } else {
    result = ValidateFile(path);
    ok = result["ok"].get<bool>();
    std::cout << (ok ? "OK " : "FAIL ") << path.string() << '\n';
    for (const auto& f : result["findings"]) {
      std::cout << "  " << f["check"].get<std::string>();
      if (f.contains("row")) std::cout << " (row " << f["row"].get<std::size_t>() << ")";
      std::cout << ": " << f["message"].get<std::string>() << '\n';
    }
  }
  if (!a.json_out.empty()) WriteJson(a.json_out, result);
  return ok ? kOk : kValidationFailure;
}

struct EvalArgs {
  std::string estimate;
  std::string truth;
  std::string config;
  std::string json_out;
  double max_offset_s = 2.5e-3;
};

int Eval(const EvalArgs& a) {
  const demotraj::Episode est = demotraj::read_episode(a.estimate);
  const std::vector<demotraj::Pose> est_tcp = demotraj::episode_tcp(est);
  std::vector<demotraj::Pose> truth_tcp;
  if (fs::path(a.truth).extension() == ".hdf5") {
    truth_tcp = demotraj::episode_tcp(demotraj::read_episode(a.truth));
  } else {
    if (!est.timestamps) {
      throw demotraj::SchemaError("/observations/timestamps",
                                  "required to match a truth pose log");
    }
    const auto truth = demotraj::read_pose_log(a.truth);
    const auto matched = demotraj::match_by_time(*est.timestamps, truth, a.max_offset_s);
    if (a.config.empty()) {
      truth_tcp = matched;
    } else {
      truth_tcp = demotraj::tracker_to_tcp(demotraj::load_pipeline_config(a.config), matched);
    }
  }
  const auto stats = demotraj::translation_error(est_tcp, truth_tcp);
  std::cout << "frames: " << stats.count << "\nmean_mm: " << stats.mean_mm
            << "\nmax_mm: " << stats.max_mm << "\nrmse_mm: " << stats.rmse_mm << '\n';
  if (!a.json_out.empty()) WriteJson(a.json_out, demotraj::to_json(stats));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory toolkit: sensor logs in, demonstration episodes out."};
  app.require_subcommand(1);
  int code = kOk;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write synthetic pose, camera and truth logs");
  g->add_option("--spec", gen.spec, "Generator spec (JSON)")->required();
  g->add_option("--out", gen.out_dir, "Output directory")->required();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->callback([&] { code = Guard([&] { return Generate(gen); }); });

  ProcessArgs proc;
  auto* p = app.add_subcommand("process", "Turn pose and camera logs into an episode");
  p->add_option("--config", proc.config, "Pipeline config (JSON)")->required();
  p->add_option("--poses", proc.poses, "Pose log")->required();
  p->add_option("--camera", proc.camera, "Camera log")->required();
  p->add_option("--out", proc.out,
                "Episode file [<output_dir>/episode_<episode_index>.hdf5]");
  p->callback([&] { code = Guard([&] { return Process(proc); }); });

  CompensateArgs comp;
  auto* c = app.add_subcommand("compensate", "Compensated joint commands for an episode");
  c->add_option("--config", comp.config, "Pipeline config with chain and compensation")
      ->required();
  c->add_option("--episode", comp.episode, "TCP episode with gripper widths")->required();
  c->add_option("--out", comp.out, "Output CSV; a .summary.json is written next to it")
      ->required();
  c->add_flag("--strict-width", comp.strict_width,
              "Fail on widths outside [0, w_max] instead of clamping");
  c->add_option("--sweep", comp.sweep,
                 "Also write <out>.sweep.csv: N+1 widths over [0, w_max] applied to frame 0")
      ->capture_default_str();
  c->callback([&] { code = Guard([&] { return Compensate(comp); }); });

  ValidateArgs val;
  auto* v = app.add_subcommand("validate", "Check an episode file or a directory of them");
  v->add_option("path", val.path, "Episode file or directory")->required();
  v->add_option("--json", val.json_out, "Write the report as JSON");
  v->callback([&] { code = Guard([&] { return Validate(val); }); });

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Translation error of an episode against truth, in mm");
  e->add_option("--estimate", ev.estimate, "Estimated episode")->required();
  e->add_option("--truth", ev.truth, "Truth episode (.hdf5) or truth pose log")->required();
  e->add_option("--config", ev.config, "Maps a truth pose log to TCP poses");
  e->add_option("--max-offset", ev.max_offset_s, "Timestamp matching tolerance, seconds")
      ->capture_default_str();
  e->add_option("--json", ev.json_out, "Write the statistics as JSON");
  e->callback([&] { code = Guard([&] { return Eval(ev); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kUsageError;
  }
  return code;
}
