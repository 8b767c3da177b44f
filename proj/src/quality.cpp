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

#include "demotraj/quality.hpp"

#include <cmath>
#include <sstream>

#include "demotraj/error.hpp"

namespace demotraj {

void QualityThresholds::validate() const {
  if (!(v_max > 0.0) || !(a_max > 0.0) || !(dtheta_max > 0.0)) {
    throw ConfigError("quality thresholds must be positive");
  }
  if (!(high_conf_fraction > 0.0 && high_conf_fraction <= 1.0)) {
    throw ConfigError("high_conf_fraction must lie in (0, 1]");
  }
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::Velocity:
      return "velocity";
    case ViolationKind::Acceleration:
      return "acceleration";
    case ViolationKind::Orientation:
      return "orientation";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) {
  return v == Verdict::Pass ? "pass" : "fail";
}

std::string_view to_string(DriftStatus s) {
  switch (s) {
    case DriftStatus::Aligned:
      return "aligned";
    case DriftStatus::LoopClosed:
      return "loop_closed";
    case DriftStatus::Reinitialize:
      return "reinitialize";
  }
  return "unknown";
}

QualityReport validate_environment(std::span<const PoseSample> poses,
                                   const QualityThresholds& thr) {
  if (poses.empty()) throw ValidationError("empty pose stream");
  QualityReport report;
  report.sample_count = poses.size();
  for (const PoseSample& s : poses) {
    if (s.confidence == ConfidenceLevel::High) ++report.high_count;
  }
  report.high_fraction = static_cast<double>(report.high_count) /
                         static_cast<double>(report.sample_count);
  update_verdict(report, thr);
  return report;
}

void update_verdict(QualityReport& report, const QualityThresholds& thr) {
  const bool confident = report.high_fraction >= thr.high_conf_fraction;
  const std::size_t allowed =
      thr.mode == QualityMode::Strict ? 0 : thr.max_violations;
  report.verdict = confident && report.violations.size() <= allowed
                       ? Verdict::Pass
                       : Verdict::Fail;
}

RepairResult repair_low_confidence(std::span<const PoseSample> poses) {
  RepairResult out;
  out.poses.assign(poses.begin(), poses.end());
  const std::size_t n = poses.size();
  if (n == 0) return out;

  auto is_anchor = [&](std::size_t i) {
    const ConfidenceLevel c = poses[i].confidence;
    if (c == ConfidenceLevel::High) return true;
    return (i == 0 || i == n - 1) && c == ConfidenceLevel::Medium;
  };

  if (!is_anchor(0)) {
    std::size_t end = 0;
    while (end + 1 < n && !is_anchor(end + 1)) ++end;
    throw UnrepairableError(0, end);
  }
  if (!is_anchor(n - 1)) {
    std::size_t begin = n - 1;
    while (begin > 0 && !is_anchor(begin - 1)) --begin;
    throw UnrepairableError(begin, n - 1);
  }

  std::size_t prev = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (!is_anchor(i)) continue;
    const PoseSample& a = poses[prev];
    const PoseSample& b = poses[i];
    for (std::size_t k = prev + 1; k < i; ++k) {
      const double s = (poses[k].t - a.t) / (b.t - a.t);
      PoseSample& r = out.poses[k];
      r.pose.position = a.pose.position + s * (b.pose.position - a.pose.position);
      r.pose.orientation = slerp(a.pose.orientation, b.pose.orientation, s);
      r.confidence = ConfidenceLevel::High;
      r.repaired = true;
      out.repaired_indices.push_back(k);
    }
    prev = i;
  }
  return out;
}

std::vector<Violation> smoothness_check(std::span<const double> times,
                                        std::span<const Pose> poses,
                                        const QualityThresholds& thr) {
  if (times.size() != poses.size()) {
    throw InputError("smoothness_check: times and poses differ in length");
  }
  const std::size_t n = poses.size();
  if (n < 3) throw InputError("smoothness_check needs at least 3 samples");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1])) {
      throw InputError("smoothness_check: timestamps not strictly increasing at index " +
                       std::to_string(i));
    }
  }

  std::vector<Vec3> vel(n, Vec3::Zero());
  for (std::size_t i = 1; i < n; ++i) {
    vel[i] = (poses[i].position - poses[i - 1].position) / (times[i] - times[i - 1]);
  }

  // Grouped by index, then kind.
  std::vector<Violation> out;
  for (std::size_t i = 1; i < n; ++i) {
    const double speed = vel[i].norm();
    if (speed > thr.v_max) {
      out.push_back({i, ViolationKind::Velocity, speed, thr.v_max});
    }
    if (i + 1 < n) {
      const double half_span = 0.5 * (times[i + 1] - times[i - 1]);
      const double acc = (vel[i + 1] - vel[i]).norm() / half_span;
      if (acc > thr.a_max) {
        out.push_back({i, ViolationKind::Acceleration, acc, thr.a_max});
      }
    }
    const double dtheta =
        angular_distance(poses[i - 1].orientation, poses[i].orientation);
    if (dtheta > thr.dtheta_max) {
      out.push_back({i, ViolationKind::Orientation, dtheta, thr.dtheta_max});
    }
  }
  return out;
}

std::vector<Violation> smoothness_check(std::span<const PoseSample> poses,
                                        const QualityThresholds& thr) {
  std::vector<double> times;
  std::vector<Pose> ps;
  times.reserve(poses.size());
  ps.reserve(poses.size());
  for (const PoseSample& s : poses) {
    times.push_back(s.t);
    ps.push_back(s.pose);
  }
  return smoothness_check(times, ps, thr);
}

DriftVerdict drift_check(std::span<const Pose> trajectory, const Pose& reference,
                         double align_tol_m, double closure_tol_m) {
  if (trajectory.empty()) throw InputError("drift_check: empty trajectory");
  auto dist = [&](const Pose& p) {
    return (p.position - reference.position).norm();
  };

  DriftVerdict v;
  v.endpoint_residual_m = dist(trajectory.back());
  if (v.endpoint_residual_m <= align_tol_m) {
    v.status = DriftStatus::Aligned;
    return v;
  }

  bool left = false;
  bool revisited = false;
  for (std::size_t i = 0; i + 1 < trajectory.size(); ++i) {
    const bool inside = dist(trajectory[i]) <= closure_tol_m;
    if (!inside) {
      left = true;
    } else if (left) {
      revisited = true;
      break;
    }
  }
  v.status = revisited && v.endpoint_residual_m <= closure_tol_m
                 ? DriftStatus::LoopClosed
                 : DriftStatus::Reinitialize;
  return v;
}

TranslationErrorStats translation_error(std::span<const Pose> estimate,
                                        std::span<const Pose> truth) {
  if (estimate.size() != truth.size()) {
    throw InputError("translation_error: estimate has " +
                     std::to_string(estimate.size()) + " poses, truth has " +
                     std::to_string(truth.size()));
  }
  TranslationErrorStats st;
  st.count = estimate.size();
  if (st.count == 0) return st;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < st.count; ++i) {
    const double e = 1000.0 * (estimate[i].position - truth[i].position).norm();
    sum += e;
    sum_sq += e * e;
    st.max_mm = std::max(st.max_mm, e);
  }
  const double n = static_cast<double>(st.count);
  st.mean_mm = sum / n;
  st.rmse_mm = std::sqrt(sum_sq / n);
  return st;
}

std::string to_text(const QualityReport& report) {
  std::ostringstream os;
  os.precision(6);
  os << "verdict: " << to_string(report.verdict) << '\n'
     << "samples: " << report.sample_count << '\n'
     << "high_samples: " << report.high_count << '\n'
     << "high_fraction: " << report.high_fraction << '\n'
     << "repaired: " << report.repaired_indices.size() << '\n'
     << "violations: " << report.violations.size() << '\n';
  for (const Violation& v : report.violations) {
    os << "violation: index=" << v.index << " kind=" << to_string(v.kind)
       << " value=" << v.value << " threshold=" << v.threshold << '\n';
  }
  if (report.drift) {
    os << "drift_status: " << to_string(report.drift->status) << '\n'
       << "drift_residual_m: " << report.drift->endpoint_residual_m << '\n';
  }
  return os.str();
}

nlohmann::json to_json(const QualityReport& report) {
  nlohmann::json j;
  j["verdict"] = to_string(report.verdict);
  j["sample_count"] = report.sample_count;
  j["high_count"] = report.high_count;
  j["high_fraction"] = report.high_fraction;
  j["repaired_indices"] = report.repaired_indices;
  auto& vs = j["violations"] = nlohmann::json::array();
  for (const Violation& v : report.violations) {
    vs.push_back({{"index", v.index},
                  {"kind", to_string(v.kind)},
                  {"value", v.value},
                  {"threshold", v.threshold}});
  }
  if (report.drift) {
    j["drift"] = {{"status", to_string(report.drift->status)},
                  {"endpoint_residual_m", report.drift->endpoint_residual_m}};
  }
  return j;
}

nlohmann::json to_json(const TranslationErrorStats& stats) {
  return {{"count", stats.count},
          {"mean_mm", stats.mean_mm},
          {"max_mm", stats.max_mm},
          {"rmse_mm", stats.rmse_mm}};
}

}  // namespace demotraj
