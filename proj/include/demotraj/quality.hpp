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

// Recording quality gates: tracker confidence, repair of low-confidence
// samples, smoothness limits, drift classification and translation error.

#ifndef DEMOTRAJ_QUALITY_HPP_
#define DEMOTRAJ_QUALITY_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "demotraj/records.hpp"

namespace demotraj {

enum class QualityMode {
  Strict,   // any smoothness violation fails the recording
  Lenient,  // up to max_violations are tolerated
};

struct QualityThresholds {
  double v_max = 1.5;        // m/s
  double a_max = 20.0;       // m/s^2
  double dtheta_max = 0.3;   // rad per step
  double high_conf_fraction = 0.95;
  QualityMode mode = QualityMode::Strict;
  std::size_t max_violations = 0;  // lenient mode only

  // Throws ConfigError.
  void validate() const;
};

enum class ViolationKind { Velocity, Acceleration, Orientation };
std::string_view to_string(ViolationKind kind);

struct Violation {
  std::size_t index = 0;
  ViolationKind kind = ViolationKind::Velocity;
  double value = 0.0;
  double threshold = 0.0;
};

enum class Verdict { Pass, Fail };
std::string_view to_string(Verdict v);

enum class DriftStatus { Aligned, LoopClosed, Reinitialize };
std::string_view to_string(DriftStatus s);

struct DriftVerdict {
  double endpoint_residual_m = 0.0;
  DriftStatus status = DriftStatus::Aligned;
};

struct QualityReport {
  std::size_t sample_count = 0;
  std::size_t high_count = 0;
  double high_fraction = 0.0;
  std::vector<std::size_t> repaired_indices;
  std::vector<Violation> violations;
  std::optional<DriftVerdict> drift;  // advisory, never gates
  Verdict verdict = Verdict::Fail;
};

// Fraction of High samples against thr.high_conf_fraction. Throws
// ValidationError on an empty stream.
QualityReport validate_environment(std::span<const PoseSample> poses,
                                   const QualityThresholds& thr);

// Recomputes report.verdict from the fraction and the violation count.
void update_verdict(QualityReport& report, const QualityThresholds& thr);

struct RepairResult {
  std::vector<PoseSample> poses;
  std::vector<std::size_t> repaired_indices;
};

// Replaces every sample below High confidence by interpolation between the
// nearest anchor samples (linear position, slerp orientation, by time).
// Anchors are the High samples plus a first/last sample of Medium
// confidence, which is kept as is. Throws UnrepairableError if the stream
// starts or ends below Medium.
RepairResult repair_low_confidence(std::span<const PoseSample> poses);

// Finite-difference checks. Velocity at i uses samples (i-1, i); acceleration
// at i is the central second difference over (i-1, i, i+1); orientation at i
// is the geodesic angle between samples i-1 and i. Needs >= 3 samples with
// strictly increasing times, else InputError.
std::vector<Violation> smoothness_check(std::span<const double> times,
                                        std::span<const Pose> poses,
                                        const QualityThresholds& thr);
std::vector<Violation> smoothness_check(std::span<const PoseSample> poses,
                                        const QualityThresholds& thr);

// Classifies the end of a trajectory against a reference pose. Aligned when
// the endpoint residual is within align_tol. LoopClosed when it is within
// closure_tol and the trajectory re-entered the closure neighbourhood after
// leaving it. Reinitialize otherwise.
DriftVerdict drift_check(std::span<const Pose> trajectory, const Pose& reference,
                         double align_tol_m, double closure_tol_m);

struct TranslationErrorStats {
  std::size_t count = 0;
  double mean_mm = 0.0;
  double max_mm = 0.0;
  double rmse_mm = 0.0;
};

// Index-aligned position error, in millimetres. Throws InputError on a
// length mismatch.
TranslationErrorStats translation_error(std::span<const Pose> estimate,
                                        std::span<const Pose> truth);

// Human-readable block, one "key: value" per line.
std::string to_text(const QualityReport& report);
nlohmann::json to_json(const QualityReport& report);
nlohmann::json to_json(const TranslationErrorStats& stats);

}  // namespace demotraj

#endif  // DEMOTRAJ_QUALITY_HPP_
