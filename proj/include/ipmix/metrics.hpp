// Copyright 2026 The IPMix Authors. All Rights Reserved.
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

#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ipmix {

// One model prediction. Grouping keys are optional and only required by the
// calculators that use them.
struct PredictionRecord {
  std::string sample_id;
  std::string pred;
  std::string truth;
  double confidence = 0.0;
  std::optional<std::string> corruption;
  std::optional<int> severity;  // 1..5
  std::optional<std::string> perturbation;
  std::optional<std::string> sequence;
  std::optional<long> frame;
  std::optional<bool> anomaly;

  bool correct() const { return pred == truth; }
};

struct PredictionLog {
  std::vector<PredictionRecord> records;

  // Throws ParameterError when empty, a confidence leaves [0, 1] or a
  // severity leaves 1..5.
  void validate() const;
};

// (corruption, severity) -> baseline error rate in (0, 1].
using BaselineErrors = std::map<std::pair<std::string, int>, double>;
// perturbation -> baseline flip rate.
using BaselineFlipRates = std::map<std::string, double>;

struct MetricResult {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> groups;  // per corruption / perturbation
};

// Fraction of records with pred != truth.
double clean_error(const PredictionLog& log);

/**
 * Mean corruption error in percent: for each corruption c,
 *   CE_c = 100 * sum_s E(c, s) / sum_s E_base(c, s)
 * over the severities present in the log, then the mean over corruptions.
 * Throws ConfigError when a baseline entry is missing or a corruption's
 * baseline sum is zero.
 */
MetricResult mce(const PredictionLog& log, const BaselineErrors& baseline);

/**
 * RMS calibration error with ceil(sqrt(N)) equal-mass bins. Records are
 * ordered by (confidence, correct) so the result is independent of record
 * order; bin b holds ranks [floor(b N / B), floor((b + 1) N / B)).
 */
double rms_calibration(const PredictionLog& log);

/**
 * Mean flip rate in percent. Per perturbation, the flip rate is the number of
 * prediction changes between consecutive frames divided by the number of
 * consecutive-frame pairs, pooled over its sequences; it is normalized by
 * the baseline rate and averaged over perturbations. Frames of a sequence
 * must be contiguous integers and number at least two.
 */
MetricResult mfr(const PredictionLog& log, const BaselineFlipRates& baseline);

/**
 * Area under the precision-recall curve with anomalies as the positive
 * class. Thresholds step down through the distinct scores (ties form one
 * step) and the area is the sum of delta-recall times precision.
 */
double aupr(std::span<const double> scores, std::span<const bool> is_anomaly);

// Anomaly score from a maximum softmax probability.
inline double anomaly_score(double max_softmax) { return -max_softmax; }

// AUPR over records carrying an `anomaly` flag, scored by anomaly_score.
double aupr(const PredictionLog& log);

/**
 * CSV with a header naming its columns. Required: sample_id, pred, true,
 * confidence. Optional: corruption, severity, perturbation, sequence, frame,
 * anomaly. Values are comma-separated without quoting. Throws ConfigError on
 * malformed input.
 */
PredictionLog parse_prediction_log(std::istream& in);
PredictionLog read_prediction_log(const std::filesystem::path& path);

// `corruption,severity,error` rows.
BaselineErrors parse_baseline_errors(std::istream& in);
// `perturbation,flip_rate` rows.
BaselineFlipRates parse_baseline_flip_rates(std::istream& in);

}  // namespace ipmix
