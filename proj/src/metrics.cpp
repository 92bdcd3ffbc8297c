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

#include "ipmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <sstream>

#include "ipmix/errors.hpp"

namespace ipmix {

void PredictionLog::validate() const {
  if (records.empty()) throw ParameterError("prediction log is empty");
  for (const auto& r : records) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw ParameterError("confidence outside [0,1] for sample " + r.sample_id);
    }
    if (r.severity && (*r.severity < 1 || *r.severity > 5)) {
      throw ParameterError("severity outside 1..5 for sample " + r.sample_id);
    }
  }
}

double clean_error(const PredictionLog& log) {
  log.validate();
  std::size_t wrong = 0;
  for (const auto& r : log.records) wrong += r.correct() ? 0 : 1;
  return static_cast<double>(wrong) / static_cast<double>(log.records.size());
}

MetricResult mce(const PredictionLog& log, const BaselineErrors& baseline) {
  log.validate();
  // corruption -> severity -> (wrong, total)
  std::map<std::string, std::map<int, std::pair<std::size_t, std::size_t>>> groups;
  for (const auto& r : log.records) {
    if (!r.corruption || !r.severity) {
      throw ParameterError("mce needs corruption and severity on every record");
    }
    auto& cell = groups[*r.corruption][*r.severity];
    cell.first += r.correct() ? 0 : 1;
    cell.second += 1;
  }
  MetricResult result{"mce", 0.0, {}};
  double total = 0.0;
  for (const auto& [corruption, severities] : groups) {
    double err_sum = 0.0;
    double base_sum = 0.0;
    for (const auto& [severity, counts] : severities) {
      const auto it = baseline.find({corruption, severity});
      if (it == baseline.end()) {
        throw ConfigError("missing baseline error for " + corruption + " severity " +
                          std::to_string(severity));
      }
      err_sum += static_cast<double>(counts.first) / static_cast<double>(counts.second);
      base_sum += it->second;
    }
    if (!(base_sum > 0.0)) throw ConfigError("baseline errors for " + corruption + " sum to zero");
    const double ce = 100.0 * err_sum / base_sum;
    result.groups[corruption] = ce;
    total += ce;
  }
  result.value = total / static_cast<double>(groups.size());
  return result;
}

double rms_calibration(const PredictionLog& log) {
  log.validate();
  const std::size_t n = log.records.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = log.records[a];
    const auto& rb = log.records[b];
    if (ra.confidence != rb.confidence) return ra.confidence < rb.confidence;
    return ra.correct() < rb.correct();
  });
  std::size_t bins = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (bins * bins < n) ++bins;
  while (bins > 1 && (bins - 1) * (bins - 1) >= n) --bins;

  double sum = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t lo = b * n / bins;
    const std::size_t hi = (b + 1) * n / bins;
    if (hi == lo) continue;
    double conf = 0.0;
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto& r = log.records[order[i]];
      conf += r.confidence;
      acc += r.correct() ? 1.0 : 0.0;
    }
    const double count = static_cast<double>(hi - lo);
    const double gap = acc / count - conf / count;
    sum += count / static_cast<double>(n) * gap * gap;
  }
  return std::sqrt(sum);
}

MetricResult mfr(const PredictionLog& log, const BaselineFlipRates& baseline) {
  log.validate();
  // perturbation -> sequence -> frame -> prediction
  std::map<std::string, std::map<std::string, std::map<long, const std::string*>>> groups;
  for (const auto& r : log.records) {
    if (!r.perturbation || !r.sequence || !r.frame) {
      throw ParameterError("mfr needs perturbation, sequence and frame on every record");
    }
    auto& frames = groups[*r.perturbation][*r.sequence];
    if (!frames.emplace(*r.frame, &r.pred).second) {
      throw ParameterError("duplicate frame " + std::to_string(*r.frame) + " in sequence " +
                           *r.sequence);
    }
  }
  MetricResult result{"mfr", 0.0, {}};
  double total = 0.0;
  for (const auto& [perturbation, sequences] : groups) {
    std::size_t flips = 0;
    std::size_t pairs = 0;
    for (const auto& [sequence, frames] : sequences) {
      if (frames.size() < 2) throw ParameterError("sequence " + sequence + " has fewer than 2 frames");
      if (frames.rbegin()->first - frames.begin()->first + 1 != static_cast<long>(frames.size())) {
        throw ParameterError("frames of sequence " + sequence + " are not contiguous");
      }
      const std::string* prev = nullptr;
      for (const auto& [frame, pred] : frames) {
        if (prev != nullptr) {
          flips += *prev != *pred ? 1 : 0;
          ++pairs;
        }
        prev = pred;
      }
    }
    const auto it = baseline.find(perturbation);
    if (it == baseline.end()) throw ConfigError("missing baseline flip rate for " + perturbation);
    if (!(it->second > 0.0)) throw ConfigError("baseline flip rate for " + perturbation + " is zero");
    const double rate = static_cast<double>(flips) / static_cast<double>(pairs);
    const double normalized = 100.0 * rate / it->second;
    result.groups[perturbation] = normalized;
    total += normalized;
  }
  result.value = total / static_cast<double>(groups.size());
  return result;
}

double aupr(std::span<const double> scores, std::span<const bool> is_anomaly) {
  if (scores.size() != is_anomaly.size()) throw ParameterError("aupr: length mismatch");
  const auto positives = static_cast<std::size_t>(std::count(is_anomaly.begin(), is_anomaly.end(), true));
  if (positives == 0 || positives == scores.size()) {
    throw ParameterError("aupr needs both anomalous and normal samples");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  double area = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      (is_anomaly[order[i]] ? tp : fp) += 1;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

double aupr(const PredictionLog& log) {
  log.validate();
  const std::size_t n = log.records.size();
  std::vector<double> scores(n);
  // std::vector<bool> is not contiguous, so it cannot back a span.
  auto flags = std::make_unique<bool[]>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& r = log.records[i];
    if (!r.anomaly) throw ParameterError("aupr needs an anomaly flag on every record");
    scores[i] = anomaly_score(r.confidence);
    flags[i] = *r.anomaly;
  }
  return aupr(scores, std::span<const bool>(flags.get(), n));
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

double parse_double(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
  }
}

long parse_long(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": not an integer: '" + s + "'");
  }
}

bool parse_flag(const std::string& s, std::size_t line_no) {
  if (s == "1" || s == "true") return true;
  if (s == "0" || s == "false") return false;
  throw ConfigError("line " + std::to_string(line_no) + ": not a 0/1 flag: '" + s + "'");
}

// Reads the header and returns column name -> index.
std::map<std::string, std::size_t> read_header(std::istream& in, std::size_t& line_no) {
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::map<std::string, std::size_t> columns;
    const auto names = split_csv(line);
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (!columns.emplace(names[i], i).second) throw ConfigError("duplicate column: " + names[i]);
    }
    return columns;
  }
  throw ConfigError("CSV has no header");
}

}  // namespace

PredictionLog parse_prediction_log(std::istream& in) {
  std::size_t line_no = 0;
  const auto columns = read_header(in, line_no);
  for (const char* required : {"sample_id", "pred", "true", "confidence"}) {
    if (!columns.contains(required)) throw ConfigError(std::string("missing column: ") + required);
  }
  auto col = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = columns.find(name);
    if (it == columns.end()) return std::nullopt;
    return it->second;
  };
  const auto c_corruption = col("corruption");
  const auto c_severity = col("severity");
  const auto c_perturbation = col("perturbation");
  const auto c_sequence = col("sequence");
  const auto c_frame = col("frame");
  const auto c_anomaly = col("anomaly");

  PredictionLog log;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto fields = split_csv(line);
    if (fields.size() != columns.size()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    PredictionRecord r;
    r.sample_id = fields[columns.at("sample_id")];
    r.pred = fields[columns.at("pred")];
    r.truth = fields[columns.at("true")];
    r.confidence = parse_double(fields[columns.at("confidence")], line_no);
    if (c_corruption) r.corruption = fields[*c_corruption];
    if (c_severity) r.severity = static_cast<int>(parse_long(fields[*c_severity], line_no));
    if (c_perturbation) r.perturbation = fields[*c_perturbation];
    if (c_sequence) r.sequence = fields[*c_sequence];
    if (c_frame) r.frame = parse_long(fields[*c_frame], line_no);
    if (c_anomaly) r.anomaly = parse_flag(fields[*c_anomaly], line_no);
    log.records.push_back(std::move(r));
  }
  return log;
}

PredictionLog read_prediction_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_prediction_log(in);
}

BaselineErrors parse_baseline_errors(std::istream& in) {
  std::size_t line_no = 0;
  const auto columns = read_header(in, line_no);
  for (const char* required : {"corruption", "severity", "error"}) {
    if (!columns.contains(required)) throw ConfigError(std::string("missing column: ") + required);
  }
  BaselineErrors out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto f = split_csv(line);
    if (f.size() != columns.size()) throw ConfigError("line " + std::to_string(line_no) + ": bad field count");
    const double err = parse_double(f[columns.at("error")], line_no);
    if (!(err > 0.0 && err <= 1.0)) {
      throw ConfigError("line " + std::to_string(line_no) + ": baseline error outside (0,1]");
    }
    out[{f[columns.at("corruption")], static_cast<int>(parse_long(f[columns.at("severity")], line_no))}] = err;
  }
  return out;
}

BaselineFlipRates parse_baseline_flip_rates(std::istream& in) {
  std::size_t line_no = 0;
  const auto columns = read_header(in, line_no);
  for (const char* required : {"perturbation", "flip_rate"}) {
    if (!columns.contains(required)) throw ConfigError(std::string("missing column: ") + required);
  }
  BaselineFlipRates out;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto f = split_csv(line);
    if (f.size() != columns.size()) throw ConfigError("line " + std::to_string(line_no) + ": bad field count");
    out[f[columns.at("perturbation")]] = parse_double(f[columns.at("flip_rate")], line_no);
  }
  return out;
}

}  // namespace ipmix
