// include/echopad/metrics.hpp

// Copyright 2026  echopad authors

// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace echopad::metrics {

// Higher score = more bona fide. A presentation is accepted as bona fide iff
// score >= threshold, the same rule ensemble::decide uses.
struct ScoreSet {
  std::vector<double> bona;
  std::map<std::string, std::vector<double>> attacks;  // pai_type -> scores

  void validate() const;
};

double apcer(std::span<const double> attack_scores, double threshold);
double bpcer(std::span<const double> bona_scores, double threshold);

// Worst attack type, plus the per-type values.
struct MultiApcer {
  double max_pct = 0.0;
  std::map<std::string, double> per_type;
};
MultiApcer apcer(const ScoreSet& set, double threshold);

// Sorted unique pooled scores, the midpoints between neighbours and one
// sentinel above the largest score (where nothing is accepted).
std::vector<double> candidate_thresholds(const ScoreSet& set);

struct EerResult {
  double pct = 0.0;
  double threshold = 0.0;
};

// Sweeps candidate thresholds upward and stops at the first one where
// APCER - BPCER <= 0; linear interpolation against the previous candidate
// locates the crossing and (APCER + BPCER) / 2 there is reported.
EerResult d_eer(const ScoreSet& set);

// Lowest BPCER over candidate thresholds whose APCER <= target_pct.
double bpcer_at_apcer(const ScoreSet& set, double target_pct);

struct DetPoint {
  double apcer_pct = 0.0;
  double bpcer_pct = 0.0;
  double threshold = 0.0;
};
std::vector<DetPoint> det_curve(const ScoreSet& set);

struct EvalReport {
  double d_eer_pct = 0.0;
  double d_eer_threshold = 0.0;
  std::map<int, double> bpcer_at_apcer_pct;  // target (5, 10) -> value
  std::map<std::string, double> apcer_per_type_at_eer;
  std::vector<DetPoint> det_points;
  std::size_t bona_count = 0;
  std::map<std::string, std::size_t> attack_counts;
};

EvalReport evaluate(const ScoreSet& set, std::span<const int> targets_pct = std::span<const int>());

nlohmann::json to_json(const EvalReport& report, bool include_det = true);
EvalReport report_from_json(const nlohmann::json& node);

// CSV with header "threshold,apcer_pct,bpcer_pct".
void write_det_csv(const std::filesystem::path& path, std::span<const DetPoint> points);

}  // namespace echopad::metrics
