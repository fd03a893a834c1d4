// src/metrics.cpp

// Copyright 2026  echopad authors

// See ../COPYING for clarification regarding multiple authors
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

#include "echopad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "echopad/error.hpp"

namespace echopad::metrics {
namespace {

constexpr int kDefaultTargets[] = {5, 10};

// Sorted copies make every rate a pair of binary searches.
struct SortedSet {
  std::vector<double> bona;
  std::vector<std::pair<std::string, std::vector<double>>> attacks;

  explicit SortedSet(const ScoreSet& set) : bona(set.bona) {
    std::sort(bona.begin(), bona.end());
    for (const auto& [type, scores] : set.attacks) {
      auto sorted = scores;
      std::sort(sorted.begin(), sorted.end());
      attacks.emplace_back(type, std::move(sorted));
    }
  }

  double bpcer_at(double t) const {
    const auto below = std::lower_bound(bona.begin(), bona.end(), t) - bona.begin();
    return static_cast<double>(below) * 100.0 / static_cast<double>(bona.size());
  }
  double apcer_of(const std::vector<double>& s, double t) const {
    const auto below = std::lower_bound(s.begin(), s.end(), t) - s.begin();
    return static_cast<double>(static_cast<std::ptrdiff_t>(s.size()) - below) * 100.0 /
           static_cast<double>(s.size());
  }
  double apcer_at(double t) const {
    double worst = 0.0;
    for (const auto& [type, s] : attacks) worst = std::max(worst, apcer_of(s, t));
    return worst;
  }
};

void require_nonempty(std::span<const double> scores, const char* what) {
  if (scores.empty()) throw Error(ErrorKind::kInvalidArgument, std::string(what) + " scores are empty");
}

}  // namespace

void ScoreSet::validate() const {
  require_nonempty(bona, "bona fide");
  if (attacks.empty()) throw Error(ErrorKind::kInvalidArgument, "score set has no attack type");
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  if (!finite(bona)) throw Error(ErrorKind::kInvalidArgument, "non-finite bona fide score");
  for (const auto& [type, scores] : attacks) {
    if (scores.empty())
      throw Error(ErrorKind::kInvalidArgument, "attack type '" + type + "' has no scores");
    if (!finite(scores)) throw Error(ErrorKind::kInvalidArgument, "non-finite score for '" + type + "'");
  }
}

double apcer(std::span<const double> attack_scores, double threshold) {
  require_nonempty(attack_scores, "attack");
  const auto accepted = std::count_if(attack_scores.begin(), attack_scores.end(),
                                      [threshold](double s) { return s >= threshold; });
  return static_cast<double>(accepted) * 100.0 / static_cast<double>(attack_scores.size());
}

double bpcer(std::span<const double> bona_scores, double threshold) {
  require_nonempty(bona_scores, "bona fide");
  const auto rejected = std::count_if(bona_scores.begin(), bona_scores.end(),
                                      [threshold](double s) { return s < threshold; });
  return static_cast<double>(rejected) * 100.0 / static_cast<double>(bona_scores.size());
}

MultiApcer apcer(const ScoreSet& set, double threshold) {
  if (set.attacks.empty()) throw Error(ErrorKind::kInvalidArgument, "score set has no attack type");
  MultiApcer out;
  for (const auto& [type, scores] : set.attacks) {
    const double v = apcer(scores, threshold);
    out.per_type[type] = v;
    out.max_pct = std::max(out.max_pct, v);
  }
  return out;
}

std::vector<double> candidate_thresholds(const ScoreSet& set) {
  std::vector<double> pooled(set.bona);
  for (const auto& [type, scores] : set.attacks) pooled.insert(pooled.end(), scores.begin(), scores.end());
  std::sort(pooled.begin(), pooled.end());
  pooled.erase(std::unique(pooled.begin(), pooled.end()), pooled.end());
  std::vector<double> out;
  out.reserve(2 * pooled.size() + 1);
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    out.push_back(pooled[i]);
    if (i + 1 < pooled.size()) out.push_back(0.5 * (pooled[i] + pooled[i + 1]));
  }
  if (!pooled.empty()) out.push_back(pooled.back() + std::max(1.0, std::abs(pooled.back())));
  return out;
}

EerResult d_eer(const ScoreSet& set) {
  set.validate();
  const SortedSet sorted(set);
  const auto cands = candidate_thresholds(set);
  double prev_a = sorted.apcer_at(cands[0]);
  double prev_b = sorted.bpcer_at(cands[0]);
  if (prev_a - prev_b <= 0.0) return {(prev_a + prev_b) / 2.0, cands[0]};
  for (std::size_t j = 1; j < cands.size(); ++j) {
    const double a = sorted.apcer_at(cands[j]);
    const double b = sorted.bpcer_at(cands[j]);
    const double f = a - b;
    if (f <= 0.0) {
      if (f == 0.0) return {(a + b) / 2.0, cands[j]};
      const double f_prev = prev_a - prev_b;
      const double alpha = f_prev / (f_prev - f);
      const double ai = prev_a + alpha * (a - prev_a);
      const double bi = prev_b + alpha * (b - prev_b);
      return {(ai + bi) / 2.0, cands[j - 1] + alpha * (cands[j] - cands[j - 1])};
    }
    prev_a = a;
    prev_b = b;
  }
  // Unreachable: the sentinel candidate always has APCER 0, BPCER 100.
  throw Error(ErrorKind::kInvalidArgument, "EER sweep found no crossing");
}

double bpcer_at_apcer(const ScoreSet& set, double target_pct) {
  set.validate();
  const SortedSet sorted(set);
  double best = 100.0;
  for (double t : candidate_thresholds(set))
    if (sorted.apcer_at(t) <= target_pct) best = std::min(best, sorted.bpcer_at(t));
  return best;
}

std::vector<DetPoint> det_curve(const ScoreSet& set) {
  set.validate();
  const SortedSet sorted(set);
  std::vector<DetPoint> out;
  for (double t : candidate_thresholds(set)) out.push_back({sorted.apcer_at(t), sorted.bpcer_at(t), t});
  return out;
}

EvalReport evaluate(const ScoreSet& set, std::span<const int> targets_pct) {
  set.validate();
  if (targets_pct.empty()) targets_pct = kDefaultTargets;
  EvalReport r;
  const auto eer = d_eer(set);
  r.d_eer_pct = eer.pct;
  r.d_eer_threshold = eer.threshold;
  for (int t : targets_pct) r.bpcer_at_apcer_pct[t] = bpcer_at_apcer(set, t);
  r.apcer_per_type_at_eer = apcer(set, eer.threshold).per_type;
  r.det_points = det_curve(set);
  r.bona_count = set.bona.size();
  for (const auto& [type, scores] : set.attacks) r.attack_counts[type] = scores.size();
  return r;
}

nlohmann::json to_json(const EvalReport& report, bool include_det) {
  nlohmann::json j;
  j["d_eer_pct"] = report.d_eer_pct;
  j["d_eer_threshold"] = report.d_eer_threshold;
  nlohmann::json targets = nlohmann::json::object();
  for (const auto& [t, v] : report.bpcer_at_apcer_pct) targets[std::to_string(t)] = v;
  j["bpcer_at_apcer_pct"] = targets;
  j["apcer_per_type_at_eer"] = report.apcer_per_type_at_eer;
  nlohmann::json counts = {{"bona_fide", report.bona_count}};
  for (const auto& [type, n] : report.attack_counts) counts[type] = n;
  j["counts"] = counts;
  if (include_det) {
    nlohmann::json det = nlohmann::json::array();
    for (const auto& p : report.det_points) det.push_back({p.threshold, p.apcer_pct, p.bpcer_pct});
    j["det_points"] = det;
  }
  return j;
}

EvalReport report_from_json(const nlohmann::json& node) {
  try {
    EvalReport r;
    r.d_eer_pct = node.at("d_eer_pct").get<double>();
    r.d_eer_threshold = node.at("d_eer_threshold").get<double>();
    for (const auto& [k, v] : node.at("bpcer_at_apcer_pct").items())
      r.bpcer_at_apcer_pct[std::stoi(k)] = v.get<double>();
    if (node.contains("apcer_per_type_at_eer"))
      r.apcer_per_type_at_eer = node.at("apcer_per_type_at_eer").get<std::map<std::string, double>>();
    for (const auto& [k, v] : node.at("counts").items()) {
      if (k == "bona_fide") r.bona_count = v.get<std::size_t>();
      else r.attack_counts[k] = v.get<std::size_t>();
    }
    if (node.contains("det_points"))
      for (const auto& p : node.at("det_points"))
        r.det_points.push_back({p.at(1).get<double>(), p.at(2).get<double>(), p.at(0).get<double>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("malformed evaluation report: ") + e.what());
  }
}

void write_det_csv(const std::filesystem::path& path, std::span<const DetPoint> points) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "threshold,apcer_pct,bpcer_pct\n" << std::setprecision(17);
  for (const auto& p : points) out << p.threshold << ',' << p.apcer_pct << ',' << p.bpcer_pct << '\n';
}

}  // namespace echopad::metrics
