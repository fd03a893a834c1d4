// src/protocol.cpp

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

#include "echopad/protocol.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <set>

#include "echopad/error.hpp"
#include "echopad/parallel.hpp"
#include "echopad/random.hpp"

namespace echopad::protocol {
namespace {

std::string class_of(const ManifestEntry& e) { return e.is_bona_fide() ? "bonafide" : e.pai_type; }

}  // namespace

void validate(const ProtocolSpec& spec) {
  if (spec.pai_order.size() != 4) throw Error(ErrorKind::kInvalidSpec, "pai_order must list exactly 4 PAI types");
  std::set<std::string> seen;
  for (const auto& p : spec.pai_order) {
    const auto& known = echosim::pai_types();
    if (std::find(known.begin(), known.end(), p) == known.end())
      throw Error(ErrorKind::kInvalidSpec, "unknown PAI type '" + p + "' in pai_order");
    if (!seen.insert(p).second) throw Error(ErrorKind::kInvalidSpec, "duplicate PAI type '" + p + "'");
  }
  if (spec.train_subject_count == 0 || spec.test_subject_count == 0)
    throw Error(ErrorKind::kInvalidSpec, "subject counts must be positive");
}

ManifestSplit split_manifest(const std::vector<ManifestEntry>& manifest, const ProtocolSpec& spec) {
  validate(spec);
  std::vector<std::int64_t> ids;
  std::set<std::int64_t> mask_ids;
  for (const auto& e : manifest) {
    ids.push_back(e.subject_id);
    if (e.pai_type == "silicone") mask_ids.insert(e.subject_id);
  }
  ManifestSplit out;
  out.subjects = echosim::assign_subjects(ids, spec.train_subject_count, spec.test_subject_count,
                                          spec.silicone_masks_per_split, spec.seed);
  const std::set<std::int64_t> train(out.subjects.train.begin(), out.subjects.train.end());
  const std::set<std::int64_t> test(out.subjects.test.begin(), out.subjects.test.end());
  if (!mask_ids.empty()) {
    std::size_t in_train = 0, in_test = 0;
    for (auto id : mask_ids) {
      in_train += train.count(id);
      in_test += test.count(id);
    }
    if (in_train != spec.silicone_masks_per_split || in_test != spec.silicone_masks_per_split)
      throw Error(ErrorKind::kProtocol, "silicone masks split " + std::to_string(in_train) + "/" +
                                            std::to_string(in_test) + ", expected " +
                                            std::to_string(spec.silicone_masks_per_split) + "/" +
                                            std::to_string(spec.silicone_masks_per_split));
  }
  for (const auto& e : manifest) {
    ManifestEntry copy = e;
    if (train.count(e.subject_id)) {
      copy.split = "train";
      out.train.push_back(std::move(copy));
    } else if (test.count(e.subject_id)) {
      copy.split = "test";
      out.test.push_back(std::move(copy));
    }
  }
  return out;
}

FeatureSet extract_features(const std::vector<ManifestEntry>& entries,
                            const pipeline::FeatureExtractor& extractor, const SampleLoader& loader) {
  FeatureSet out;
  out.entries = entries;
  out.grids.resize(entries.size());
  parallel_for(entries.size(), [&](std::size_t i) { out.grids[i] = extractor.embed(loader(entries[i])); });
  return out;
}

ProtocolReport run_matrix(const FeatureSet& train, const FeatureSet& test, const ProtocolSpec& spec) {
  validate(spec);
  if (train.entries.size() != train.grids.size() || test.entries.size() != test.grids.size())
    throw Error(ErrorKind::kShapeMismatch, "feature set entries and grids differ in length");
  const auto& order = spec.pai_order;
  const std::size_t n = order.size();

  auto require_class = [](const FeatureSet& fs, const std::string& cls, const char* split) {
    for (const auto& e : fs.entries)
      if (class_of(e) == cls) return;
    throw Error(ErrorKind::kProtocol, "class '" + cls + "' has no " + split + " samples");
  };
  require_class(train, "bonafide", "train");
  require_class(test, "bonafide", "test");
  for (const auto& p : order) {
    require_class(train, p, "train");
    require_class(test, p, "test");
  }

  ProtocolReport report;
  report.pai_order = order;
  report.cells.resize(n * n);
  report.thresholds.resize(n);

  std::set<std::int64_t> train_subjects, test_subjects;
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<embed::EmbeddingGrid> grids;
    std::vector<int> labels;
    for (std::size_t i = 0; i < train.entries.size(); ++i) {
      const auto cls = class_of(train.entries[i]);
      if (cls != "bonafide" && cls != order[k]) continue;
      grids.push_back(train.grids[i]);
      labels.push_back(cls == "bonafide" ? ensemble::kBonaFide : ensemble::kAttack);
      train_subjects.insert(train.entries[i].subject_id);
    }
    const auto model = ensemble::train_ensemble(grids, labels, spec.svm, derive_seed(spec.seed, {k}));
    report.thresholds[k] = model.threshold;

    std::vector<double> fused(test.entries.size());
    parallel_for(test.entries.size(), [&](std::size_t i) { fused[i] = ensemble::score(test.grids[i], model).fused; });

    for (std::size_t j = 0; j < n; ++j) {
      metrics::ScoreSet set;
      auto& attack = set.attacks[order[j]];
      for (std::size_t i = 0; i < test.entries.size(); ++i) {
        const auto cls = class_of(test.entries[i]);
        if (cls == "bonafide") set.bona.push_back(fused[i]);
        else if (cls == order[j]) attack.push_back(fused[i]);
        else continue;
        test_subjects.insert(test.entries[i].subject_id);
      }
      MatrixCell& cell = report.cells[k * n + j];
      cell.train_pai = order[k];
      cell.test_pai = order[j];
      cell.intra = k == j;
      cell.report = metrics::evaluate(set);
    }
  }

  double intra = 0.0, inter = 0.0;
  for (const auto& c : report.cells) (c.intra ? intra : inter) += c.report.d_eer_pct;
  report.mean_intra_d_eer = intra / static_cast<double>(n);
  report.mean_inter_d_eer = inter / static_cast<double>(n * n - n);

  report.audit.train_subjects.assign(train_subjects.begin(), train_subjects.end());
  report.audit.test_subjects.assign(test_subjects.begin(), test_subjects.end());
  std::vector<std::int64_t> overlap;
  std::set_intersection(train_subjects.begin(), train_subjects.end(), test_subjects.begin(),
                        test_subjects.end(), std::back_inserter(overlap));
  report.audit.disjoint = overlap.empty();
  if (!overlap.empty())
    throw Error(ErrorKind::kProtocol, "subject " + std::to_string(overlap.front()) +
                                          " appears in both training and test data");
  return report;
}

ProtocolReport run_matrix(const std::vector<ManifestEntry>& train_manifest,
                          const std::vector<ManifestEntry>& test_manifest, const ProtocolSpec& spec,
                          const SampleLoader& loader) {
  validate(spec);
  const pipeline::FeatureExtractor extractor(spec.pipeline);
  return run_matrix(extract_features(train_manifest, extractor, loader),
                    extract_features(test_manifest, extractor, loader), spec);
}

nlohmann::json to_json(const ProtocolReport& report, bool include_det) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& c : report.cells) {
    nlohmann::json j = metrics::to_json(c.report, include_det);
    j["train_pai"] = c.train_pai;
    j["test_pai"] = c.test_pai;
    j["intra"] = c.intra;
    cells.push_back(std::move(j));
  }
  return {{"pai_order", report.pai_order},
          {"cells", cells},
          {"mean_intra_d_eer_pct", report.mean_intra_d_eer},
          {"mean_inter_d_eer_pct", report.mean_inter_d_eer},
          {"train_thresholds", report.thresholds},
          {"subject_audit",
           {{"train_subjects", report.audit.train_subjects},
            {"test_subjects", report.audit.test_subjects},
            {"disjoint", report.audit.disjoint}}}};
}

void write_csv(const std::filesystem::path& path, const ProtocolReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "train_pai,test_pai,d_eer,bpcer@5,bpcer@10\n" << std::setprecision(10);
  for (const auto& c : report.cells) {
    const auto& b = c.report.bpcer_at_apcer_pct;
    out << c.train_pai << ',' << c.test_pai << ',' << c.report.d_eer_pct << ',' << b.at(5) << ','
        << b.at(10) << '\n';
  }
}

}  // namespace echopad::protocol
