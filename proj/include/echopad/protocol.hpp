// include/echopad/protocol.hpp

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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "echopad/echosim.hpp"
#include "echopad/embed.hpp"
#include "echopad/ensemble.hpp"
#include "echopad/manifest.hpp"
#include "echopad/metrics.hpp"
#include "echopad/pipeline.hpp"

namespace echopad::protocol {

struct ProtocolSpec {
  std::size_t train_subject_count = 25;
  std::size_t test_subject_count = 10;
  std::size_t silicone_masks_per_split = 2;
  // Attack 1..4.
  std::vector<std::string> pai_order{"display", "print_matte", "print_glossy", "silicone"};
  pipeline::PipelineConfig pipeline;
  ensemble::SvmParams svm;
  std::uint64_t seed = 42;
};

void validate(const ProtocolSpec& spec);

struct ManifestSplit {
  std::vector<ManifestEntry> train;
  std::vector<ManifestEntry> test;
  echosim::SubjectAssignment subjects;
};

// Identity-disjoint split by a seeded subject shuffle (the same assignment the
// dataset generator uses for an equal seed). Silicone samples must come from
// exactly masks_per_split mask identities on each side.
ManifestSplit split_manifest(const std::vector<ManifestEntry>& manifest, const ProtocolSpec& spec);

using SampleLoader = std::function<Waveform(const ManifestEntry&)>;

struct FeatureSet {
  std::vector<ManifestEntry> entries;
  std::vector<embed::EmbeddingGrid> grids;
};

// Runs the extractor over every entry in parallel; output order follows input.
FeatureSet extract_features(const std::vector<ManifestEntry>& entries,
                            const pipeline::FeatureExtractor& extractor, const SampleLoader& loader);

struct MatrixCell {
  std::string train_pai;
  std::string test_pai;
  bool intra = false;
  metrics::EvalReport report;
};

struct SubjectAudit {
  std::vector<std::int64_t> train_subjects;
  std::vector<std::int64_t> test_subjects;
  bool disjoint = true;
};

struct ProtocolReport {
  std::vector<std::string> pai_order;
  std::vector<MatrixCell> cells;  // row-major: train PAI k, test PAI j at k * n + j
  double mean_intra_d_eer = 0.0;
  double mean_inter_d_eer = 0.0;
  SubjectAudit audit;
  std::vector<double> thresholds;  // per training row

  const MatrixCell& cell(std::size_t train_k, std::size_t test_j) const {
    return cells.at(train_k * pai_order.size() + test_j);
  }
};

// For each training PAI k: one ensemble on bona-train + PAI_k-train (seed
// derived from spec.seed and k), evaluated on bona-test + PAI_j-test for all j.
ProtocolReport run_matrix(const FeatureSet& train, const FeatureSet& test, const ProtocolSpec& spec);

ProtocolReport run_matrix(const std::vector<ManifestEntry>& train_manifest,
                          const std::vector<ManifestEntry>& test_manifest, const ProtocolSpec& spec,
                          const SampleLoader& loader);

nlohmann::json to_json(const ProtocolReport& report, bool include_det = false);

// Header: train_pai,test_pai,d_eer,bpcer@5,bpcer@10
void write_csv(const std::filesystem::path& path, const ProtocolReport& report);

}  // namespace echopad::protocol
