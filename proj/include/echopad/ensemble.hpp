// include/echopad/ensemble.hpp

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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "echopad/embed.hpp"

namespace echopad::ensemble {

// Bona fide is +1, attack is -1.
constexpr int kBonaFide = 1;
constexpr int kAttack = -1;

struct SvmParams {
  double c_reg = 1.0;
  double tolerance = 1e-4;  // on max - min projected gradient
  int max_epochs = 1000;
};

// Score = w . ((x - mu) / sigma) + b.
struct LinearSvm {
  std::vector<double> w;
  double b = 0.0;
  std::vector<double> mu;
  std::vector<double> sigma;

  double score(std::span<const double> x) const;
};

// Per-epoch record of the coordinate-descent run.
struct SvmTrace {
  // Dual of the hinge problem in minimization form, 1/2 |w|^2 - sum(alpha);
  // coordinate descent never increases it. The primal below is not monotone.
  std::vector<double> dual_objective;
  std::vector<double> primal_objective;
  int epochs = 0;
  bool converged = false;
};

// Row-major N x d feature matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
};

// Standardizes each dimension with the training mean and population std,
// then runs L1-loss dual coordinate descent on
//   1/2 (|w|^2 + b^2) + C sum_i max(0, 1 - y_i (w . z_i + b)),
// with the bias handled as an extra constant-1 feature. Each epoch visits
// samples in an order shuffled by an mt19937_64 seeded from `seed`.
LinearSvm train_svm(const FeatureMatrix& features, std::span<const int> labels,
                    const SvmParams& params, std::uint64_t seed, SvmTrace* trace = nullptr);

// Primal objective of a trained model on standardized training data.
double primal_objective(const LinearSvm& svm, const FeatureMatrix& features,
                        std::span<const int> labels, double c_reg);

enum class Decision { kBonaFide, kAttack };

struct EnsembleModel {
  std::size_t g = 0;
  std::size_t d = 0;
  std::vector<LinearSvm> models;  // cell index i * g + j
  double threshold = 0.0;
  double c_reg = 1.0;
  std::uint64_t seed = 0;
  std::vector<int> epochs;  // per cell
  std::string backend;      // description of the embedding backend
};

EnsembleModel train_ensemble(std::span<const embed::EmbeddingGrid> grids, std::span<const int> labels,
                             const SvmParams& params, std::uint64_t seed);

struct EnsembleScore {
  std::vector<double> cell_scores;
  double fused = 0.0;
};

EnsembleScore score(const embed::EmbeddingGrid& grid, const EnsembleModel& model);

// BonaFide iff fused >= threshold.
Decision decide(double fused, const EnsembleModel& model);
std::string_view to_string(Decision decision) noexcept;

// Versioned JSON: {"format": "echopad-ensemble", "version": 1, "g", "d",
// "threshold", "label_convention", "training": {...}, "cells": [{w, b, mu, sigma}]}.
nlohmann::json to_json(const EnsembleModel& model);
EnsembleModel model_from_json(const nlohmann::json& node);
void save_model(const std::filesystem::path& path, const EnsembleModel& model,
                const nlohmann::json& provenance = nlohmann::json());
EnsembleModel load_model(const std::filesystem::path& path);

}  // namespace echopad::ensemble
