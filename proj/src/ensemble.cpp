// src/ensemble.cpp

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

#include "echopad/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

#include "echopad/error.hpp"
#include "echopad/metrics.hpp"
#include "echopad/parallel.hpp"

namespace echopad::ensemble {
namespace {

constexpr double kMinSigma = 1e-12;
constexpr const char* kModelFormat = "echopad-ensemble";
constexpr int kModelVersion = 1;

void check_labels(std::span<const int> labels, std::size_t n) {
  if (labels.size() != n)
    throw Error(ErrorKind::kShapeMismatch, "got " + std::to_string(labels.size()) + " labels for " +
                                               std::to_string(n) + " samples");
  bool pos = false, neg = false;
  for (int y : labels) {
    if (y == kBonaFide) pos = true;
    else if (y == kAttack) neg = true;
    else throw Error(ErrorKind::kInvalidArgument, "labels must be +1 or -1");
  }
  if (!pos || !neg)
    throw Error(ErrorKind::kTraining, std::string("training data has only ") +
                                          (pos ? "bona fide" : "attack") + " samples");
}

}  // namespace

double LinearSvm::score(std::span<const double> x) const {
  if (x.size() != w.size())
    throw Error(ErrorKind::kShapeMismatch, "feature dimension " + std::to_string(x.size()) +
                                               " does not match model dimension " +
                                               std::to_string(w.size()));
  double s = b;
  for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * ((x[k] - mu[k]) / sigma[k]);
  return s;
}

LinearSvm train_svm(const FeatureMatrix& features, std::span<const int> labels,
                    const SvmParams& params, std::uint64_t seed, SvmTrace* trace) {
  const std::size_t n = features.rows, d = features.cols;
  if (n < 2) throw Error(ErrorKind::kTraining, "need at least two training samples");
  if (features.values.size() != n * d) throw Error(ErrorKind::kShapeMismatch, "feature matrix size");
  check_labels(labels, n);
  if (!std::all_of(features.values.begin(), features.values.end(), [](double v) { return std::isfinite(v); }))
    throw Error(ErrorKind::kTraining, "training features contain non-finite values");
  if (!(params.c_reg > 0.0)) throw Error(ErrorKind::kInvalidSpec, "C must be positive");

  LinearSvm svm;
  svm.mu.assign(d, 0.0);
  svm.sigma.assign(d, 0.0);
  std::vector<bool> constant(d, false);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) svm.mu[k] += features.values[i * d + k];
  for (std::size_t k = 0; k < d; ++k) svm.mu[k] /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) {
      const double dev = features.values[i * d + k] - svm.mu[k];
      svm.sigma[k] += dev * dev;
    }
  for (std::size_t k = 0; k < d; ++k) {
    svm.sigma[k] = std::sqrt(svm.sigma[k] / static_cast<double>(n));
    if (svm.sigma[k] <= kMinSigma * std::max(1.0, std::abs(svm.mu[k]))) {
      svm.sigma[k] = 1.0;
      constant[k] = true;
    }
  }

  std::vector<double> z(n * d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k)
      z[i * d + k] = constant[k] ? 0.0 : (features.values[i * d + k] - svm.mu[k]) / svm.sigma[k];

  const double c = params.c_reg;
  std::vector<double> alpha(n, 0.0), qdiag(n);
  for (std::size_t i = 0; i < n; ++i) {
    double q = 1.0;
    for (std::size_t k = 0; k < d; ++k) q += z[i * d + k] * z[i * d + k];
    qdiag[i] = q;
  }
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);

  auto margin = [&](std::size_t i) {
    double s = b;
    for (std::size_t k = 0; k < d; ++k) s += w[k] * z[i * d + k];
    return s;
  };

  int epoch = 0;
  bool converged = false;
  while (epoch < params.max_epochs) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (n - i));
      std::swap(order[i], order[j]);
    }
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
      const double y = labels[idx];
      const double grad = y * margin(idx) - 1.0;
      double pg = grad;
      if (alpha[idx] == 0.0) pg = std::min(grad, 0.0);
      else if (alpha[idx] == c) pg = std::max(grad, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[idx];
        alpha[idx] = std::clamp(old - grad / qdiag[idx], 0.0, c);
        const double step = (alpha[idx] - old) * y;
        for (std::size_t k = 0; k < d; ++k) w[k] += step * z[idx * d + k];
        b += step;
      }
    }
    ++epoch;
    if (trace) {
      double wsq = b * b;
      for (double v : w) wsq += v * v;
      const double alpha_sum = std::accumulate(alpha.begin(), alpha.end(), 0.0);
      double hinge = 0.0;
      for (std::size_t i = 0; i < n; ++i) hinge += std::max(0.0, 1.0 - labels[i] * margin(i));
      trace->dual_objective.push_back(0.5 * wsq - alpha_sum);
      trace->primal_objective.push_back(0.5 * wsq + c * hinge);
    }
    if (pg_max - pg_min <= params.tolerance) {
      converged = true;
      break;
    }
  }
  if (trace) {
    trace->epochs = epoch;
    trace->converged = converged;
  }
  for (std::size_t k = 0; k < d; ++k)
    if (constant[k]) w[k] = 0.0;
  svm.w = std::move(w);
  svm.b = b;
  return svm;
}

double primal_objective(const LinearSvm& svm, const FeatureMatrix& features,
                        std::span<const int> labels, double c_reg) {
  double obj = 0.5 * svm.b * svm.b;
  for (double v : svm.w) obj += 0.5 * v * v;
  for (std::size_t i = 0; i < features.rows; ++i)
    obj += c_reg * std::max(0.0, 1.0 - labels[i] * svm.score(features.row(i)));
  return obj;
}

EnsembleModel train_ensemble(std::span<const embed::EmbeddingGrid> grids, std::span<const int> labels,
                             const SvmParams& params, std::uint64_t seed) {
  if (grids.empty()) throw Error(ErrorKind::kTraining, "no training samples");
  const std::size_t g = grids.front().g, d = grids.front().d;
  for (std::size_t i = 0; i < grids.size(); ++i)
    if (grids[i].g != g || grids[i].d != d || grids[i].values.size() != g * g * d)
      throw Error(ErrorKind::kShapeMismatch,
                  "embedding " + std::to_string(i) + " has shape " + std::to_string(grids[i].g) + "x" +
                      std::to_string(grids[i].g) + "x" + std::to_string(grids[i].d) + ", expected " +
                      std::to_string(g) + "x" + std::to_string(g) + "x" + std::to_string(d));
  check_labels(labels, grids.size());

  EnsembleModel model;
  model.g = g;
  model.d = d;
  model.c_reg = params.c_reg;
  model.seed = seed;
  model.models.resize(g * g);
  model.epochs.resize(g * g);
  parallel_for(g * g, [&](std::size_t cell) {
    FeatureMatrix m{grids.size(), d, std::vector<double>(grids.size() * d)};
    for (std::size_t i = 0; i < grids.size(); ++i) {
      const auto slice = grids[i].cell(cell);
      std::copy(slice.begin(), slice.end(), m.values.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
    SvmTrace trace;
    model.models[cell] = train_svm(m, labels, params, seed, &trace);
    model.epochs[cell] = trace.epochs;
  });

  metrics::ScoreSet train_scores;
  auto& attack = train_scores.attacks["attack"];
  for (std::size_t i = 0; i < grids.size(); ++i) {
    const double fused = score(grids[i], model).fused;
    (labels[i] == kBonaFide ? train_scores.bona : attack).push_back(fused);
  }
  model.threshold = metrics::d_eer(train_scores).threshold;
  return model;
}

EnsembleScore score(const embed::EmbeddingGrid& grid, const EnsembleModel& model) {
  if (grid.g != model.g || grid.d != model.d)
    throw Error(ErrorKind::kShapeMismatch,
                "embedding grid " + std::to_string(grid.g) + "x" + std::to_string(grid.g) + "x" +
                    std::to_string(grid.d) + " does not match model " + std::to_string(model.g) + "x" +
                    std::to_string(model.g) + "x" + std::to_string(model.d));
  EnsembleScore out;
  out.cell_scores.resize(model.models.size());
  for (std::size_t i = 0; i < model.models.size(); ++i) {
    out.cell_scores[i] = model.models[i].score(grid.cell(i));
    out.fused += out.cell_scores[i];
  }
  return out;
}

Decision decide(double fused, const EnsembleModel& model) {
  return fused >= model.threshold ? Decision::kBonaFide : Decision::kAttack;
}

std::string_view to_string(Decision decision) noexcept {
  return decision == Decision::kBonaFide ? "bona_fide" : "attack";
}

nlohmann::json to_json(const EnsembleModel& model) {
  nlohmann::json cells = nlohmann::json::array();
  for (const auto& m : model.models)
    cells.push_back({{"w", m.w}, {"b", m.b}, {"mu", m.mu}, {"sigma", m.sigma}});
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"g", model.g},
          {"d", model.d},
          {"threshold", model.threshold},
          {"label_convention", {{"bona_fide", kBonaFide}, {"attack", kAttack}}},
          {"decision_rule", "bona_fide iff fused >= threshold"},
          {"training",
           {{"c_reg", model.c_reg}, {"seed", model.seed}, {"epochs", model.epochs}, {"backend", model.backend}}},
          {"cells", cells}};
}

EnsembleModel model_from_json(const nlohmann::json& node) {
  try {
    if (node.value("format", std::string{}) != kModelFormat)
      throw Error(ErrorKind::kFormat, "not an ensemble model file");
    if (node.value("version", 0) != kModelVersion)
      throw Error(ErrorKind::kFormat, "unsupported model version " + node.value("version", nlohmann::json()).dump());
    EnsembleModel m;
    m.g = node.at("g").get<std::size_t>();
    m.d = node.at("d").get<std::size_t>();
    m.threshold = node.at("threshold").get<double>();
    const auto& tr = node.at("training");
    m.c_reg = tr.at("c_reg").get<double>();
    m.seed = tr.at("seed").get<std::uint64_t>();
    m.epochs = tr.value("epochs", std::vector<int>{});
    m.backend = tr.value("backend", std::string{});
    for (const auto& c : node.at("cells")) {
      LinearSvm s;
      s.w = c.at("w").get<std::vector<double>>();
      s.b = c.at("b").get<double>();
      s.mu = c.at("mu").get<std::vector<double>>();
      s.sigma = c.at("sigma").get<std::vector<double>>();
      if (s.w.size() != m.d || s.mu.size() != m.d || s.sigma.size() != m.d)
        throw Error(ErrorKind::kFormat, "cell dimension does not match d");
      if (!std::all_of(s.sigma.begin(), s.sigma.end(), [](double v) { return v > 0.0; }))
        throw Error(ErrorKind::kFormat, "cell sigma must be positive");
      m.models.push_back(std::move(s));
    }
    if (m.models.size() != m.g * m.g)
      throw Error(ErrorKind::kFormat, "expected " + std::to_string(m.g * m.g) + " cells, found " +
                                          std::to_string(m.models.size()));
    if (!std::isfinite(m.threshold)) throw Error(ErrorKind::kFormat, "threshold must be finite");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kFormat, std::string("malformed model: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const EnsembleModel& model,
                const nlohmann::json& provenance) {
  auto doc = to_json(model);
  if (!provenance.is_null()) doc["provenance"] = provenance;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open model " + path.string());
  try {
    return model_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kFormat, "model " + path.string() + ": " + e.what());
  }
}

}  // namespace echopad::ensemble
