// src/embed.cpp

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

#include "echopad/embed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "echopad/error.hpp"

namespace echopad::embed {

EmbeddingGrid::EmbeddingGrid(std::size_t grid, std::size_t dim)
    : g(grid), d(dim), values(grid * grid * dim, 0.0) {}

std::span<const double> EmbeddingGrid::cell(std::size_t index) const {
  if (index >= cells()) throw Error(ErrorKind::kInvalidArgument, "grid cell index out of range");
  return {values.data() + index * d, d};
}

std::span<double> EmbeddingGrid::cell(std::size_t index) {
  if (index >= cells()) throw Error(ErrorKind::kInvalidArgument, "grid cell index out of range");
  return {values.data() + index * d, d};
}

bool EmbeddingGrid::all_finite() const noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

const std::vector<CellStat>& default_stats() {
  static const std::vector<CellStat> stats{CellStat::kMean,   CellStat::kStd,     CellStat::kMin,
                                           CellStat::kMax,    CellStat::kMedian,  CellStat::kMeanAbs,
                                           CellStat::kEnergy, CellStat::kRange};
  return stats;
}

std::string_view to_string(CellStat stat) noexcept {
  switch (stat) {
    case CellStat::kMean: return "mean";
    case CellStat::kStd: return "std";
    case CellStat::kMin: return "min";
    case CellStat::kMax: return "max";
    case CellStat::kMedian: return "median";
    case CellStat::kMeanAbs: return "mean_abs";
    case CellStat::kEnergy: return "energy";
    case CellStat::kRange: return "range";
  }
  return "unknown";
}

CellStat parse_stat(const std::string& name) {
  for (CellStat s : default_stats())
    if (to_string(s) == name) return s;
  throw Error(ErrorKind::kInvalidArgument, "unknown cell statistic '" + name + "'");
}

namespace {

double stat_value(CellStat stat, std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  switch (stat) {
    case CellStat::kMean: return std::accumulate(v.begin(), v.end(), 0.0) / n;
    case CellStat::kStd: {
      const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
      double acc = 0.0;
      for (double x : v) acc += (x - mean) * (x - mean);
      return std::sqrt(acc / n);
    }
    case CellStat::kMin: return *std::min_element(v.begin(), v.end());
    case CellStat::kMax: return *std::max_element(v.begin(), v.end());
    case CellStat::kMedian: {
      const std::size_t mid = v.size() / 2;
      std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
      const double upper = v[mid];
      if (v.size() % 2 == 1) return upper;
      const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
      return 0.5 * (lower + upper);
    }
    case CellStat::kMeanAbs: {
      double acc = 0.0;
      for (double x : v) acc += std::abs(x);
      return acc / n;
    }
    case CellStat::kEnergy: {
      double acc = 0.0;
      for (double x : v) acc += x * x;
      return acc / n;
    }
    case CellStat::kRange: {
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      return *hi - *lo;
    }
  }
  return 0.0;
}

}  // namespace

EmbeddingGrid pool_image(const cwt::Image& image, std::size_t g, std::span<const CellStat> stats) {
  if (g == 0) throw Error(ErrorKind::kInvalidArgument, "grid size must be >= 1");
  if (stats.empty()) throw Error(ErrorKind::kInvalidArgument, "at least one cell statistic required");
  if (image.height == 0 || image.width == 0 || image.height % g != 0 || image.width % g != 0)
    throw Error(ErrorKind::kShapeMismatch,
                "image " + std::to_string(image.height) + "x" + std::to_string(image.width) +
                    " is not divisible into a " + std::to_string(g) + "x" + std::to_string(g) +
                    " grid");
  const std::size_t ch = image.height / g, cw = image.width / g;
  EmbeddingGrid grid(g, stats.size());
  std::vector<double> cell_values;
  cell_values.reserve(ch * cw);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      auto out = grid.cell(i * g + j);
      for (std::size_t k = 0; k < stats.size(); ++k) {
        // nth_element reorders, so refill per statistic.
        cell_values.clear();
        for (std::size_t r = i * ch; r < (i + 1) * ch; ++r)
          for (std::size_t c = j * cw; c < (j + 1) * cw; ++c) cell_values.push_back(image.at(r, c));
        out[k] = stat_value(stats[k], cell_values);
      }
    }
  }
  return grid;
}

EmbeddingGrid grid_pool_embed(const cwt::Scalogram& scalogram, std::size_t g,
                              std::span<const CellStat> stats, double dynamic_range_db) {
  if (scalogram.rows == 0 || scalogram.cols == 0)
    throw Error(ErrorKind::kInvalidArgument, "grid pooling needs a non-empty scalogram");
  if (g == 0) throw Error(ErrorKind::kInvalidArgument, "grid size must be >= 1");
  const std::size_t side = kCellPixels * g;
  return pool_image(cwt::to_image(scalogram, side, side, dynamic_range_db), g, stats);
}

GridPoolBackend::GridPoolBackend(GridPoolSpec spec) : spec_(std::move(spec)) {
  if (spec_.g == 0) throw Error(ErrorKind::kInvalidSpec, "grid size must be >= 1");
  if (spec_.stats.empty()) throw Error(ErrorKind::kInvalidSpec, "grid pooling needs statistics");
}

EmbeddingGrid GridPoolBackend::embed(const cwt::Scalogram& scalogram) const {
  return grid_pool_embed(scalogram, spec_.g, spec_.stats, spec_.dynamic_range_db);
}

std::string GridPoolBackend::describe() const {
  return "grid_pool(g=" + std::to_string(spec_.g) + ", d=" + std::to_string(spec_.stats.size()) + ")";
}

std::unique_ptr<EmbedBackend> make_backend(const EmbedBackendSpec& spec,
                                           const RuntimeFactory& factory) {
  if (const auto* pool = std::get_if<GridPoolSpec>(&spec))
    return std::make_unique<GridPoolBackend>(*pool);
  return ExternalModelBackend::load(std::get<ExternalModelSpec>(spec), factory);
}

}  // namespace echopad::embed
