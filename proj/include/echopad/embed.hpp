// include/echopad/embed.hpp

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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "echopad/cwt.hpp"

namespace echopad::embed {

// g x g cells, d values per cell. Cell (i, j) occupies the contiguous slice
// starting at (i * g + j) * d, so the flattened (g*g) x d matrix has row
// i * g + j equal to that cell.
struct EmbeddingGrid {
  std::size_t g = 0;
  std::size_t d = 0;
  std::vector<double> values;

  EmbeddingGrid() = default;
  EmbeddingGrid(std::size_t grid, std::size_t dim);

  std::size_t cells() const noexcept { return g * g; }
  std::span<const double> cell(std::size_t index) const;
  std::span<const double> cell(std::size_t i, std::size_t j) const { return cell(i * g + j); }
  std::span<double> cell(std::size_t index);
  bool all_finite() const noexcept;
};

enum class CellStat { kMean, kStd, kMin, kMax, kMedian, kMeanAbs, kEnergy, kRange };

// mean, std, min, max, median, mean-abs, energy (mean square), range.
const std::vector<CellStat>& default_stats();
std::string_view to_string(CellStat stat) noexcept;
CellStat parse_stat(const std::string& name);

// Partitions an image whose sides are multiples of g into g x g equal cells
// and computes the ordered statistics of each. std is the population value.
EmbeddingGrid pool_image(const cwt::Image& image, std::size_t g, std::span<const CellStat> stats);

// Pixels per cell side before pooling.
constexpr std::size_t kCellPixels = 32;

// to_image to (32g) x (32g), then pool_image.
EmbeddingGrid grid_pool_embed(const cwt::Scalogram& scalogram, std::size_t g,
                              std::span<const CellStat> stats,
                              double dynamic_range_db = cwt::kDefaultDynamicRangeDb);

struct GridPoolSpec {
  std::size_t g = 7;
  std::vector<CellStat> stats = default_stats();
  double dynamic_range_db = cwt::kDefaultDynamicRangeDb;
};

struct ExternalModelSpec {
  std::filesystem::path model_path;
  std::size_t input_size = 224;
  std::array<std::size_t, 3> expected_shape{7, 7, 1280};
};

// Exactly one backend kind, enforced by the variant.
using EmbedBackendSpec = std::variant<GridPoolSpec, ExternalModelSpec>;

class EmbedBackend {
 public:
  virtual ~EmbedBackend() = default;
  virtual EmbeddingGrid embed(const cwt::Scalogram& scalogram) const = 0;
  virtual std::string describe() const = 0;
};

class GridPoolBackend final : public EmbedBackend {
 public:
  explicit GridPoolBackend(GridPoolSpec spec);
  EmbeddingGrid embed(const cwt::Scalogram& scalogram) const override;
  std::string describe() const override;

 private:
  GridPoolSpec spec_;
};

// ---------------------------------------------------------------------------
// External model support.
//
// The model file is accompanied by a sidecar "<model_path>.json":
//
//   {
//     "format": "echopad-external-model", "version": 1,
//     "input":  {"layout": "NCHW", "shape": [1, 3, 224, 224],
//                "value_range": [0, 1], "channels": "gray_replicated"},
//     "output": {"layout": "NHWC", "shape": [1, 7, 7, 1280]},
//     "test_image": {"kind": "diagonal_ramp_v1", "embedding_sum": ...,
//                    "embedding_l2": ..., "sha256_float32": "..."}
//   }
//
// Input layouts: NCHW [1,3,S,S] (gray replicated to three channels) or NHWC
// [1,S,S,1]. Output layouts: NHWC [1,7,7,1280] or NCHW [1,1280,7,7].
// Preprocessing beyond [0,1] grayscale lives inside the model graph.

struct ModelSidecar {
  std::string input_layout;
  std::vector<std::int64_t> input_shape;
  std::string output_layout;
  std::vector<std::int64_t> output_shape;
  bool has_test_image = false;
  double test_embedding_sum = 0.0;
  double test_embedding_l2 = 0.0;
  std::string test_embedding_sha256;
};

ModelSidecar read_sidecar(const std::filesystem::path& sidecar_path);
std::filesystem::path sidecar_path_for(const std::filesystem::path& model_path);

// Minimal inference surface an external runtime has to provide.
class InferenceRuntime {
 public:
  virtual ~InferenceRuntime() = default;
  virtual std::vector<float> run(std::span<const float> input,
                                 std::span<const std::int64_t> input_shape) const = 0;
};

using RuntimeFactory = std::function<std::unique_ptr<InferenceRuntime>(
    const std::filesystem::path& model_path, const ModelSidecar& sidecar)>;

// ONNX Runtime when built with ECHOPAD_WITH_ONNXRUNTIME; otherwise a factory
// that fails with ErrorKind::kUnavailable.
RuntimeFactory default_runtime_factory();

class ExternalModelBackend final : public EmbedBackend {
 public:
  // Validates the model file, sidecar and declared shapes before creating the
  // runtime. Shape problems raise ErrorKind::kLoad naming declared vs expected.
  static std::unique_ptr<ExternalModelBackend> load(const ExternalModelSpec& spec,
                                                    const RuntimeFactory& factory =
                                                        default_runtime_factory());

  EmbeddingGrid embed(const cwt::Scalogram& scalogram) const override;
  std::string describe() const override;

  // Runs inference on an image (resampled to input_size if needed).
  EmbeddingGrid embed_image(const cwt::Image& image) const;
  const ModelSidecar& sidecar() const noexcept { return sidecar_; }

 private:
  ExternalModelBackend(ExternalModelSpec spec, ModelSidecar sidecar,
                       std::unique_ptr<InferenceRuntime> runtime);

  ExternalModelSpec spec_;
  ModelSidecar sidecar_;
  std::unique_ptr<InferenceRuntime> runtime_;
};

EmbeddingGrid external_embed(const cwt::Image& image, const ExternalModelBackend& backend);

// Fixed 224x224 image used to check an exported model against its sidecar.
cwt::Image reference_test_image(std::size_t size = 224);

struct EmbeddingChecksum {
  double sum = 0.0;
  double l2 = 0.0;
  std::string sha256_float32;  // over little-endian float32 values, grid order
};
EmbeddingChecksum checksum(const EmbeddingGrid& grid);

// True when the reference image's embedding matches the sidecar's recorded
// sum and l2 norm within rel_tol.
bool verify_test_image(const ExternalModelBackend& backend, double rel_tol = 1e-4);

std::unique_ptr<EmbedBackend> make_backend(const EmbedBackendSpec& spec,
                                           const RuntimeFactory& factory = default_runtime_factory());

}  // namespace echopad::embed
