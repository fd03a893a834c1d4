// src/external_model.cpp

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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "echopad/embed.hpp"
#include "echopad/error.hpp"
#include "echopad/hash.hpp"

#ifdef ECHOPAD_HAVE_ONNXRUNTIME
#include <onnxruntime_cxx_api.h>
#endif

namespace echopad::embed {
namespace {

using nlohmann::json;

constexpr const char* kSidecarFormat = "echopad-external-model";
constexpr int kSidecarVersion = 1;

std::string shape_string(std::span<const std::int64_t> shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

std::vector<std::int64_t> read_shape(const json& node, const std::string& what) {
  if (!node.is_array()) throw Error(ErrorKind::kFormat, what + " must be an array");
  std::vector<std::int64_t> shape;
  for (const auto& v : node) {
    if (!v.is_number_integer()) throw Error(ErrorKind::kFormat, what + " must hold integers");
    shape.push_back(v.get<std::int64_t>());
  }
  return shape;
}

std::vector<std::int64_t> expected_input_shape(const std::string& layout, std::size_t size) {
  const auto s = static_cast<std::int64_t>(size);
  if (layout == "NCHW") return {1, 3, s, s};
  if (layout == "NHWC") return {1, s, s, 1};
  throw Error(ErrorKind::kLoad, "unsupported input layout '" + layout + "'");
}

std::vector<std::int64_t> expected_output_shape(const std::string& layout,
                                                const std::array<std::size_t, 3>& hwc) {
  const auto h = static_cast<std::int64_t>(hwc[0]);
  const auto w = static_cast<std::int64_t>(hwc[1]);
  const auto c = static_cast<std::int64_t>(hwc[2]);
  if (layout == "NHWC") return {1, h, w, c};
  if (layout == "NCHW") return {1, c, h, w};
  throw Error(ErrorKind::kLoad, "unsupported output layout '" + layout + "'");
}

std::vector<float> to_input_tensor(const cwt::Image& image, const std::string& layout) {
  const std::size_t plane = image.height * image.width;
  std::vector<float> tensor;
  if (layout == "NHWC") {
    tensor.resize(plane);
    for (std::size_t i = 0; i < plane; ++i) tensor[i] = static_cast<float>(image.pixels[i]);
  } else {
    tensor.resize(3 * plane);
    for (std::size_t ch = 0; ch < 3; ++ch)
      for (std::size_t i = 0; i < plane; ++i)
        tensor[ch * plane + i] = static_cast<float>(image.pixels[i]);
  }
  return tensor;
}

#ifdef ECHOPAD_HAVE_ONNXRUNTIME
class OrtRuntime final : public InferenceRuntime {
 public:
  explicit OrtRuntime(const std::filesystem::path& model_path)
      : env_(ORT_LOGGING_LEVEL_WARNING, "echopad"), session_(nullptr) {
    Ort::SessionOptions options;
    options.SetIntraOpNumThreads(1);
    session_ = Ort::Session(env_, model_path.c_str(), options);
    Ort::AllocatorWithDefaultOptions alloc;
    input_name_ = session_.GetInputNameAllocated(0, alloc).get();
    output_name_ = session_.GetOutputNameAllocated(0, alloc).get();
  }

  std::vector<float> run(std::span<const float> input,
                         std::span<const std::int64_t> input_shape) const override {
    auto mem = Ort::MemoryInfo::CreateCpu(OrtArenaAllocator, OrtMemTypeDefault);
    auto tensor = Ort::Value::CreateTensor<float>(mem, const_cast<float*>(input.data()), input.size(),
                                                  input_shape.data(), input_shape.size());
    const char* in_names[] = {input_name_.c_str()};
    const char* out_names[] = {output_name_.c_str()};
    auto outputs = session_.Run(Ort::RunOptions{nullptr}, in_names, &tensor, 1, out_names, 1);
    const auto count = outputs[0].GetTensorTypeAndShapeInfo().GetElementCount();
    const float* data = outputs[0].GetTensorData<float>();
    return {data, data + count};
  }

 private:
  Ort::Env env_;
  mutable Ort::Session session_;
  std::string input_name_;
  std::string output_name_;
};
#endif

}  // namespace

std::filesystem::path sidecar_path_for(const std::filesystem::path& model_path) {
  return std::filesystem::path(model_path.string() + ".json");
}

ModelSidecar read_sidecar(const std::filesystem::path& sidecar_path) {
  std::ifstream in(sidecar_path);
  if (!in) throw Error(ErrorKind::kLoad, "cannot open model sidecar " + sidecar_path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, "malformed model sidecar " + sidecar_path.string() + ": " + e.what());
  }
  try {
    if (doc.value("format", std::string{}) != kSidecarFormat)
      throw Error(ErrorKind::kFormat, "sidecar format must be '" + std::string(kSidecarFormat) + "'");
    if (doc.value("version", 0) != kSidecarVersion)
      throw Error(ErrorKind::kFormat, "unsupported sidecar version " + doc.value("version", json()).dump());
    ModelSidecar sc;
    const json& input = doc.at("input");
    sc.input_layout = input.at("layout").get<std::string>();
    sc.input_shape = read_shape(input.at("shape"), "input.shape");
    if (input.contains("value_range")) {
      const auto range = input.at("value_range").get<std::vector<double>>();
      if (range.size() != 2 || range[0] != 0.0 || range[1] != 1.0)
        throw Error(ErrorKind::kFormat, "input.value_range must be [0, 1]");
    }
    const json& output = doc.at("output");
    sc.output_layout = output.at("layout").get<std::string>();
    sc.output_shape = read_shape(output.at("shape"), "output.shape");
    if (doc.contains("test_image")) {
      const json& ti = doc.at("test_image");
      if (ti.value("kind", std::string{}) != "diagonal_ramp_v1")
        throw Error(ErrorKind::kFormat, "unknown test_image kind");
      sc.has_test_image = true;
      sc.test_embedding_sum = ti.at("embedding_sum").get<double>();
      sc.test_embedding_l2 = ti.at("embedding_l2").get<double>();
      sc.test_embedding_sha256 = ti.value("sha256_float32", std::string{});
    }
    return sc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kFormat, "model sidecar " + sidecar_path.string() + ": " + e.what());
  }
}

RuntimeFactory default_runtime_factory() {
#ifdef ECHOPAD_HAVE_ONNXRUNTIME
  return [](const std::filesystem::path& model_path, const ModelSidecar&) {
    return std::unique_ptr<InferenceRuntime>(new OrtRuntime(model_path));
  };
#else
  return [](const std::filesystem::path&, const ModelSidecar&) -> std::unique_ptr<InferenceRuntime> {
    throw Error(ErrorKind::kUnavailable,
                "external model backend not built (configure with -DECHOPAD_WITH_ONNXRUNTIME=ON)");
  };
#endif
}

ExternalModelBackend::ExternalModelBackend(ExternalModelSpec spec, ModelSidecar sidecar,
                                           std::unique_ptr<InferenceRuntime> runtime)
    : spec_(std::move(spec)), sidecar_(std::move(sidecar)), runtime_(std::move(runtime)) {}

std::unique_ptr<ExternalModelBackend> ExternalModelBackend::load(const ExternalModelSpec& spec,
                                                                 const RuntimeFactory& factory) {
  if (!std::filesystem::is_regular_file(spec.model_path))
    throw Error(ErrorKind::kLoad, "model file not found: " + spec.model_path.string());
  ModelSidecar sidecar = read_sidecar(sidecar_path_for(spec.model_path));

  const auto in_expected = expected_input_shape(sidecar.input_layout, spec.input_size);
  if (sidecar.input_shape != in_expected)
    throw Error(ErrorKind::kLoad, "model input shape " + shape_string(sidecar.input_shape) +
                                      " does not match expected " + shape_string(in_expected) +
                                      " for layout " + sidecar.input_layout);
  const auto out_expected = expected_output_shape(sidecar.output_layout, spec.expected_shape);
  if (sidecar.output_shape != out_expected)
    throw Error(ErrorKind::kLoad, "model output shape " + shape_string(sidecar.output_shape) +
                                      " does not match expected " + shape_string(out_expected) +
                                      " for layout " + sidecar.output_layout);
  if (!factory) throw Error(ErrorKind::kUnavailable, "no inference runtime available");
  auto runtime = factory(spec.model_path, sidecar);
  if (!runtime) throw Error(ErrorKind::kLoad, "runtime factory returned no runtime");
  return std::unique_ptr<ExternalModelBackend>(
      new ExternalModelBackend(spec, std::move(sidecar), std::move(runtime)));
}

EmbeddingGrid ExternalModelBackend::embed_image(const cwt::Image& image) const {
  const std::size_t s = spec_.input_size;
  const cwt::Image sized =
      (image.height == s && image.width == s) ? image : cwt::resize_bilinear(image, s, s);
  const auto input = to_input_tensor(sized, sidecar_.input_layout);
  const auto output = runtime_->run(input, sidecar_.input_shape);

  const auto [h, w, c] = spec_.expected_shape;
  if (h != w) throw Error(ErrorKind::kShapeMismatch, "external embeddings must be square grids");
  if (output.size() != h * w * c)
    throw Error(ErrorKind::kShapeMismatch, "model produced " + std::to_string(output.size()) +
                                               " values, expected " + std::to_string(h * w * c));
  EmbeddingGrid grid(h, c);
  if (sidecar_.output_layout == "NHWC") {
    for (std::size_t i = 0; i < output.size(); ++i) grid.values[i] = output[i];
  } else {
    for (std::size_t k = 0; k < c; ++k)
      for (std::size_t p = 0; p < h * w; ++p) grid.values[p * c + k] = output[k * h * w + p];
  }
  if (!grid.all_finite()) throw Error(ErrorKind::kShapeMismatch, "model produced non-finite values");
  return grid;
}

EmbeddingGrid ExternalModelBackend::embed(const cwt::Scalogram& scalogram) const {
  return embed_image(cwt::to_image(scalogram, spec_.input_size, spec_.input_size));
}

std::string ExternalModelBackend::describe() const {
  return "external(" + spec_.model_path.filename().string() + ")";
}

EmbeddingGrid external_embed(const cwt::Image& image, const ExternalModelBackend& backend) {
  return backend.embed_image(image);
}

cwt::Image reference_test_image(std::size_t size) {
  if (size < 2) throw Error(ErrorKind::kInvalidArgument, "test image needs size >= 2");
  cwt::Image img{size, size, std::vector<double>(size * size)};
  const double denom = 2.0 * static_cast<double>(size - 1);
  for (std::size_t r = 0; r < size; ++r)
    for (std::size_t c = 0; c < size; ++c)
      img.pixels[r * size + c] = static_cast<double>(r + c) / denom;
  return img;
}

EmbeddingChecksum checksum(const EmbeddingGrid& grid) {
  EmbeddingChecksum out;
  std::vector<std::byte> bytes;
  bytes.reserve(grid.values.size() * 4);
  double sq = 0.0;
  for (double v : grid.values) {
    out.sum += v;
    sq += v * v;
    auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int b = 0; b < 4; ++b) bytes.push_back(static_cast<std::byte>((bits >> (8 * b)) & 0xFF));
  }
  out.l2 = std::sqrt(sq);
  out.sha256_float32 = sha256_hex(bytes);
  return out;
}

bool verify_test_image(const ExternalModelBackend& backend, double rel_tol) {
  const auto& sc = backend.sidecar();
  if (!sc.has_test_image) throw Error(ErrorKind::kLoad, "sidecar carries no test_image reference");
  const auto got = checksum(backend.embed_image(reference_test_image()));
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({std::abs(a), std::abs(b), 1e-12});
  };
  return close(got.sum, sc.test_embedding_sum) && close(got.l2, sc.test_embedding_l2);
}

}  // namespace echopad::embed
