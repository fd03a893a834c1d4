// include/echopad/pipeline.hpp

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

#include <memory>
#include <optional>
#include <string>

#include "echopad/cwt.hpp"
#include "echopad/dsp.hpp"
#include "echopad/embed.hpp"
#include "echopad/signal.hpp"
#include "echopad/waveform.hpp"

namespace echopad::pipeline {

struct PipelineConfig {
  signal::PulseSpec pulse;
  signal::SessionSchedule schedule;
  bool background_subtraction = true;
  dsp::SubtractionMode subtraction_mode = dsp::SubtractionMode::kTimeDomain;
  // The CWT runs on the matched-filter output by default; false feeds it the
  // clean echo segment instead.
  bool cwt_on_compressed = true;
  cwt::MorseParams morse;
  embed::EmbedBackendSpec backend = embed::GridPoolSpec{};
};

struct Intermediates {
  Waveform clean;
  dsp::CompressedSignal compressed;
  cwt::Scalogram scalogram;
  embed::EmbeddingGrid grid;
};

// segment -> subtract -> matched filter -> CWT -> embed, with the matched
// filter, filter bank and backend built once. Thread-safe after construction.
class FeatureExtractor {
 public:
  explicit FeatureExtractor(PipelineConfig config,
                            const embed::RuntimeFactory& factory = embed::default_runtime_factory());

  embed::EmbeddingGrid embed(const Waveform& capture) const;
  Intermediates process(const Waveform& capture) const;

  // Embeddings of one capture with and without background subtraction,
  // sharing the segmentation.
  std::pair<embed::EmbeddingGrid, embed::EmbeddingGrid> embed_both(const Waveform& capture) const;

  const PipelineConfig& config() const noexcept { return config_; }
  const embed::EmbedBackend& backend() const noexcept { return *backend_; }

 private:
  Intermediates run(const signal::CaptureSegments& segments, bool subtract, bool keep) const;

  PipelineConfig config_;
  Waveform pulse_;
  std::size_t echo_len_ = 0;
  std::unique_ptr<dsp::MatchedFilter> matched_;
  std::size_t cwt_len_ = 0;
  std::size_t cwt_padded_len_ = 0;
  cwt::FilterBank bank_;
  std::unique_ptr<embed::EmbedBackend> backend_;
};

}  // namespace echopad::pipeline
