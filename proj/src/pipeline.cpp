// src/pipeline.cpp

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

#include "echopad/pipeline.hpp"

#include <algorithm>

#include "echopad/error.hpp"
#include "echopad/fft.hpp"

namespace echopad::pipeline {
namespace {

signal::CaptureSegments segment(const Waveform& capture, const PipelineConfig& config) {
  if (capture.sample_rate_hz != config.pulse.sample_rate_hz)
    throw Error(ErrorKind::kInvalidArgument, "capture sample rate " + std::to_string(capture.sample_rate_hz) +
                                                 " Hz does not match the pipeline rate " +
                                                 std::to_string(config.pulse.sample_rate_hz) + " Hz");
  return signal::segment_capture(capture, config.schedule);
}

}  // namespace

FeatureExtractor::FeatureExtractor(PipelineConfig config, const embed::RuntimeFactory& factory)
    : config_(std::move(config)) {
  signal::validate(config_.pulse);
  signal::validate(config_.schedule);
  pulse_ = signal::synth_pulse(config_.pulse);
  if (pulse_.empty()) throw Error(ErrorKind::kInvalidSpec, "pulse duration must be positive");
  const auto bounds = signal::session_boundaries(config_.schedule, config_.pulse.sample_rate_hz);
  echo_len_ = bounds.receive.size();
  if (echo_len_ == 0) throw Error(ErrorKind::kInvalidSpec, "receive window is empty");
  matched_ = std::make_unique<dsp::MatchedFilter>(pulse_, echo_len_);
  cwt_len_ = config_.cwt_on_compressed ? matched_->output_len() : echo_len_;
  cwt_padded_len_ = fft::next_fast_size(cwt_len_);
  bank_ = cwt::design_filterbank(config_.morse, config_.pulse.sample_rate_hz, cwt_padded_len_);
  backend_ = embed::make_backend(config_.backend, factory);
}

Intermediates FeatureExtractor::run(const signal::CaptureSegments& seg, bool subtract, bool keep) const {
  Intermediates out;
  Waveform clean = subtract ? dsp::remove_background(seg.echoes, seg.background, config_.subtraction_mode)
                            : seg.echoes;
  out.compressed = matched_->apply(clean);

  const std::vector<double>& source = config_.cwt_on_compressed ? out.compressed.values : clean.samples;
  std::vector<double> padded(cwt_padded_len_, 0.0);
  std::copy(source.begin(), source.end(), padded.begin());
  out.scalogram = cwt::transform(padded, bank_, cwt_len_);
  const cwt::Scalogram& s = out.scalogram;
  out.grid = backend_->embed(s);
  if (keep) {
    out.clean = std::move(clean);
  } else {
    out.compressed.values.clear();
    out.compressed.values.shrink_to_fit();
    out.scalogram = cwt::Scalogram{};
  }
  return out;
}

embed::EmbeddingGrid FeatureExtractor::embed(const Waveform& capture) const {
  const auto seg = segment(capture, config_);
  return run(seg, config_.background_subtraction, false).grid;
}

Intermediates FeatureExtractor::process(const Waveform& capture) const {
  const auto seg = segment(capture, config_);
  return run(seg, config_.background_subtraction, true);
}

std::pair<embed::EmbeddingGrid, embed::EmbeddingGrid> FeatureExtractor::embed_both(
    const Waveform& capture) const {
  const auto seg = segment(capture, config_);
  return {run(seg, true, false).grid, run(seg, false, false).grid};
}

}  // namespace echopad::pipeline
