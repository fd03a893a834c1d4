// include/echopad/run_config.hpp

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
#include <string>
#include <vector>

#include <json.hpp>

#include "echopad/echosim.hpp"
#include "echopad/ensemble.hpp"
#include "echopad/kv_config.hpp"
#include "echopad/pipeline.hpp"
#include "echopad/protocol.hpp"

namespace echopad {

// Every tunable default in one place. Keys (KvConfig text format):
//
//   seed
//   pulse.sample_rate_hz  pulse.carrier_hz  pulse.duration_s  pulse.amplitude
//   schedule.background_s  schedule.pulse_s  schedule.idle_s  schedule.receive_s
//   dsp.background_subtraction (bool)  dsp.subtraction_mode (time | spectral)
//   cwt.gamma  cwt.time_bandwidth  cwt.num_filters  cwt.top_passband_hz
//   cwt.min_center_hz  cwt.input (compressed | clean)
//   embed.backend (grid_pool | external_model)  embed.grid  embed.stats
//   embed.dynamic_range_db  embed.model_path  embed.input_size
//   svm.c_reg  svm.tolerance  svm.max_epochs
//   protocol.train_subjects  protocol.test_subjects  protocol.masks_per_split
//   protocol.pai_order
//   sim.noise_kind  sim.noise_db  sim.distance_min_m  sim.distance_max_m
//   sim.materials (path, or "builtin")
struct RunConfig {
  std::uint64_t seed = 42;
  signal::PulseSpec pulse;
  signal::SessionSchedule schedule;
  bool background_subtraction = true;
  dsp::SubtractionMode subtraction_mode = dsp::SubtractionMode::kTimeDomain;
  cwt::MorseParams morse;
  bool cwt_on_compressed = true;
  std::string backend = "grid_pool";
  std::size_t grid = 7;
  std::vector<embed::CellStat> stats = embed::default_stats();
  double dynamic_range_db = cwt::kDefaultDynamicRangeDb;
  std::string model_path;
  std::size_t input_size = 224;
  ensemble::SvmParams svm;
  std::size_t train_subjects = 25;
  std::size_t test_subjects = 10;
  std::size_t masks_per_split = 2;
  std::vector<std::string> pai_order{"display", "print_matte", "print_glossy", "silicone"};
  echosim::NoiseKind noise_kind = echosim::NoiseKind::kWhite;
  double noise_db = -25.0;
  double distance_min_m = 0.30;
  double distance_max_m = 0.45;
  std::string materials = "builtin";

  // Starts from the defaults, applies `file`, then `overrides`. Unknown keys
  // are an error.
  static RunConfig resolve(const KvConfig& file, const KvConfig& overrides = KvConfig{});

  KvConfig to_kv() const;
  std::string hash() const;  // SHA-256 of to_kv().serialize()
  nlohmann::json provenance() const;

  pipeline::PipelineConfig pipeline_config() const;
  protocol::ProtocolSpec protocol_spec() const;
  echosim::MaterialLibrary material_library() const;
};

}  // namespace echopad
