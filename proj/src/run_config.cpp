// src/run_config.cpp

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

#include "echopad/run_config.hpp"

#include <charconv>
#include <sstream>

#include "echopad/error.hpp"
#include "echopad/hash.hpp"

namespace echopad {
namespace {

std::string fmt(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& items) {
  std::string out;
  for (const auto& it : items) {
    if (!out.empty()) out += ", ";
    if constexpr (std::is_same_v<T, std::string>) out += it;
    else out += std::string(embed::to_string(it));
  }
  return out;
}

std::size_t get_size(const KvConfig& c, const std::string& key, std::size_t fallback) {
  const long long v = c.get_int(key, static_cast<long long>(fallback));
  if (v < 0) throw Error(ErrorKind::kInvalidArgument, key + " must be non-negative");
  return static_cast<std::size_t>(v);
}

}  // namespace

RunConfig RunConfig::resolve(const KvConfig& file, const KvConfig& overrides) {
  const KvConfig known = RunConfig{}.to_kv();
  KvConfig merged;
  for (const KvConfig* src : {&file, &overrides})
    for (const auto& [k, v] : src->entries()) {
      if (!known.contains(k)) throw Error(ErrorKind::kInvalidArgument, "unknown config key '" + k + "'");
      merged.set(k, v);
    }

  RunConfig r;
  const KvConfig& c = merged;
  r.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<long long>(r.seed)));
  r.pulse.sample_rate_hz = static_cast<int>(c.get_int("pulse.sample_rate_hz", r.pulse.sample_rate_hz));
  r.pulse.carrier_hz = c.get_double("pulse.carrier_hz", r.pulse.carrier_hz);
  r.pulse.duration_s = c.get_double("pulse.duration_s", r.pulse.duration_s);
  r.pulse.amplitude = c.get_double("pulse.amplitude", r.pulse.amplitude);
  r.schedule.background_s = c.get_double("schedule.background_s", r.schedule.background_s);
  r.schedule.pulse_s = c.get_double("schedule.pulse_s", r.schedule.pulse_s);
  r.schedule.idle_s = c.get_double("schedule.idle_s", r.schedule.idle_s);
  r.schedule.receive_s = c.get_double("schedule.receive_s", r.schedule.receive_s);
  r.background_subtraction = c.get_bool("dsp.background_subtraction", r.background_subtraction);
  const auto mode = c.get_string("dsp.subtraction_mode", "time");
  if (mode == "time") r.subtraction_mode = dsp::SubtractionMode::kTimeDomain;
  else if (mode == "spectral") r.subtraction_mode = dsp::SubtractionMode::kSpectralMagnitude;
  else throw Error(ErrorKind::kInvalidArgument, "dsp.subtraction_mode must be time or spectral");
  r.morse.gamma = c.get_double("cwt.gamma", r.morse.gamma);
  r.morse.time_bandwidth = c.get_double("cwt.time_bandwidth", r.morse.time_bandwidth);
  r.morse.num_filters = static_cast<int>(c.get_int("cwt.num_filters", r.morse.num_filters));
  r.morse.top_passband_hz = c.get_double("cwt.top_passband_hz", r.morse.top_passband_hz);
  r.morse.min_center_hz = c.get_double("cwt.min_center_hz", r.morse.min_center_hz);
  const auto input = c.get_string("cwt.input", "compressed");
  if (input != "compressed" && input != "clean")
    throw Error(ErrorKind::kInvalidArgument, "cwt.input must be compressed or clean");
  r.cwt_on_compressed = input == "compressed";
  r.backend = c.get_string("embed.backend", r.backend);
  if (r.backend != "grid_pool" && r.backend != "external_model")
    throw Error(ErrorKind::kInvalidArgument, "embed.backend must be grid_pool or external_model");
  r.grid = get_size(c, "embed.grid", r.grid);
  if (c.contains("embed.stats")) {
    r.stats.clear();
    for (const auto& s : split_list(*c.get("embed.stats"))) r.stats.push_back(embed::parse_stat(s));
  }
  r.dynamic_range_db = c.get_double("embed.dynamic_range_db", r.dynamic_range_db);
  r.model_path = c.get_string("embed.model_path", r.model_path);
  r.input_size = get_size(c, "embed.input_size", r.input_size);
  r.svm.c_reg = c.get_double("svm.c_reg", r.svm.c_reg);
  r.svm.tolerance = c.get_double("svm.tolerance", r.svm.tolerance);
  r.svm.max_epochs = static_cast<int>(c.get_int("svm.max_epochs", r.svm.max_epochs));
  r.train_subjects = get_size(c, "protocol.train_subjects", r.train_subjects);
  r.test_subjects = get_size(c, "protocol.test_subjects", r.test_subjects);
  r.masks_per_split = get_size(c, "protocol.masks_per_split", r.masks_per_split);
  if (c.contains("protocol.pai_order")) r.pai_order = split_list(*c.get("protocol.pai_order"));
  r.noise_kind = echosim::parse_noise_kind(c.get_string("sim.noise_kind", "white"));
  r.noise_db = c.get_double("sim.noise_db", r.noise_db);
  r.distance_min_m = c.get_double("sim.distance_min_m", r.distance_min_m);
  r.distance_max_m = c.get_double("sim.distance_max_m", r.distance_max_m);
  r.materials = c.get_string("sim.materials", r.materials);

  signal::validate(r.pulse);
  signal::validate(r.schedule);
  cwt::validate(r.morse, r.pulse.sample_rate_hz);
  if (r.svm.max_epochs < 1 || !(r.svm.c_reg > 0.0) || !(r.svm.tolerance > 0.0))
    throw Error(ErrorKind::kInvalidSpec, "SVM parameters must be positive");
  if (r.backend == "external_model" && r.model_path.empty())
    throw Error(ErrorKind::kInvalidSpec, "external_model backend needs embed.model_path");
  return r;
}

KvConfig RunConfig::to_kv() const {
  KvConfig c;
  c.set("seed", std::to_string(seed));
  c.set("pulse.sample_rate_hz", std::to_string(pulse.sample_rate_hz));
  c.set("pulse.carrier_hz", fmt(pulse.carrier_hz));
  c.set("pulse.duration_s", fmt(pulse.duration_s));
  c.set("pulse.amplitude", fmt(pulse.amplitude));
  c.set("schedule.background_s", fmt(schedule.background_s));
  c.set("schedule.pulse_s", fmt(schedule.pulse_s));
  c.set("schedule.idle_s", fmt(schedule.idle_s));
  c.set("schedule.receive_s", fmt(schedule.receive_s));
  c.set("dsp.background_subtraction", background_subtraction ? "true" : "false");
  c.set("dsp.subtraction_mode", subtraction_mode == dsp::SubtractionMode::kTimeDomain ? "time" : "spectral");
  c.set("cwt.gamma", fmt(morse.gamma));
  c.set("cwt.time_bandwidth", fmt(morse.time_bandwidth));
  c.set("cwt.num_filters", std::to_string(morse.num_filters));
  c.set("cwt.top_passband_hz", fmt(morse.top_passband_hz));
  c.set("cwt.min_center_hz", fmt(morse.min_center_hz));
  c.set("cwt.input", cwt_on_compressed ? "compressed" : "clean");
  c.set("embed.backend", backend);
  c.set("embed.grid", std::to_string(grid));
  c.set("embed.stats", join(stats));
  c.set("embed.dynamic_range_db", fmt(dynamic_range_db));
  c.set("embed.model_path", model_path);
  c.set("embed.input_size", std::to_string(input_size));
  c.set("svm.c_reg", fmt(svm.c_reg));
  c.set("svm.tolerance", fmt(svm.tolerance));
  c.set("svm.max_epochs", std::to_string(svm.max_epochs));
  c.set("protocol.train_subjects", std::to_string(train_subjects));
  c.set("protocol.test_subjects", std::to_string(test_subjects));
  c.set("protocol.masks_per_split", std::to_string(masks_per_split));
  c.set("protocol.pai_order", join(pai_order));
  c.set("sim.noise_kind", std::string(echosim::to_string(noise_kind)));
  c.set("sim.noise_db", fmt(noise_db));
  c.set("sim.distance_min_m", fmt(distance_min_m));
  c.set("sim.distance_max_m", fmt(distance_max_m));
  c.set("sim.materials", materials);
  return c;
}

std::string RunConfig::hash() const { return sha256_hex(to_kv().serialize()); }

nlohmann::json RunConfig::provenance() const {
  return {{"config", to_kv().entries()}, {"config_sha256", hash()}};
}

pipeline::PipelineConfig RunConfig::pipeline_config() const {
  pipeline::PipelineConfig p;
  p.pulse = pulse;
  p.schedule = schedule;
  p.background_subtraction = background_subtraction;
  p.subtraction_mode = subtraction_mode;
  p.cwt_on_compressed = cwt_on_compressed;
  p.morse = morse;
  if (backend == "grid_pool") {
    p.backend = embed::GridPoolSpec{grid, stats, dynamic_range_db};
  } else {
    embed::ExternalModelSpec ext;
    ext.model_path = model_path;
    ext.input_size = input_size;
    p.backend = ext;
  }
  return p;
}

protocol::ProtocolSpec RunConfig::protocol_spec() const {
  protocol::ProtocolSpec s;
  s.train_subject_count = train_subjects;
  s.test_subject_count = test_subjects;
  s.silicone_masks_per_split = masks_per_split;
  s.pai_order = pai_order;
  s.pipeline = pipeline_config();
  s.svm = svm;
  s.seed = seed;
  return s;
}

echosim::MaterialLibrary RunConfig::material_library() const {
  if (materials == "builtin") return echosim::MaterialLibrary::defaults();
  return echosim::MaterialLibrary::load(materials, static_cast<std::size_t>(morse.num_filters));
}

}  // namespace echopad
