// include/echopad/echosim.hpp

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
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "echopad/cwt.hpp"
#include "echopad/kv_config.hpp"
#include "echopad/manifest.hpp"
#include "echopad/signal.hpp"
#include "echopad/waveform.hpp"

namespace echopad::echosim {

constexpr double kSpeedOfSound = 343.0;

// Material names in protocol order: bona fide first, then Attack 1..4.
inline constexpr std::string_view kBonaFideMaterial = "bonafide";
const std::vector<std::string>& material_names();
const std::vector<std::string>& pai_types();

// Reflection model of one presentation material. None of these numbers are
// measurements; they are tuned so the reference pipeline separates classes.
struct MaterialProfile {
  std::string name;
  std::vector<double> band_gains;  // one per CWT band, in [0, 1], highest band first
  double diffuse_decay = 0.0;      // tail decay constant, 1/s
  double diffuse_ratio = 0.0;      // tail level relative to the specular echo
  double gain_jitter = 0.0;        // relative std-dev of echo gain, per subject and per sample
  double diffuse_jitter = 0.0;     // relative std-dev of tail ratio and decay, same draws

  bool operator==(const MaterialProfile&) const = default;
};

void validate(const MaterialProfile& profile, std::size_t num_bands);

// Versioned profile set. File format (key-value, see KvConfig):
//
//   materials.format = echopad-materials
//   materials.version = 1
//   material.<name>.band_gains = g0, g1, ..., g9
//   material.<name>.diffuse_decay = 2.0
//   material.<name>.diffuse_ratio = 1.0
//   material.<name>.gain_jitter = 0.1
//   material.<name>.diffuse_jitter = 0.1
class MaterialLibrary {
 public:
  static constexpr int kVersion = 1;

  // Compiled-in defaults; identical to data/materials_v1.conf.
  static MaterialLibrary defaults();
  static MaterialLibrary from_config(const KvConfig& config, std::size_t num_bands = 10);
  static MaterialLibrary load(const std::filesystem::path& path, std::size_t num_bands = 10);

  KvConfig to_config() const;
  void add(MaterialProfile profile);
  const MaterialProfile& get(const std::string& name) const;
  bool contains(const std::string& name) const { return profiles_.count(name) != 0; }
  const std::map<std::string, MaterialProfile>& profiles() const noexcept { return profiles_; }

 private:
  std::map<std::string, MaterialProfile> profiles_;
};

enum class NoiseKind { kWhite, kStationaryTone, kBabble };
std::string_view to_string(NoiseKind kind) noexcept;
NoiseKind parse_noise_kind(const std::string& name);

struct SceneSpec {
  std::int64_t subject_id = 0;
  std::string material = std::string(kBonaFideMaterial);
  double distance_m = 0.30;
  double noise_db = -25.0;  // relative to the transmit pulse RMS; -inf disables noise
  NoiseKind noise_kind = NoiseKind::kWhite;
  std::uint64_t seed = 0;
};

void validate(const SceneSpec& scene);

// Echo onset inside the receive window, in samples.
std::size_t echo_delay_samples(double distance_m, int sample_rate_hz);

// Gain of the 10-band material equalizer at a frequency: a Morse-weighted
// blend of the band gains, using the CWT band shapes with unit peak.
double equalizer_response(const MaterialProfile& profile, const cwt::MorseParams& params, double freq_hz);

// Simulates full session captures:
//   capture = noise everywhere
//           + in the receive window, from onset tau = round(2 d / c * fs):
//             a * eq[m] * (1 + r * exp(-k * m / fs)),  m = n - tau
// where eq is the pulse filtered by the material equalizer, a the specular
// level (falls off as 0.3 / d, jittered per subject and per sample), and r, k
// the jittered tail ratio and decay. Immutable after construction.
class SessionSimulator {
 public:
  SessionSimulator(signal::PulseSpec pulse, signal::SessionSchedule schedule,
                   MaterialLibrary library = MaterialLibrary::defaults(),
                   cwt::MorseParams morse = cwt::MorseParams{});

  Waveform simulate(const SceneSpec& scene) const;

  const signal::PulseSpec& pulse_spec() const noexcept { return pulse_spec_; }
  const signal::SessionSchedule& schedule() const noexcept { return schedule_; }
  const MaterialLibrary& library() const noexcept { return library_; }
  const Waveform& pulse() const noexcept { return pulse_; }

 private:
  signal::PulseSpec pulse_spec_;
  signal::SessionSchedule schedule_;
  MaterialLibrary library_;
  cwt::MorseParams morse_;
  signal::SessionBoundaries bounds_;
  Waveform pulse_;
  std::map<std::string, std::vector<double>> equalized_;
};

Waveform simulate_session(const Waveform& pulse, const signal::SessionSchedule& schedule,
                          const SceneSpec& scene);

// Additive background noise for a whole capture. Stationary-tone components
// sit on the grid rate / offset Hz (offset = receive start - background
// start), so they repeat exactly between the two windows.
std::vector<double> make_noise(NoiseKind kind, double rms, std::size_t length, int sample_rate_hz,
                               std::size_t period_offset, std::uint64_t seed);

// Subject identities: 1..total, split into train / test by a seeded shuffle.
// Silicone masks are worn by the first masks_per_split subjects of each split.
struct SubjectAssignment {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> test;
  std::vector<std::int64_t> mask_train;
  std::vector<std::int64_t> mask_test;
};

SubjectAssignment assign_subjects(std::span<const std::int64_t> subject_ids, std::size_t train_count,
                                  std::size_t test_count, std::size_t masks_per_split, std::uint64_t seed);
SubjectAssignment assign_subjects(std::size_t total, std::size_t train_count, std::size_t test_count,
                                  std::size_t masks_per_split, std::uint64_t seed);

struct ClassCounts {
  std::string material;
  std::size_t train = 0;
  std::size_t test = 0;
};

// 4807 sessions: bona fide 1003/430, display 849/385, print_matte 350/150,
// print_glossy 350/150, silicone 798/342.
std::vector<ClassCounts> reference_counts();

struct DatasetRequest {
  std::vector<ClassCounts> counts = reference_counts();
  SubjectAssignment subjects;
  double distance_min_m = 0.30;
  double distance_max_m = 0.45;
  NoiseKind noise_kind = NoiseKind::kWhite;
  double noise_db = -25.0;
  std::uint64_t seed = 42;
};

// Default request: reference class counts, 25/10 subjects with 2/2 masks, seed 42.
DatasetRequest default_request(std::uint64_t seed = 42);

struct PlannedSample {
  ManifestEntry entry;  // path relative to the dataset root
  SceneSpec scene;
};

// Entries ordered by split (train, test), then class order, then index.
std::vector<PlannedSample> plan_dataset(const DatasetRequest& request);

// Writes one float32 WAV per sample and out_dir/manifest.jsonl.
std::vector<ManifestEntry> generate_dataset(const std::vector<PlannedSample>& plan,
                                            const SessionSimulator& simulator,
                                            const std::filesystem::path& out_dir);

}  // namespace echopad::echosim
