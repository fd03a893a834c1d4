// src/echosim.cpp

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

#include "echopad/echosim.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "echopad/error.hpp"
#include "echopad/fft.hpp"
#include "echopad/parallel.hpp"
#include "echopad/random.hpp"
#include "echopad/wav_io.hpp"

namespace echopad::echosim {
namespace {

constexpr const char* kMaterialsFormat = "echopad-materials";
// Specular echo level at the 0.30 m reference distance, before band gains.
constexpr double kReflectLevel = 0.25;
constexpr double kReferenceDistance = 0.30;
constexpr std::uint64_t kSubjectStream = 0x5b;
constexpr std::uint64_t kSubjectJitterStream = 0x7a;

MaterialProfile profile(std::string name, std::vector<double> gains, double decay, double ratio,
                        double gain_jitter, double diffuse_jitter) {
  return {std::move(name), std::move(gains), decay, ratio, gain_jitter, diffuse_jitter};
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  return os.str();
}

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

// Relative jitter factor, kept positive.
double jitter(std::mt19937_64& rng, double rel_std) {
  if (rel_std <= 0.0) return 1.0;
  std::normal_distribution<double> nd(0.0, rel_std);
  return std::max(0.05, 1.0 + nd(rng));
}

double sin_on_grid(std::uint64_t k, std::uint64_t n, std::uint64_t phase, std::uint64_t period) {
  const std::uint64_t idx = (k % period * (n % period) + phase) % period;
  return std::sin(2.0 * std::numbers::pi * static_cast<double>(idx) / static_cast<double>(period));
}

}  // namespace

const std::vector<std::string>& material_names() {
  static const std::vector<std::string> names{"bonafide", "display", "print_matte", "print_glossy",
                                              "silicone"};
  return names;
}

const std::vector<std::string>& pai_types() {
  static const std::vector<std::string> types{"display", "print_matte", "print_glossy", "silicone"};
  return types;
}

void validate(const MaterialProfile& p, std::size_t num_bands) {
  if (p.name.empty()) throw Error(ErrorKind::kInvalidSpec, "material profile without a name");
  if (p.band_gains.size() != num_bands)
    throw Error(ErrorKind::kInvalidSpec, "material '" + p.name + "' has " +
                                             std::to_string(p.band_gains.size()) + " band gains, expected " +
                                             std::to_string(num_bands));
  for (double g : p.band_gains)
    if (!(g >= 0.0 && g <= 1.0))
      throw Error(ErrorKind::kInvalidSpec, "material '" + p.name + "' band gain outside [0, 1]");
  if (!(p.diffuse_decay >= 0.0) || !(p.diffuse_ratio >= 0.0) || !(p.gain_jitter >= 0.0) ||
      !(p.diffuse_jitter >= 0.0))
    throw Error(ErrorKind::kInvalidSpec, "material '" + p.name + "' has a negative tail or jitter value");
}

MaterialLibrary MaterialLibrary::defaults() {
  MaterialLibrary lib;
  lib.add(profile("bonafide", {0.95, 0.93, 0.90, 0.86, 0.82, 0.78, 0.74, 0.70, 0.66, 0.62}, 3.0, 3.0, 0.10, 0.15));
  lib.add(profile("display", {0.70, 0.70, 0.72, 0.74, 0.76, 0.78, 0.80, 0.82, 0.84, 0.86}, 20.0, 0.10, 0.10, 0.15));
  lib.add(profile("print_matte", {0.45, 0.46, 0.48, 0.50, 0.52, 0.52, 0.50, 0.48, 0.46, 0.44}, 8.0, 0.50, 0.10, 0.15));
  lib.add(profile("print_glossy", {0.66, 0.64, 0.62, 0.60, 0.58, 0.56, 0.54, 0.50, 0.46, 0.40}, 12.0, 0.30, 0.10, 0.15));
  lib.add(profile("silicone", {0.55, 0.56, 0.60, 0.66, 0.72, 0.76, 0.78, 0.80, 0.80, 0.80}, 4.0, 1.20, 0.10, 0.15));
  return lib;
}

MaterialLibrary MaterialLibrary::from_config(const KvConfig& config, std::size_t num_bands) {
  if (config.get_string("materials.format", "") != kMaterialsFormat)
    throw Error(ErrorKind::kFormat, std::string("material file must set materials.format = ") + kMaterialsFormat);
  if (config.get_int("materials.version", 0) != kVersion)
    throw Error(ErrorKind::kFormat, "unsupported materials.version");
  std::set<std::string> names;
  for (const auto& [key, value] : config.entries()) {
    if (key.rfind("material.", 0) != 0) continue;
    const auto dot = key.find('.', 9);
    if (dot == std::string::npos) throw Error(ErrorKind::kFormat, "bad material key '" + key + "'");
    names.insert(key.substr(9, dot - 9));
  }
  MaterialLibrary lib;
  for (const auto& name : names) {
    const std::string prefix = "material." + name + ".";
    for (const char* field : {"band_gains", "diffuse_decay", "diffuse_ratio"})
      if (!config.contains(prefix + field))
        throw Error(ErrorKind::kFormat, "material '" + name + "' is missing " + field);
    MaterialProfile p;
    p.name = name;
    p.band_gains = config.get_doubles(prefix + "band_gains");
    p.diffuse_decay = config.get_double(prefix + "diffuse_decay", 0.0);
    p.diffuse_ratio = config.get_double(prefix + "diffuse_ratio", 0.0);
    p.gain_jitter = config.get_double(prefix + "gain_jitter", 0.0);
    p.diffuse_jitter = config.get_double(prefix + "diffuse_jitter", 0.0);
    validate(p, num_bands);
    lib.add(std::move(p));
  }
  return lib;
}

MaterialLibrary MaterialLibrary::load(const std::filesystem::path& path, std::size_t num_bands) {
  return from_config(KvConfig::load(path), num_bands);
}

KvConfig MaterialLibrary::to_config() const {
  KvConfig c;
  c.set("materials.format", kMaterialsFormat);
  c.set("materials.version", std::to_string(kVersion));
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  };
  for (const auto& [name, p] : profiles_) {
    const std::string prefix = "material." + name + ".";
    c.set(prefix + "band_gains", join(p.band_gains));
    c.set(prefix + "diffuse_decay", num(p.diffuse_decay));
    c.set(prefix + "diffuse_ratio", num(p.diffuse_ratio));
    c.set(prefix + "gain_jitter", num(p.gain_jitter));
    c.set(prefix + "diffuse_jitter", num(p.diffuse_jitter));
  }
  return c;
}

void MaterialLibrary::add(MaterialProfile p) {
  validate(p, p.band_gains.size());
  const std::string name = p.name;
  profiles_[name] = std::move(p);
}

const MaterialProfile& MaterialLibrary::get(const std::string& name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) throw Error(ErrorKind::kInvalidArgument, "unknown material '" + name + "'");
  return it->second;
}

std::string_view to_string(NoiseKind kind) noexcept {
  switch (kind) {
    case NoiseKind::kWhite: return "white";
    case NoiseKind::kStationaryTone: return "stationary_tone";
    case NoiseKind::kBabble: return "babble";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(const std::string& name) {
  for (NoiseKind k : {NoiseKind::kWhite, NoiseKind::kStationaryTone, NoiseKind::kBabble})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::kInvalidArgument, "unknown noise kind '" + name + "'");
}

void validate(const SceneSpec& s) {
  if (!(s.distance_m >= 0.1 && s.distance_m <= 1.0))
    throw Error(ErrorKind::kInvalidSpec, "distance must lie in [0.1, 1.0] m");
  if (std::isnan(s.noise_db) || s.noise_db == std::numeric_limits<double>::infinity())
    throw Error(ErrorKind::kInvalidSpec, "noise level must be finite or -inf");
}

std::size_t echo_delay_samples(double distance_m, int sample_rate_hz) {
  return static_cast<std::size_t>(std::llround(2.0 * distance_m / kSpeedOfSound * sample_rate_hz));
}

double equalizer_response(const MaterialProfile& p, const cwt::MorseParams& params, double freq_hz) {
  const auto centers = cwt::center_frequencies(params);
  if (p.band_gains.size() != centers.size())
    throw Error(ErrorKind::kInvalidSpec, "band gain count does not match filter count");
  const double beta = params.beta();
  const double wp = cwt::morse_peak_frequency(beta, params.gamma);
  std::vector<double> omegas(centers.size());
  for (std::size_t k = 0; k < centers.size(); ++k) omegas[k] = wp * freq_hz / centers[k];
  const auto weights = cwt::morse_spectrum(beta, params.gamma, omegas);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    num += p.band_gains[k] * weights[k];
    den += weights[k];
  }
  if (den > 1e-12) return num / den;
  // Far outside every band: use the nearest edge band.
  return freq_hz >= centers.front() ? p.band_gains.front() : p.band_gains.back();
}

SessionSimulator::SessionSimulator(signal::PulseSpec pulse, signal::SessionSchedule schedule,
                                   MaterialLibrary library, cwt::MorseParams morse)
    : pulse_spec_(pulse), schedule_(schedule), library_(std::move(library)), morse_(morse) {
  signal::validate(pulse_spec_);
  signal::validate(schedule_);
  cwt::validate(morse_, pulse_spec_.sample_rate_hz);
  bounds_ = signal::session_boundaries(schedule_, pulse_spec_.sample_rate_hz);
  pulse_ = signal::synth_pulse(pulse_spec_);
  const std::size_t p = pulse_.size();
  if (p == 0) return;
  fft::RealFft fft(p);
  const auto spectrum = fft.forward(pulse_.samples);
  for (const auto& [name, profile] : library_.profiles()) {
    validate(profile, static_cast<std::size_t>(morse_.num_filters));
    auto shaped = spectrum;
    for (std::size_t bin = 0; bin < shaped.size(); ++bin) {
      const double f = static_cast<double>(bin) * pulse_spec_.sample_rate_hz / static_cast<double>(p);
      shaped[bin] *= equalizer_response(profile, morse_, f);
    }
    auto eq = fft.inverse(shaped);
    for (double& v : eq) v /= static_cast<double>(p);
    equalized_[name] = std::move(eq);
  }
}

Waveform SessionSimulator::simulate(const SceneSpec& scene) const {
  validate(scene);
  const MaterialProfile& mat = library_.get(scene.material);
  const int fs = pulse_spec_.sample_rate_hz;
  Waveform out{std::vector<double>(bounds_.total(), 0.0), fs};

  const double pulse_rms = pulse_spec_.amplitude / std::numbers::sqrt2;
  if (scene.noise_db != -std::numeric_limits<double>::infinity()) {
    const double rms = pulse_rms * std::pow(10.0, scene.noise_db / 20.0);
    const std::size_t offset = bounds_.receive.begin - bounds_.background.begin;
    const auto noise = make_noise(scene.noise_kind, rms, out.size(), fs, offset,
                                  derive_seed(scene.seed, {0x4e01}));
    for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += noise[i];
  }

  const auto& eq = equalized_.at(scene.material);
  if (eq.empty()) return out;

  // Subject-level draws depend only on (subject, material); sample-level on the scene seed.
  std::mt19937_64 subj_rng(derive_seed(kSubjectJitterStream,
                                       {static_cast<std::uint64_t>(scene.subject_id), name_hash(mat.name)}));
  std::mt19937_64 rng(derive_seed(scene.seed, {0xec40}));
  const double gain = jitter(subj_rng, mat.gain_jitter) * jitter(rng, mat.gain_jitter);
  const double ratio = mat.diffuse_ratio * jitter(subj_rng, mat.diffuse_jitter) * jitter(rng, mat.diffuse_jitter);
  const double decay = mat.diffuse_decay * jitter(subj_rng, mat.diffuse_jitter) * jitter(rng, mat.diffuse_jitter);
  const double level = kReflectLevel * (kReferenceDistance / scene.distance_m) * gain;

  const std::size_t tau = echo_delay_samples(scene.distance_m, fs);
  const std::size_t window = bounds_.receive.size();
  if (tau >= window) return out;
  const std::size_t len = std::min(eq.size(), window - tau);
  const double step = std::exp(-decay / fs);
  double tail = ratio;
  double* dst = out.samples.data() + bounds_.receive.begin + tau;
  for (std::size_t m = 0; m < len; ++m) {
    dst[m] += level * eq[m] * (1.0 + tail);
    tail *= step;
  }
  return out;
}

Waveform simulate_session(const Waveform& pulse, const signal::SessionSchedule& schedule,
                          const SceneSpec& scene) {
  signal::PulseSpec spec;
  spec.sample_rate_hz = pulse.sample_rate_hz;
  spec.duration_s = static_cast<double>(pulse.size()) / pulse.sample_rate_hz;
  double peak = 0.0;
  for (double v : pulse.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) spec.amplitude = std::min(1.0, peak);
  const SessionSimulator sim(spec, schedule);
  if (sim.pulse().samples.size() != pulse.size())
    throw Error(ErrorKind::kInvalidSpec, "pulse length does not match a whole-sample duration");
  return sim.simulate(scene);
}

std::vector<double> make_noise(NoiseKind kind, double rms, std::size_t length, int sample_rate_hz,
                               std::size_t period_offset, std::uint64_t seed) {
  std::vector<double> out(length, 0.0);
  if (length == 0 || rms <= 0.0) return out;
  std::mt19937_64 rng(seed);
  switch (kind) {
    case NoiseKind::kWhite: {
      std::normal_distribution<double> nd(0.0, rms);
      for (double& v : out) v = nd(rng);
      break;
    }
    case NoiseKind::kStationaryTone: {
      if (period_offset == 0)
        throw Error(ErrorKind::kInvalidSpec, "stationary tone noise needs a non-zero window offset");
      // Mains hum, its third harmonic and an interferer just below the carrier;
      // power shares sum to 1.
      struct Tone { double freq_hz, share; };
      constexpr Tone tones[] = {{50.0, 0.25}, {150.0, 0.10}, {20999.75, 0.65}};
      const double grid = static_cast<double>(sample_rate_hz) / static_cast<double>(period_offset);
      std::uniform_int_distribution<std::uint64_t> phase(0, period_offset - 1);
      for (const Tone& t : tones) {
        const auto k = static_cast<std::uint64_t>(std::max(1.0, std::round(t.freq_hz / grid)));
        const std::uint64_t p0 = phase(rng);
        const double amp = std::sqrt(2.0 * t.share) * rms;
        for (std::size_t n = 0; n < length; ++n) out[n] += amp * sin_on_grid(k, n, p0, period_offset);
      }
      break;
    }
    case NoiseKind::kBabble: {
      constexpr int kTalkers = 4, kHarmonics = 8;
      std::uniform_real_distribution<double> f0d(100.0, 220.0), amd(3.0, 6.0), ph(0.0, 2.0 * std::numbers::pi);
      for (int t = 0; t < kTalkers; ++t) {
        const double f0 = f0d(rng), fam = amd(rng);
        std::complex<double> am = std::polar(1.0, ph(rng));
        const std::complex<double> am_rot = std::polar(1.0, 2.0 * std::numbers::pi * fam / sample_rate_hz);
        std::vector<std::complex<double>> osc(kHarmonics), rot(kHarmonics);
        for (int h = 0; h < kHarmonics; ++h) {
          osc[h] = std::polar(1.0 / (h + 1), ph(rng));
          rot[h] = std::polar(1.0, 2.0 * std::numbers::pi * f0 * (h + 1) / sample_rate_hz);
        }
        for (std::size_t n = 0; n < length; ++n) {
          double v = 0.0;
          for (int h = 0; h < kHarmonics; ++h) {
            v += osc[h].imag();
            osc[h] *= rot[h];
          }
          out[n] += 0.5 * (1.0 + am.imag()) * v;
          am *= am_rot;
          if (n % 4096 == 4095) {
            // Renormalize so rounding does not drift the recursive oscillators.
            for (int h = 0; h < kHarmonics; ++h) osc[h] *= (1.0 / (h + 1)) / std::abs(osc[h]);
            am /= std::abs(am);
          }
        }
      }
      double power = 0.0;
      for (double v : out) power += v * v;
      power /= static_cast<double>(length);
      const double scale = power > 0.0 ? rms / std::sqrt(power) : 0.0;
      for (double& v : out) v *= scale;
      break;
    }
  }
  return out;
}

SubjectAssignment assign_subjects(std::span<const std::int64_t> subject_ids, std::size_t train_count,
                                  std::size_t test_count, std::size_t masks_per_split, std::uint64_t seed) {
  std::vector<std::int64_t> ids(subject_ids.begin(), subject_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.size() < train_count + test_count)
    throw Error(ErrorKind::kProtocol, "need " + std::to_string(train_count + test_count) +
                                          " distinct subjects, found " + std::to_string(ids.size()));
  if (masks_per_split > train_count || masks_per_split > test_count)
    throw Error(ErrorKind::kProtocol, "more silicone masks than subjects in a split");
  std::mt19937_64 rng(derive_seed(seed, {kSubjectStream}));
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (ids.size() - i));
    std::swap(ids[i], ids[j]);
  }
  SubjectAssignment a;
  a.train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(train_count));
  a.test.assign(ids.begin() + static_cast<std::ptrdiff_t>(train_count),
                ids.begin() + static_cast<std::ptrdiff_t>(train_count + test_count));
  std::sort(a.train.begin(), a.train.end());
  std::sort(a.test.begin(), a.test.end());
  // Masks go to the first subjects in shuffled order, so they vary with the seed.
  a.mask_train.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(masks_per_split));
  a.mask_test.assign(ids.begin() + static_cast<std::ptrdiff_t>(train_count),
                     ids.begin() + static_cast<std::ptrdiff_t>(train_count + masks_per_split));
  std::sort(a.mask_train.begin(), a.mask_train.end());
  std::sort(a.mask_test.begin(), a.mask_test.end());
  return a;
}

SubjectAssignment assign_subjects(std::size_t total, std::size_t train_count, std::size_t test_count,
                                  std::size_t masks_per_split, std::uint64_t seed) {
  std::vector<std::int64_t> ids(total);
  std::iota(ids.begin(), ids.end(), 1);
  return assign_subjects(ids, train_count, test_count, masks_per_split, seed);
}

std::vector<ClassCounts> reference_counts() {
  return {{"bonafide", 1003, 430},
          {"display", 849, 385},
          {"print_matte", 350, 150},
          {"print_glossy", 350, 150},
          {"silicone", 798, 342}};
}

DatasetRequest default_request(std::uint64_t seed) {
  DatasetRequest r;
  r.seed = seed;
  r.subjects = assign_subjects(35, 25, 10, 2, seed);
  return r;
}

std::vector<PlannedSample> plan_dataset(const DatasetRequest& req) {
  const auto& s = req.subjects;
  std::set<std::int64_t> train(s.train.begin(), s.train.end());
  for (auto id : s.test)
    if (train.count(id))
      throw Error(ErrorKind::kProtocol, "subject " + std::to_string(id) + " is in both train and test sets");
  for (auto id : s.mask_test)
    if (train.count(id))
      throw Error(ErrorKind::kProtocol, "silicone mask subject " + std::to_string(id) + " is in the train set");
  if (!(req.distance_min_m > 0.0 && req.distance_min_m <= req.distance_max_m))
    throw Error(ErrorKind::kInvalidSpec, "invalid distance range");

  std::vector<PlannedSample> plan;
  const char* splits[] = {"train", "test"};
  const auto& names = material_names();
  for (std::size_t si = 0; si < 2; ++si) {
    for (std::size_t ci = 0; ci < names.size(); ++ci) {
      const auto it = std::find_if(req.counts.begin(), req.counts.end(),
                                   [&](const ClassCounts& c) { return c.material == names[ci]; });
      if (it == req.counts.end()) continue;
      const std::size_t count = si == 0 ? it->train : it->test;
      if (count == 0) continue;
      const bool silicone = names[ci] == "silicone";
      const auto& ids = silicone ? (si == 0 ? s.mask_train : s.mask_test) : (si == 0 ? s.train : s.test);
      if (ids.empty())
        throw Error(ErrorKind::kProtocol, std::string("no subjects available for ") + names[ci] + " in " + splits[si]);
      for (std::size_t i = 0; i < count; ++i) {
        const std::uint64_t seed = derive_seed(req.seed, {ci, si, i});
        std::mt19937_64 rng(derive_seed(seed, {0xd157}));
        std::uniform_real_distribution<double> dist(req.distance_min_m, req.distance_max_m);
        PlannedSample ps;
        ps.scene.subject_id = ids[i % ids.size()];
        ps.scene.material = names[ci];
        ps.scene.distance_m = dist(rng);
        ps.scene.noise_db = req.noise_db;
        ps.scene.noise_kind = req.noise_kind;
        ps.scene.seed = seed;
        char file[96];
        std::snprintf(file, sizeof file, "%s_%s_%05zu.wav", splits[si], names[ci].c_str(), i);
        ps.entry.path = std::string(splits[si]) + "/" + names[ci] + "/" + file;
        ps.entry.label = ci == 0 ? "bonafide" : "attack";
        ps.entry.pai_type = ci == 0 ? "none" : names[ci];
        ps.entry.subject_id = ps.scene.subject_id;
        ps.entry.split = splits[si];
        plan.push_back(std::move(ps));
      }
    }
  }
  return plan;
}

std::vector<ManifestEntry> generate_dataset(const std::vector<PlannedSample>& plan,
                                            const SessionSimulator& simulator,
                                            const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  parallel_for(plan.size(), [&](std::size_t i) {
    wav::write(out_dir / plan[i].entry.path, simulator.simulate(plan[i].scene));
  });
  std::vector<ManifestEntry> entries;
  entries.reserve(plan.size());
  for (const auto& p : plan) entries.push_back(p.entry);
  write_manifest(out_dir / "manifest.jsonl", entries);
  return entries;
}

}  // namespace echopad::echosim
