// tests/test_echosim.cpp

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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>

#include "echopad/dsp.hpp"
#include "echopad/echosim.hpp"
#include "echopad/error.hpp"
#include "echopad/manifest.hpp"
#include "echopad/wav_io.hpp"
#include "support.hpp"

using namespace echopad;
using namespace echopad::echosim;

namespace {

const SessionSimulator& default_sim() {
  static const SessionSimulator sim(signal::PulseSpec{}, signal::SessionSchedule{});
  return sim;
}

SceneSpec quiet(const std::string& material, double distance = 0.30, std::uint64_t seed = 1) {
  SceneSpec s;
  s.material = material;
  s.distance_m = distance;
  s.noise_db = -std::numeric_limits<double>::infinity();
  s.seed = seed;
  s.subject_id = 3;
  return s;
}

double energy(const std::vector<double>& v, std::size_t begin = 0, std::size_t end = SIZE_MAX) {
  double e = 0.0;
  for (std::size_t i = begin; i < std::min(end, v.size()); ++i) e += v[i] * v[i];
  return e;
}

}  // namespace

TEST_CASE("echo delay at 0.30 m is 77 samples") {
  CHECK(echo_delay_samples(0.30, 44100) == 77);
  CHECK(echo_delay_samples(0.45, 44100) == 116);
  CHECK(echo_delay_samples(0.0, 44100) == 0);
}

TEST_CASE("noiseless capture: silent outside the echo, onset at tau") {
  for (const auto& m : material_names()) {
    const auto cap = default_sim().simulate(quiet(m));
    REQUIRE(cap.size() == 242550);
    for (std::size_t i = 0; i < 176400 + 77; ++i) REQUIRE(cap.samples[i] == 0.0);
    CHECK(energy(cap.samples, 176400 + 77, 176400 + 200) > 0.0);
  }
}

TEST_CASE("simulation is deterministic and seed-sensitive") {
  SceneSpec s;
  s.material = "print_glossy";
  s.seed = 77;
  const auto a = default_sim().simulate(s), b = default_sim().simulate(s);
  CHECK(a.samples == b.samples);
  s.seed = 78;
  CHECK(default_sim().simulate(s).samples != a.samples);
}

TEST_CASE("white noise level follows the dB setting") {
  SceneSpec s;
  s.noise_db = -20.0;
  s.seed = 5;
  const auto cap = default_sim().simulate(s);
  // background window has no echo
  const double rms = std::sqrt(energy(cap.samples, 0, 66150) / 66150.0);
  const double expected = 0.9 / std::sqrt(2.0) * 0.1;
  CHECK(rms == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("property: echo energy falls with distance") {
  testing::Gen g(51);
  for (int trial = 0; trial < 8; ++trial) {
    const auto& m = material_names()[g.index(0, 4)];
    const double d1 = g.uniform(0.2, 0.8), d2 = g.uniform(0.2, 0.8);
    if (std::abs(d1 - d2) < 0.01) continue;
    const std::uint64_t seed = g.index(0, 1 << 20);
    const double e1 = energy(default_sim().simulate(quiet(m, d1, seed)).samples);
    const double e2 = energy(default_sim().simulate(quiet(m, d2, seed)).samples);
    CHECK((d1 < d2) == (e1 > e2));
  }
}

TEST_CASE("property: raising every band gain raises echo energy") {
  testing::Gen g(53);
  signal::PulseSpec pulse;
  pulse.duration_s = 0.5;
  for (int trial = 0; trial < 10; ++trial) {
    MaterialProfile lo{"m", std::vector<double>(10), g.uniform(0.0, 20.0), g.uniform(0.0, 3.0), 0.1, 0.1};
    for (double& v : lo.band_gains) v = g.uniform(0.0, 0.8);
    MaterialProfile hi = lo;
    for (double& v : hi.band_gains) v += g.uniform(0.01, 0.2);
    MaterialLibrary la, lb;
    la.add(lo);
    lb.add(hi);
    const SessionSimulator sa(pulse, signal::SessionSchedule{}, la), sb(pulse, signal::SessionSchedule{}, lb);
    const auto scene = quiet("m", g.uniform(0.3, 0.45), g.index(0, 1000));
    CHECK(energy(sb.simulate(scene).samples, 176400) > energy(sa.simulate(scene).samples, 176400));
  }
}

TEST_CASE("stationary-tone noise repeats exactly between the two windows") {
  const auto n = make_noise(NoiseKind::kStationaryTone, 0.3, 242550, 44100, 176400, 9);
  double diff = 0.0;
  for (std::size_t i = 0; i < 66150; ++i) diff = std::max(diff, std::abs(n[i] - n[176400 + i]));
  CHECK(diff <= 1e-12);
  const double rms = std::sqrt(energy(n) / n.size());
  CHECK(rms == doctest::Approx(0.3).epsilon(0.02));

  SceneSpec s = quiet("silicone");
  s.noise_db = -5.0;
  s.noise_kind = NoiseKind::kStationaryTone;
  const auto cap = default_sim().simulate(s);
  const auto clean = signal::segment_capture(cap, signal::SessionSchedule{});
  const auto sub = dsp::subtract_background(clean.echoes, clean.background);
  const auto echo_only = default_sim().simulate(quiet("silicone"));
  for (std::size_t i = 0; i < 66150; ++i)
    REQUIRE(std::abs(sub.samples[i] - echo_only.samples[176400 + i]) <= 1e-12);
  CHECK_THROWS_AS(make_noise(NoiseKind::kStationaryTone, 1.0, 100, 44100, 0, 1), Error);
}

TEST_CASE("babble noise is scaled to the requested rms") {
  const auto n = make_noise(NoiseKind::kBabble, 0.05, 44100, 44100, 1, 3);
  CHECK(std::sqrt(energy(n) / n.size()) == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(parse_noise_kind("babble") == NoiseKind::kBabble);
  CHECK_THROWS_AS(parse_noise_kind("pink"), Error);
}

TEST_CASE("default materials: every pair differs by 0.1 in at least three bands") {
  const auto lib = MaterialLibrary::defaults();
  REQUIRE(lib.profiles().size() == 5);
  for (const auto& [a, pa] : lib.profiles())
    for (const auto& [b, pb] : lib.profiles()) {
      if (a >= b) continue;
      int bands = 0;
      for (std::size_t k = 0; k < 10; ++k) bands += std::abs(pa.band_gains[k] - pb.band_gains[k]) >= 0.1 - 1e-12;
      INFO(a << " vs " << b);
      CHECK(bands >= 3);
    }
}

TEST_CASE("shipped material file matches the compiled-in defaults") {
  const auto file = MaterialLibrary::load(std::filesystem::path(ECHOPAD_SOURCE_DIR) / "data/materials_v1.conf");
  const auto def = MaterialLibrary::defaults();
  CHECK(file.profiles() == def.profiles());
  CHECK(MaterialLibrary::from_config(def.to_config()).profiles() == def.profiles());
}

TEST_CASE("material validation") {
  MaterialProfile p{"x", std::vector<double>(10, 0.5), 1.0, 1.0, 0.0, 0.0};
  CHECK_NOTHROW(validate(p, 10));
  CHECK_THROWS_AS(validate(p, 9), Error);
  p.band_gains[3] = 1.2;
  CHECK_THROWS_AS(validate(p, 10), Error);
  p.band_gains[3] = 0.5;
  p.diffuse_ratio = -1.0;
  CHECK_THROWS_AS(validate(p, 10), Error);

  auto cfg = MaterialLibrary::defaults().to_config();
  cfg.set("materials.version", "2");
  CHECK_THROWS_AS(MaterialLibrary::from_config(cfg), Error);
  CHECK_THROWS_AS(default_sim().simulate(quiet("cardboard")), Error);
  CHECK_THROWS_AS(default_sim().simulate(quiet("display", 5.0)), Error);
}

TEST_CASE("flat band gains give a flat equalizer") {
  const MaterialProfile p{"flat", std::vector<double>(10, 0.37), 0.0, 0.0, 0.0, 0.0};
  for (double f : {100.0, 2000.0, 5000.0, 12345.0, 21000.0})
    CHECK(equalizer_response(p, cwt::MorseParams{}, f) == doctest::Approx(0.37).epsilon(1e-12));
}

TEST_CASE("class counts total 4807") {
  std::size_t total = 0;
  for (const auto& c : reference_counts()) total += c.train + c.test;
  CHECK(total == 4807);
}

TEST_CASE("subject assignment is disjoint and deterministic") {
  testing::Gen g(52);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t tr = g.index(2, 30), te = g.index(2, 15);
    const std::size_t total = tr + te + g.index(0, 10);
    const std::size_t masks = g.index(0, std::min(tr, te));
    const std::uint64_t seed = g.index(0, 1000);
    const auto a = assign_subjects(total, tr, te, masks, seed);
    CHECK(a.train.size() == tr);
    CHECK(a.test.size() == te);
    std::set<std::int64_t> train(a.train.begin(), a.train.end());
    for (auto id : a.test) REQUIRE(train.count(id) == 0);
    for (auto id : a.mask_train) REQUIRE(train.count(id) == 1);
    std::set<std::int64_t> test(a.test.begin(), a.test.end());
    for (auto id : a.mask_test) REQUIRE(test.count(id) == 1);
    const auto b = assign_subjects(total, tr, te, masks, seed);
    CHECK(a.train == b.train);
    CHECK(a.mask_test == b.mask_test);
  }
  CHECK_THROWS_AS(assign_subjects(10, 8, 8, 1, 0), Error);
  CHECK_THROWS_AS(assign_subjects(10, 2, 2, 3, 0), Error);
}

TEST_CASE("default plan: counts, identities and ordering") {
  const auto req = default_request(42);
  const auto plan = plan_dataset(req);
  CHECK(plan.size() == 4807);
  std::map<std::pair<std::string, std::string>, std::size_t> counts;
  std::set<std::int64_t> train_ids, test_ids, silicone_train, silicone_test;
  std::set<std::string> paths;
  for (const auto& p : plan) {
    validate(p.entry);
    counts[{p.entry.split, p.scene.material}]++;
    (p.entry.split == "train" ? train_ids : test_ids).insert(p.entry.subject_id);
    if (p.scene.material == "silicone")
      (p.entry.split == "train" ? silicone_train : silicone_test).insert(p.entry.subject_id);
    CHECK(p.scene.distance_m >= 0.30);
    CHECK(p.scene.distance_m <= 0.45);
    paths.insert(p.entry.path);
  }
  CHECK(paths.size() == plan.size());
  for (const auto& c : reference_counts()) {
    CHECK(counts[{"train", c.material}] == c.train);
    CHECK(counts[{"test", c.material}] == c.test);
  }
  CHECK(train_ids.size() == 25);
  CHECK(test_ids.size() == 10);
  for (auto id : test_ids) CHECK(train_ids.count(id) == 0);
  CHECK(silicone_train.size() == 2);
  CHECK(silicone_test.size() == 2);
  CHECK(plan.front().entry.split == "train");
  CHECK(plan.back().entry.split == "test");
}

TEST_CASE("zero counts produce no entries") {
  auto req = default_request(1);
  for (auto& c : req.counts) c.train = c.test = 0;
  CHECK(plan_dataset(req).empty());
  req.counts[0].test = 3;
  CHECK(plan_dataset(req).size() == 3);
}

TEST_CASE("overlapping subject sets are rejected") {
  auto req = default_request(1);
  req.subjects.test.push_back(req.subjects.train.front());
  CHECK_THROWS_AS(plan_dataset(req), Error);
}

TEST_CASE("generated files match in-memory simulation") {
  testing::TempDir dir;
  auto req = default_request(7);
  for (auto& c : req.counts) c.train = 1, c.test = 0;
  const auto plan = plan_dataset(req);
  const auto entries = generate_dataset(plan, default_sim(), dir.path());
  REQUIRE(entries.size() == 5);
  const auto manifest = read_manifest(dir / "manifest.jsonl");
  CHECK(manifest == entries);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto w = wav::read(resolve_sample_path(dir / "manifest.jsonl", manifest[i]));
    const auto ref = default_sim().simulate(plan[i].scene);
    REQUIRE(w.size() == ref.size());
    double err = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) err = std::max(err, std::abs(w.samples[k] - ref.samples[k]));
    CHECK(err <= 1e-6);
  }
}
