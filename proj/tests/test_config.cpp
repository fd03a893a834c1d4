// tests/test_config.cpp

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
#include <fstream>

#include "echopad/error.hpp"
#include "echopad/kv_config.hpp"
#include "echopad/run_config.hpp"
#include "support.hpp"

using namespace echopad;

TEST_CASE("key-value parsing") {
  const auto c = KvConfig::parse(
      "# header\n"
      "a.b = 1.5   # trailing comment\n"
      "\n"
      "  list = 1, 2 ,3\n"
      "flag = on\n"
      "a.b = 2.5\n"
      "neg = -inf\n");
  CHECK(c.get_double("a.b", 0.0) == 2.5);
  CHECK(c.get_doubles("list") == std::vector<double>{1.0, 2.0, 3.0});
  CHECK(c.get_bool("flag", false));
  CHECK(std::isinf(c.get_double("neg", 0.0)));
  CHECK(c.get_int("missing", 7) == 7);
  CHECK(c.get_string("missing", "x") == "x");
  CHECK(c.serialize() == "a.b = 2.5\nflag = on\nlist = 1, 2 ,3\nneg = -inf\n");
}

TEST_CASE("key-value errors") {
  CHECK_THROWS_AS(KvConfig::parse("no equals sign"), Error);
  CHECK_THROWS_AS(KvConfig::parse(" = 3"), Error);
  const auto c = KvConfig::parse("x = abc\ny = 1.5\n");
  CHECK_THROWS_AS(c.get_double("x", 0.0), Error);
  CHECK_THROWS_AS(c.get_int("y", 0), Error);
  CHECK_THROWS_AS(c.get_bool("x", false), Error);
  CHECK_THROWS_AS(KvConfig::load("/nonexistent/echopad.conf"), Error);
}

TEST_CASE("run config defaults") {
  const auto r = RunConfig::resolve(KvConfig{});
  CHECK(r.seed == 42);
  CHECK(r.pulse.carrier_hz == 21000.0);
  CHECK(r.pulse.sample_rate_hz == 44100);
  CHECK(r.grid == 7);
  CHECK(r.stats.size() == 8);
  CHECK(r.background_subtraction);
  CHECK(r.svm.c_reg == 1.0);
  CHECK(r.hash().size() == 64);
}

TEST_CASE("run config: file then overrides, and the hash follows") {
  const auto base = RunConfig::resolve(KvConfig{});
  const auto file = KvConfig::parse("embed.grid = 4\nsim.noise_kind = stationary_tone\nsim.noise_db = -5\n");
  const auto over = KvConfig::parse("embed.grid = 5\n");
  const auto r = RunConfig::resolve(file, over);
  CHECK(r.grid == 5);
  CHECK(r.noise_kind == echosim::NoiseKind::kStationaryTone);
  CHECK(r.noise_db == -5.0);
  CHECK(r.hash() != base.hash());
  CHECK(RunConfig::resolve(r.to_kv()).hash() == r.hash());
  CHECK(r.provenance().at("config_sha256") == r.hash());
}

TEST_CASE("run config rejects unknown keys and bad values") {
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("embed.gird = 3\n")), Error);
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("pulse.carrier_hz = 30000\n")), Error);
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("svm.c_reg = 0\n")), Error);
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("embed.backend = resnet\n")), Error);
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("embed.backend = external_model\n")), Error);
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("embed.stats = mean, kurtosis\n")), Error);
  CHECK_THROWS_AS(RunConfig::resolve(KvConfig::parse("embed.grid = -1\n")), Error);
}

TEST_CASE("run config feeds the pipeline and protocol specs") {
  const auto r = RunConfig::resolve(KvConfig::parse("embed.grid = 3\nembed.stats = mean, max\nseed = 9\n"));
  const auto p = r.pipeline_config();
  const auto* gp = std::get_if<embed::GridPoolSpec>(&p.backend);
  REQUIRE(gp != nullptr);
  CHECK(gp->g == 3);
  CHECK(gp->stats == std::vector<embed::CellStat>{embed::CellStat::kMean, embed::CellStat::kMax});
  CHECK(r.protocol_spec().seed == 9);
  CHECK(r.material_library().profiles() == echosim::MaterialLibrary::defaults().profiles());

  const auto ext = RunConfig::resolve(KvConfig::parse("embed.backend = external_model\nembed.model_path = m.onnx\n"));
  CHECK(std::holds_alternative<embed::ExternalModelSpec>(ext.pipeline_config().backend));
}

TEST_CASE("material file path in the config") {
  const auto r = RunConfig::resolve(
      KvConfig::parse("sim.materials = " ECHOPAD_SOURCE_DIR "/data/materials_v1.conf\n"));
  CHECK(r.material_library().profiles() == echosim::MaterialLibrary::defaults().profiles());
}
