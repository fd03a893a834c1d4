// tools/echopad_cli.cpp

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

// echopad: command-line front end.
//
//   echopad synth    --out session.wav
//   echopad simulate --out-dir data/ --preset full --seed 42
//   echopad process  session.wav [--model model.json] [--no-bg-subtract]
//   echopad train    --manifest data/manifest.jsonl --out model.json
//   echopad eval     --manifest data/manifest.jsonl --model model.json --out report.json
//   echopad eval     --manifest data/manifest.jsonl --protocol matrix --out report.json --csv matrix.csv
//   echopad det      --report report.json --out det.csv
//
// Every command accepts --config FILE and repeated --set key=value; flags
// override the file. Errors print one line "error: <kind>: <message>".

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include <json.hpp>

#include "echopad/echosim.hpp"
#include "echopad/ensemble.hpp"
#include "echopad/error.hpp"
#include "echopad/manifest.hpp"
#include "echopad/metrics.hpp"
#include "echopad/pipeline.hpp"
#include "echopad/protocol.hpp"
#include "echopad/run_config.hpp"
#include "echopad/signal.hpp"
#include "echopad/wav_io.hpp"

namespace {

using nlohmann::json;
using namespace echopad;

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Key-value config file");
  cmd->add_option("--set", c.sets, "Override a config key (key=value), repeatable");
  cmd->add_option("--seed", c.seed, "Seed for all randomness");
}

RunConfig resolve(const Common& c, KvConfig overrides = KvConfig{}) {
  KvConfig file = c.config_path.empty() ? KvConfig{} : KvConfig::load(c.config_path);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::kInvalidArgument, "--set expects key=value, got '" + s + "'");
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
    };
    if (!overrides.contains(trim(s.substr(0, eq)))) overrides.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  if (c.seed) overrides.set("seed", std::to_string(*c.seed));
  return RunConfig::resolve(file, overrides);
}

void write_json(const std::string& path, const json& doc) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << '\n';
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path);
  out << doc.dump(2) << '\n';
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, path + ": " + e.what());
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

protocol::SampleLoader manifest_loader(const std::filesystem::path& manifest_path) {
  return [manifest_path](const ManifestEntry& e) {
    return wav::read(resolve_sample_path(manifest_path, e));
  };
}

std::vector<ManifestEntry> select_split(const std::vector<ManifestEntry>& all, const std::string& split) {
  std::vector<ManifestEntry> out;
  for (const auto& e : all)
    if (split == "all" || e.split == split) out.push_back(e);
  return out;
}

// --- synth -----------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string out;
  std::optional<int> rate;
  std::optional<double> carrier, duration, amplitude;
};

void run_synth(const SynthArgs& a) {
  KvConfig o;
  if (a.rate) o.set("pulse.sample_rate_hz", std::to_string(*a.rate));
  if (a.carrier) o.set("pulse.carrier_hz", fmt(*a.carrier));
  if (a.duration) o.set("pulse.duration_s", fmt(*a.duration));
  if (a.amplitude) o.set("pulse.amplitude", fmt(*a.amplitude));
  const RunConfig cfg = resolve(a.common, o);
  const Waveform session = signal::session_template(cfg.pulse, cfg.schedule);
  wav::write(a.out, session);
  std::cout << json{{"out", a.out}, {"samples", session.size()}, {"sample_rate_hz", session.sample_rate_hz},
                    {"provenance", cfg.provenance()}}
                   .dump()
            << '\n';
}

// --- simulate --------------------------------------------------------------

struct SimulateArgs {
  Common common;
  std::string out_dir;
  std::string preset;
  std::optional<std::size_t> count;
  std::optional<std::string> noise_kind, profiles;
  std::optional<double> noise_db;
};

void run_simulate(const SimulateArgs& a) {
  KvConfig o;
  if (a.noise_kind) o.set("sim.noise_kind", *a.noise_kind);
  if (a.noise_db) o.set("sim.noise_db", fmt(*a.noise_db));
  if (a.profiles) o.set("sim.materials", *a.profiles);
  const RunConfig cfg = resolve(a.common, o);
  if (!a.preset.empty() && a.preset != "full")
    throw Error(ErrorKind::kInvalidArgument, "unknown preset '" + a.preset + "'");
  if (a.preset.empty() == !a.count.has_value())
    throw Error(ErrorKind::kInvalidArgument, "give exactly one of --preset full or --count N");

  echosim::DatasetRequest req;
  req.seed = cfg.seed;
  req.subjects = echosim::assign_subjects(cfg.train_subjects + cfg.test_subjects, cfg.train_subjects,
                                          cfg.test_subjects, cfg.masks_per_split, cfg.seed);
  if (a.count) {
    req.counts.clear();
    for (const auto& m : echosim::material_names()) req.counts.push_back({m, *a.count, *a.count});
  }
  req.noise_kind = cfg.noise_kind;
  req.noise_db = cfg.noise_db;
  req.distance_min_m = cfg.distance_min_m;
  req.distance_max_m = cfg.distance_max_m;

  const echosim::SessionSimulator sim(cfg.pulse, cfg.schedule, cfg.material_library(), cfg.morse);
  const auto plan = echosim::plan_dataset(req);
  const auto entries = echosim::generate_dataset(plan, sim, a.out_dir);
  write_json((std::filesystem::path(a.out_dir) / "dataset.json").string(),
             {{"samples", entries.size()}, {"manifest", "manifest.jsonl"}, {"provenance", cfg.provenance()}});
  std::cout << json{{"out_dir", a.out_dir}, {"samples", entries.size()}}.dump() << '\n';
}

// --- process ---------------------------------------------------------------

struct ProcessArgs {
  Common common;
  std::string input;
  std::string out;
  std::string model;
  bool no_bg = false;
  std::string scalogram_csv, scalogram_bin;
};

void run_process(const ProcessArgs& a) {
  KvConfig o;
  if (a.no_bg) o.set("dsp.background_subtraction", "false");
  const RunConfig cfg = resolve(a.common, o);
  const pipeline::FeatureExtractor fx(cfg.pipeline_config());
  const Waveform capture = wav::read(a.input);
  const auto r = fx.process(capture);
  if (!a.scalogram_csv.empty()) cwt::write_csv(a.scalogram_csv, r.scalogram);
  if (!a.scalogram_bin.empty()) cwt::write_binary(a.scalogram_bin, r.scalogram);

  double smax = 0.0;
  for (double v : r.scalogram.magnitudes) smax = std::max(smax, v);
  json rec;
  rec["input"] = a.input;
  rec["background_subtraction"] = cfg.background_subtraction;
  rec["compressed"] = {{"length", r.compressed.size()}, {"first_lag", r.compressed.first_lag},
                       {"peak_lag", r.compressed.lag_at(r.compressed.argmax())}};
  rec["scalogram"] = {{"rows", r.scalogram.rows}, {"cols", r.scalogram.cols}, {"max", smax},
                      {"center_freqs_hz", r.scalogram.center_freqs_hz}};
  rec["embedding"] = {{"g", r.grid.g}, {"d", r.grid.d}, {"values", r.grid.values}};
  if (!a.model.empty()) {
    const auto model = ensemble::load_model(a.model);
    const auto s = ensemble::score(r.grid, model);
    rec["score"] = {{"cell_scores", s.cell_scores}, {"fused", s.fused}, {"threshold", model.threshold},
                    {"decision", ensemble::to_string(ensemble::decide(s.fused, model))}};
  }
  rec["provenance"] = cfg.provenance();
  write_json(a.out, rec);
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string manifest, out, split = "train";
};

void run_train(const TrainArgs& a) {
  const RunConfig cfg = resolve(a.common);
  const auto entries = select_split(read_manifest(a.manifest), a.split);
  if (entries.empty()) throw Error(ErrorKind::kTraining, "no manifest entries in split '" + a.split + "'");
  const pipeline::FeatureExtractor fx(cfg.pipeline_config());
  const auto fs = protocol::extract_features(entries, fx, manifest_loader(a.manifest));
  std::vector<int> labels;
  for (const auto& e : entries) labels.push_back(e.is_bona_fide() ? ensemble::kBonaFide : ensemble::kAttack);
  auto model = ensemble::train_ensemble(fs.grids, labels, cfg.svm, cfg.seed);
  model.backend = fx.backend().describe();
  ensemble::save_model(a.out, model, cfg.provenance());
  std::cout << json{{"out", a.out}, {"cells", model.models.size()}, {"threshold", model.threshold}}.dump() << '\n';
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string manifest, model, protocol, out, csv, split = "test";
  bool no_bg = false;
};

void run_eval(const EvalArgs& a) {
  KvConfig o;
  if (a.no_bg) o.set("dsp.background_subtraction", "false");
  const RunConfig cfg = resolve(a.common, o);
  if (a.model.empty() == a.protocol.empty())
    throw Error(ErrorKind::kInvalidArgument, "give exactly one of --model or --protocol matrix");
  const auto all = read_manifest(a.manifest);
  const auto loader = manifest_loader(a.manifest);

  json doc;
  if (!a.protocol.empty()) {
    if (a.protocol != "matrix") throw Error(ErrorKind::kInvalidArgument, "unknown protocol '" + a.protocol + "'");
    const auto spec = cfg.protocol_spec();
    const auto split = protocol::split_manifest(all, spec);
    const auto report = protocol::run_matrix(split.train, split.test, spec, loader);
    doc = protocol::to_json(report, true);
    doc["kind"] = "protocol_matrix";
    if (!a.csv.empty()) protocol::write_csv(a.csv, report);
  } else {
    const auto model = ensemble::load_model(a.model);
    const auto entries = select_split(all, a.split);
    const pipeline::FeatureExtractor fx(cfg.pipeline_config());
    const auto fs = protocol::extract_features(entries, fx, loader);
    metrics::ScoreSet set;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const double fused = ensemble::score(fs.grids[i], model).fused;
      if (entries[i].is_bona_fide()) set.bona.push_back(fused);
      else set.attacks[entries[i].pai_type].push_back(fused);
    }
    const auto report = metrics::evaluate(set);
    doc = metrics::to_json(report, true);
    doc["kind"] = "evaluation";
    doc["apcer_max_pct_at_eer"] = metrics::apcer(set, report.d_eer_threshold).max_pct;
    if (!a.csv.empty()) metrics::write_det_csv(a.csv, report.det_points);
  }
  doc["provenance"] = cfg.provenance();
  write_json(a.out, doc);
}

// --- det -------------------------------------------------------------------

struct DetArgs {
  std::string report, out, cell;
};

void run_det(const DetArgs& a) {
  const json doc = read_json(a.report);
  const json* node = &doc;
  if (doc.value("kind", std::string{}) == "protocol_matrix") {
    if (a.cell.empty()) throw Error(ErrorKind::kInvalidArgument, "matrix reports need --cell TRAIN:TEST");
    const auto colon = a.cell.find(':');
    if (colon == std::string::npos) throw Error(ErrorKind::kInvalidArgument, "--cell expects TRAIN:TEST");
    node = nullptr;
    for (const auto& c : doc.at("cells"))
      if (c.at("train_pai") == a.cell.substr(0, colon) && c.at("test_pai") == a.cell.substr(colon + 1)) node = &c;
    if (!node) throw Error(ErrorKind::kInvalidArgument, "no cell " + a.cell + " in report");
  }
  const auto report = metrics::report_from_json(*node);
  if (report.det_points.empty()) throw Error(ErrorKind::kFormat, "report carries no DET points");
  metrics::write_det_csv(a.out, report.det_points);
  std::cout << json{{"out", a.out}, {"points", report.det_points.size()}}.dump() << '\n';
}

std::string one_line(std::string text) {
  for (char& ch : text)
    if (ch == '\n' || ch == '\r') ch = ' ';
  return text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acoustic-echo face presentation-attack detection"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Write the transmit-side session template WAV");
  add_common(c_synth, synth.common);
  c_synth->add_option("--out", synth.out, "Output WAV")->required();
  c_synth->add_option("--rate", synth.rate, "Sample rate (Hz)");
  c_synth->add_option("--carrier", synth.carrier, "Carrier frequency (Hz)");
  c_synth->add_option("--duration", synth.duration, "Pulse duration (s)");
  c_synth->add_option("--amplitude", synth.amplitude, "Pulse amplitude");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Generate a simulated dataset and manifest");
  add_common(c_sim, sim.common);
  c_sim->add_option("--out-dir", sim.out_dir, "Dataset directory")->required();
  c_sim->add_option("--preset", sim.preset, "Class counts preset (full)");
  c_sim->add_option("--count", sim.count, "Sessions per class and split");
  c_sim->add_option("--noise-kind", sim.noise_kind, "white | stationary_tone | babble");
  c_sim->add_option("--noise-db", sim.noise_db, "Noise level relative to the pulse (dB, -inf disables)");
  c_sim->add_option("--profiles", sim.profiles, "Material profile file");

  ProcessArgs proc;
  auto* c_proc = app.add_subcommand("process", "Run one session through the feature pipeline");
  add_common(c_proc, proc.common);
  c_proc->add_option("input", proc.input, "Session WAV")->required();
  c_proc->add_option("--out", proc.out, "Record JSON (default stdout)");
  c_proc->add_option("--model", proc.model, "Ensemble model to score with");
  c_proc->add_flag("--no-bg-subtract", proc.no_bg, "Skip background subtraction");
  c_proc->add_option("--scalogram-csv", proc.scalogram_csv, "Dump the scalogram as CSV");
  c_proc->add_option("--scalogram-bin", proc.scalogram_bin, "Dump the scalogram as binary");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "Train an ensemble from a manifest");
  add_common(c_train, train.common);
  c_train->add_option("--manifest", train.manifest, "Manifest (JSON lines)")->required();
  c_train->add_option("--out", train.out, "Model JSON")->required();
  c_train->add_option("--split", train.split, "train | test | all");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a model or run the PAI protocol matrix");
  add_common(c_eval, ev.common);
  c_eval->add_option("--manifest", ev.manifest, "Manifest (JSON lines)")->required();
  c_eval->add_option("--model", ev.model, "Model JSON");
  c_eval->add_option("--protocol", ev.protocol, "matrix");
  c_eval->add_option("--out", ev.out, "Report JSON (default stdout)");
  c_eval->add_option("--csv", ev.csv, "Matrix CSV, or DET CSV for single-model evaluation");
  c_eval->add_option("--split", ev.split, "Split to evaluate with --model");
  c_eval->add_flag("--no-bg-subtract", ev.no_bg, "Skip background subtraction");

  DetArgs det;
  auto* c_det = app.add_subcommand("det", "Export DET points of a report as CSV");
  c_det->add_option("--report", det.report, "Report JSON")->required();
  c_det->add_option("--out", det.out, "DET CSV")->required();
  c_det->add_option("--cell", det.cell, "TRAIN:TEST cell of a matrix report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (c_synth->parsed()) run_synth(synth);
    else if (c_sim->parsed()) run_simulate(sim);
    else if (c_proc->parsed()) run_process(proc);
    else if (c_train->parsed()) run_train(train);
    else if (c_eval->parsed()) run_eval(ev);
    else if (c_det->parsed()) run_det(det);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << one_line(e.what()) << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}
