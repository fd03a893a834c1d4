// src/manifest.cpp

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

#include "echopad/manifest.hpp"

#include <array>
#include <fstream>

#include "echopad/error.hpp"

namespace echopad {
namespace {

constexpr std::array<const char*, 4> kPaiTypes{"display", "print_matte", "print_glossy", "silicone"};

}  // namespace

nlohmann::json to_json(const ManifestEntry& entry) {
  nlohmann::json j;
  j["path"] = entry.path;
  j["label"] = entry.label;
  j["pai_type"] = entry.pai_type;
  j["subject_id"] = entry.subject_id;
  j["split"] = entry.split;
  return j;
}

ManifestEntry manifest_entry_from_json(const nlohmann::json& node) {
  try {
    ManifestEntry e;
    e.path = node.at("path").get<std::string>();
    e.label = node.at("label").get<std::string>();
    e.pai_type = node.at("pai_type").get<std::string>();
    e.subject_id = node.at("subject_id").get<std::int64_t>();
    e.split = node.value("split", std::string{});
    validate(e);
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::kFormat, std::string("manifest entry: ") + ex.what());
  }
}

void validate(const ManifestEntry& e) {
  if (e.path.empty()) throw Error(ErrorKind::kFormat, "manifest entry has an empty path");
  if (e.label == "bonafide") {
    if (e.pai_type != "none")
      throw Error(ErrorKind::kFormat, "bona fide entry " + e.path + " must have pai_type none");
  } else if (e.label == "attack") {
    bool known = false;
    for (const char* t : kPaiTypes) known = known || e.pai_type == t;
    if (!known) throw Error(ErrorKind::kFormat, "unknown pai_type '" + e.pai_type + "' in " + e.path);
  } else {
    throw Error(ErrorKind::kFormat, "unknown label '" + e.label + "' in " + e.path);
  }
  if (!e.split.empty() && e.split != "train" && e.split != "test")
    throw Error(ErrorKind::kFormat, "unknown split '" + e.split + "' in " + e.path);
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open manifest " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(manifest_entry_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::kFormat, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write manifest " + path.string());
  for (const auto& e : entries) out << to_json(e).dump() << '\n';
}

std::filesystem::path resolve_sample_path(const std::filesystem::path& manifest_path,
                                          const ManifestEntry& entry) {
  const std::filesystem::path p(entry.path);
  if (p.is_absolute()) return p;
  return manifest_path.parent_path() / p;
}

}  // namespace echopad
