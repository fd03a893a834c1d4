// include/echopad/manifest.hpp

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

namespace echopad {

// One line of a dataset manifest (JSON-lines):
//   {"path": ..., "label": "bonafide"|"attack",
//    "pai_type": "none"|"display"|"print_matte"|"print_glossy"|"silicone",
//    "subject_id": int, "split": "train"|"test"}
// Relative paths resolve against the manifest's directory.
struct ManifestEntry {
  std::string path;
  std::string label;
  std::string pai_type;
  std::int64_t subject_id = 0;
  std::string split;

  bool is_bona_fide() const noexcept { return label == "bonafide"; }
  bool operator==(const ManifestEntry&) const = default;
};

nlohmann::json to_json(const ManifestEntry& entry);
ManifestEntry manifest_entry_from_json(const nlohmann::json& node);

// Checks field domains and label/pai_type consistency.
void validate(const ManifestEntry& entry);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

std::filesystem::path resolve_sample_path(const std::filesystem::path& manifest_path,
                                          const ManifestEntry& entry);

}  // namespace echopad
