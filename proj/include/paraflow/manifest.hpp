// Copyright 2026 The Paraflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace paraflow {

// Provenance of one command invocation. Timestamps are recorded but are
// excluded from hash().
struct RunManifest {
  std::string command;
  std::string config_path;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version;
  std::string started_at;
  std::string finished_at;
  // Content hashes of upstream artifacts, keyed by role (e.g. "examples").
  std::map<std::string, std::string> upstream;

  std::uint64_t hash() const;
};

// Build version string baked in at configure time.
const char* version_string();
// Current UTC time as ISO-8601.
std::string utc_now();

// FNV-1a of a file's bytes; Error("io") when unreadable.
std::uint64_t file_hash(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& artifact);

// Writes <artifact>.manifest.json with the manifest, its hash and the
// artifact's content hash.
void write_sidecar(const std::filesystem::path& artifact, const RunManifest& manifest);
// nullopt when no sidecar exists; DataError("manifest") when unreadable.
std::optional<RunManifest> read_sidecar(const std::filesystem::path& artifact);

}  // namespace paraflow
