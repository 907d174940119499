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

#include "paraflow/manifest.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "paraflow/error.hpp"
#include "paraflow/hash.hpp"

#ifndef PARAFLOW_VERSION
#define PARAFLOW_VERSION "unknown"
#endif

namespace paraflow {

using nlohmann::json;

namespace {

json stable_fields(const RunManifest& m) {
  return {{"command", m.command}, {"config_path", m.config_path}, {"inputs", m.inputs},
          {"outputs", m.outputs}, {"seed", m.seed},               {"version", m.version},
          {"upstream", m.upstream}};
}

}  // namespace

std::uint64_t RunManifest::hash() const { return fnv1a64(stable_fields(*this).dump()); }

const char* version_string() { return PARAFLOW_VERSION; }

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io", "cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(bytes);
}

std::filesystem::path sidecar_path(const std::filesystem::path& artifact) {
  return std::filesystem::path(artifact.string() + ".manifest.json");
}

void write_sidecar(const std::filesystem::path& artifact, const RunManifest& manifest) {
  json j = stable_fields(manifest);
  j["started_at"] = manifest.started_at;
  j["finished_at"] = manifest.finished_at;
  j["manifest_hash"] = to_hex(manifest.hash());
  j["artifact_hash"] = to_hex(file_hash(artifact));
  std::ofstream out(sidecar_path(artifact));
  if (!out) throw Error("io", "cannot write " + sidecar_path(artifact).string());
  out << j.dump(2) << '\n';
}

std::optional<RunManifest> read_sidecar(const std::filesystem::path& artifact) {
  const auto path = sidecar_path(artifact);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json j;
    in >> j;
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_path = j.at("config_path").get<std::string>();
    m.inputs = j.at("inputs").get<std::vector<std::string>>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.version = j.at("version").get<std::string>();
    m.upstream = j.at("upstream").get<std::map<std::string, std::string>>();
    m.started_at = j.value("started_at", "");
    m.finished_at = j.value("finished_at", "");
    return m;
  } catch (const json::exception& e) {
    throw DataError("manifest", "unreadable manifest " + path.string() + ": " + e.what());
  }
}

}  // namespace paraflow
