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

#include "paraflow/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "paraflow/error.hpp"
#include "paraflow/hash.hpp"

namespace paraflow {

using nlohmann::json;

void save_checkpoint(const std::filesystem::path& path, const models::Model& model,
                     const Vocab& vocab, const RelationInventory& relations) {
  json doc;
  doc["format"] = kCheckpointFormat;
  doc["version"] = kCheckpointVersion;
  doc["config"] = models::config_to_map(model.config());
  doc["vocab_hash"] = to_hex(vocab.fingerprint());
  doc["vocab"] = vocab.tokens();
  doc["relations"] = relations.names();
  json params = json::object();
  for (const auto& p : model.params()) {
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(p->value.size()));
    for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
      for (Eigen::Index c = 0; c < p->value.cols(); ++c) values.push_back(p->value(r, c));
    }
    params[p->name] = {{"shape", {p->value.rows(), p->value.cols()}}, {"values", values}};
  }
  doc["params"] = std::move(params);
  std::ofstream out(path);
  if (!out) throw Error("io", "cannot write checkpoint " + path.string());
  out << doc.dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("missing-checkpoint", "checkpoint not found: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("checkpoint", "unreadable checkpoint " + path.string() + ": " + e.what());
  }
  auto fail = [&](const std::string& why) {
    throw DataError("checkpoint", "bad checkpoint " + path.string() + ": " + why);
  };
  try {
    if (doc.value("format", "") != kCheckpointFormat) fail("wrong format tag");
    if (doc.value("version", 0) != kCheckpointVersion) fail("unsupported version");

    models::ModelConfig config;
    for (const auto& [k, v] : doc.at("config").items()) {
      models::apply_config_value(config, k, v.get<std::string>());
    }
    Checkpoint ck;
    ck.vocab = Vocab(doc.at("vocab").get<std::vector<std::string>>());
    if (to_hex(ck.vocab.fingerprint()) != doc.at("vocab_hash").get<std::string>()) {
      fail("vocabulary hash mismatch");
    }
    auto names = doc.at("relations").get<std::vector<std::string>>();
    if (names.empty() || names.front() != RelationInventory::kNullName) fail("relation inventory");
    ck.relations = RelationInventory(std::vector<std::string>(names.begin() + 1, names.end()));

    ck.model = models::make_model(config, ck.vocab.size(), ck.relations.size());
    const auto& params = doc.at("params");
    if (params.size() != ck.model->params().size()) fail("parameter count mismatch");
    for (auto& p : ck.model->params()) {
      if (!params.contains(p->name)) fail("missing parameter " + p->name);
      const auto& entry = params.at(p->name);
      const auto shape = entry.at("shape").get<std::vector<long>>();
      if (shape.size() != 2 || shape[0] != p->value.rows() || shape[1] != p->value.cols()) {
        fail("shape mismatch for " + p->name);
      }
      const auto values = entry.at("values").get<std::vector<double>>();
      if (values.size() != static_cast<std::size_t>(p->value.size())) fail("size mismatch for " + p->name);
      std::size_t i = 0;
      for (Eigen::Index r = 0; r < p->value.rows(); ++r) {
        for (Eigen::Index c = 0; c < p->value.cols(); ++c) p->value(r, c) = values[i++];
      }
    }
    return ck;
  } catch (const json::exception& e) {
    fail(e.what());
  }
  return {};
}

}  // namespace paraflow
