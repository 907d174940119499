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

#include <filesystem>
#include <memory>

#include "paraflow/corpus.hpp"
#include "paraflow/discourse.hpp"
#include "paraflow/models.hpp"

namespace paraflow {

using discourse::RelationInventory;

inline constexpr const char* kCheckpointFormat = "paraflow-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Vocab vocab;
  RelationInventory relations;
  std::unique_ptr<models::Model> model;
};

// JSON archive: {format, version, config, vocab_hash, vocab, relations,
// params: {name: {shape: [rows, cols], values: [...row-major]}}}.
void save_checkpoint(const std::filesystem::path& path, const models::Model& model,
                     const Vocab& vocab, const RelationInventory& relations);

// Throws Error("missing-checkpoint") when the file is absent and
// DataError("checkpoint") on format, version, hash or shape problems.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace paraflow
