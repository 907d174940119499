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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "paraflow/checkpoint.hpp"
#include "paraflow/corpus.hpp"

namespace paraflow::bridging {

struct BridgingExample {
  std::string id;
  Domain domain = Domain::kSynthetic;
  Tokens first;
  Tokens last;
  std::vector<Tokens> middle_ref;
  int n_middle = 0;

  // Original paragraph length.
  int length() const { return n_middle + 2; }
};

// One example per paragraph: s_1, s_M and the masked s_2..s_{M-1}.
// Throws DataError("too-short") for paragraphs under four sentences.
std::vector<BridgingExample> make_examples(const std::vector<Paragraph>& paragraphs);

struct Generation {
  std::string id;
  std::vector<Tokens> hypothesis;
};

struct BridgeOptions {
  int max_len = kMaxSentenceTokens;
  std::optional<models::Variant> expected_variant;
  std::optional<std::uint64_t> expected_vocab_hash;
};

// Generates exactly n_middle sentences per example. Reserved tokens are
// removed from the output. Throws DataError("mismatch") when the checkpoint
// disagrees with the expected variant or vocabulary.
std::vector<Generation> run_bridging(const Checkpoint& checkpoint,
                                     const std::vector<BridgingExample>& examples,
                                     const BridgeOptions& options = {});

// JSON lines {id, domain, first, last, middle_ref}.
void write_examples(std::ostream& out, const std::vector<BridgingExample>& examples);
std::vector<BridgingExample> read_examples(std::istream& in);

// JSON lines {id, hypothesis: [[token, ...], ...]}.
void write_generations(std::ostream& out, const std::vector<Generation>& generations);
std::vector<Generation> read_generations(std::istream& in);

}  // namespace paraflow::bridging
