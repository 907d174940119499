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
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "paraflow/corpus.hpp"
#include "paraflow/discourse.hpp"

namespace paraflow::synth {

// Templated paragraphs. Each opens with an introduction, walks a rotation
// of a fixed cycle of discourse roles, and closes with a conclusion; topic
// words (agent, object, place) form a combination unique to the paragraph.
// Lengths cycle through 4..7 and domains through papers, scifi, fantasy.
struct SynthSpec {
  int paragraphs = 20;
  std::uint64_t seed = 1;
};

struct SynthCorpus {
  std::vector<Paragraph> paragraphs;
  // Gold chain trees whose relations follow the role sequence.
  std::vector<std::pair<std::string, discourse::RstTree>> trees;
};

inline constexpr int kMaxSynthParagraphs = 12 * 12 * 12;

// Throws Error("usage") when `paragraphs` is outside [1, kMaxSynthParagraphs].
SynthCorpus synthesize(const SynthSpec& spec);

// Raw ingest format: one sentence per line, blank line between paragraphs.
void write_raw(std::ostream& out, const std::vector<Paragraph>& paragraphs);

}  // namespace paraflow::synth
