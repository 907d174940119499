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

#include "paraflow/synth.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "paraflow/error.hpp"

namespace paraflow::synth {

namespace {

constexpr std::array<const char*, 12> kAgents = {"robot",  "wizard",   "captain", "scholar",
                                                 "dragon", "pilot",    "merchant", "knight",
                                                 "doctor", "farmer",   "sailor",  "painter"};
constexpr std::array<const char*, 12> kObjects = {"lantern", "engine",  "map",    "sword",
                                                  "theory",  "crystal", "letter", "garden",
                                                  "compass", "machine", "song",   "book"};
constexpr std::array<const char*, 12> kPlaces = {"harbor", "castle", "station", "village",
                                                 "forest", "city",   "desert",  "island",
                                                 "valley", "library", "tower",  "market"};

struct Role {
  const char* relation;  // relation linking the previous sentence to this one
  std::array<const char*, 2> templates;
};

// Placeholders: X agent, Y object, Z place.
const Role kIntro{"", {"the X lived near the Z and studied the Y .",
                       "long ago a X from the Z found a strange Y ."}};
const Role kConclusion{"Summary", {"in the end the X and the Y stayed in the Z forever .",
                                   "so the Z still remembers the X who kept the Y ."}};
const std::array<Role, 6> kCycle = {{
    {"Elaboration", {"every morning the X cleaned the Y with great care .",
                     "the Y was old , heavy and covered in dust ."}},
    {"Cause", {"because the Y was broken , the X could not leave the Z .",
               "the storm over the Z had damaged the Y badly ."}},
    {"Contrast", {"however , the people of the Z did not trust the X .",
                  "but the Y refused to work for anyone else ."}},
    {"Temporal", {"after many days the X finally repaired the Y .",
                  "then , at dawn , the X carried the Y outside ."}},
    {"Background", {"the Z had always been a quiet place for a X .",
                    "nobody in the Z had seen such a Y before ."}},
    {"Attribution", {"the elders said that the Y belonged to the Z .",
                     "a child claimed the X had stolen the Y ."}},
}};

Tokens fill(const char* tmpl, const char* x, const char* y, const char* z) {
  Tokens out;
  std::istringstream in(tmpl);
  std::string w;
  while (in >> w) {
    if (w == "X") out.emplace_back(x);
    else if (w == "Y") out.emplace_back(y);
    else if (w == "Z") out.emplace_back(z);
    else out.push_back(w);
  }
  return out;
}

}  // namespace

SynthCorpus synthesize(const SynthSpec& spec) {
  if (spec.paragraphs < 1 || spec.paragraphs > kMaxSynthParagraphs) {
    throw Error("usage", "synth paragraph count must be in [1, " +
                             std::to_string(kMaxSynthParagraphs) + "]");
  }
  std::mt19937_64 rng(spec.seed);
  std::vector<int> combos(kMaxSynthParagraphs);
  std::iota(combos.begin(), combos.end(), 0);
  std::shuffle(combos.begin(), combos.end(), rng);

  static constexpr std::array<Domain, 3> kDomains = {Domain::kPapers, Domain::kScifi,
                                                     Domain::kFantasy};
  SynthCorpus out;
  for (int i = 0; i < spec.paragraphs; ++i) {
    const int combo = combos[static_cast<std::size_t>(i)];
    const char* x = kAgents[static_cast<std::size_t>(combo % 12)];
    const char* y = kObjects[static_cast<std::size_t>(combo / 12 % 12)];
    const char* z = kPlaces[static_cast<std::size_t>(combo / 144)];
    const int length = kMinSentences + i % (kMaxSentences - kMinSentences + 1);
    // The place fixes where in the role cycle the paragraph starts.
    const auto rotation = static_cast<std::size_t>(combo / 144) % kCycle.size();

    Paragraph p;
    std::ostringstream id;
    id << "syn-" << std::string(4 - std::min<std::size_t>(4, std::to_string(i + 1).size()), '0')
       << i + 1;
    p.id = id.str();
    p.domain = kDomains[static_cast<std::size_t>(i) % kDomains.size()];
    std::vector<std::string> relations;
    // The agent picks the template family, so a paragraph's wording is a
    // function of its topic words and role sequence.
    const auto family = static_cast<std::size_t>(combo % 12 % 2);
    auto emit = [&](const Role& role) {
      p.sentences.push_back(fill(role.templates[family], x, y, z));
      if (p.sentences.size() > 1) relations.emplace_back(role.relation);
    };
    emit(kIntro);
    for (int k = 0; k < length - 2; ++k) emit(kCycle[(rotation + static_cast<std::size_t>(k)) % kCycle.size()]);
    emit(kConclusion);
    out.trees.emplace_back(p.id, discourse::chain_tree(p, relations));
    out.paragraphs.push_back(std::move(p));
  }
  return out;
}

void write_raw(std::ostream& out, const std::vector<Paragraph>& paragraphs) {
  bool first = true;
  for (const auto& p : paragraphs) {
    if (!first) out << '\n';
    first = false;
    for (const auto& s : p.sentences) {
      for (std::size_t i = 0; i < s.size(); ++i) out << (i ? " " : "") << s[i];
      out << '\n';
    }
  }
}

}  // namespace paraflow::synth
