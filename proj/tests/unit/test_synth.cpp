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

#include <doctest.h>

#include <set>
#include <sstream>

#include "paraflow/discourse.hpp"
#include "paraflow/error.hpp"
#include "paraflow/synth.hpp"

using namespace paraflow;

TEST_SUITE("synth") {

TEST_CASE("synthetic paragraphs pass every filter") {
  const auto c = synth::synthesize({60, 3});
  REQUIRE(c.paragraphs.size() == 60);
  REQUIRE(c.trees.size() == 60);
  std::ostringstream raw;
  synth::write_raw(raw, c.paragraphs);
  std::istringstream in(raw.str());
  const auto blocks = read_raw_blocks(in);
  REQUIRE(blocks.size() == 60);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto r = filter_paragraph(blocks[i], default_tokenize, c.paragraphs[i].id,
                                    c.paragraphs[i].domain);
    REQUIRE(r.accepted());
    CHECK(*r.paragraph == c.paragraphs[i]);
  }
  CHECK(dedupe(c.paragraphs).size() == 60);
}

TEST_CASE("lengths and domains cycle") {
  const auto c = synth::synthesize({8, 1});
  std::set<Domain> domains;
  for (std::size_t i = 0; i < c.paragraphs.size(); ++i) {
    CHECK(c.paragraphs[i].sentences.size() == 4 + i % 4);
    domains.insert(c.paragraphs[i].domain);
  }
  CHECK(domains.size() == 3);
  CHECK(c.paragraphs[0].id == "syn-0001");
}

TEST_CASE("trees align and follow the role cycle") {
  const auto c = synth::synthesize({20, 1});
  const std::vector<std::string> cycle = {"Elaboration", "Cause", "Contrast", "Temporal", "Background",
                                          "Attribution"};
  for (std::size_t i = 0; i < c.paragraphs.size(); ++i) {
    const auto& tree = c.trees[i].second;
    CHECK_NOTHROW(discourse::check_alignment(tree, c.paragraphs[i]));
    const auto flat = discourse::flatten(tree);
    REQUIRE(flat.size() + 1 == c.paragraphs[i].sentences.size());
    CHECK(*flat.back() == "Summary");
    for (std::size_t k = 0; k + 2 < flat.size(); ++k) {
      const auto at = std::find(cycle.begin(), cycle.end(), *flat[k]) - cycle.begin();
      CHECK(*flat[k + 1] == cycle[static_cast<std::size_t>(at + 1) % cycle.size()]);
    }
  }
}

TEST_CASE("generation is seeded") {
  CHECK(synth::synthesize({10, 4}).paragraphs == synth::synthesize({10, 4}).paragraphs);
  CHECK(synth::synthesize({10, 4}).paragraphs != synth::synthesize({10, 5}).paragraphs);
  CHECK_THROWS_AS(synth::synthesize({0, 1}), Error);
  CHECK_THROWS_AS(synth::synthesize({synth::kMaxSynthParagraphs + 1, 1}), Error);
}

}  // TEST_SUITE
