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

// Constructed METEOR cases. Matches and chunks were counted by hand:
// exact matches first, then Porter-stem matches, each hypothesis word
// taking the free reference word nearest to where the previous match ended.

#include <string>
#include <vector>

namespace oracle {

struct MeteorCase {
  std::string hypothesis;
  std::string reference;
  int matches;
  int chunks;
};

inline const std::vector<MeteorCase>& meteor_cases() {
  static const std::vector<MeteorCase> cases = {
      {"a b c d e f g h i j", "a b c d e f g h i j", 10, 1},
      {"the cat sat", "the cat sat down", 3, 1},
      {"sat the cat", "the cat sat", 3, 2},
      {"the the cat", "the cat the", 3, 3},
      {"cats running fast", "cat run fast", 3, 1},
      {"The Cat", "the cat", 2, 1},
      {"dog", "cat", 0, 0},
      {"a b x c d", "a b c d", 4, 2},
      {"a b c d", "a b x c d", 4, 2},
      {"d c b a", "a b c d", 4, 4},
      {"on the mat the cat sat", "the cat sat on the mat", 6, 2},
      {"jumped quickly over", "jumping quick over", 2, 2},
      {"a a a", "a", 1, 1},
      {"a", "a a a", 1, 1},
      {"the generals argued", "the general argues", 3, 1},
      {"i saw the man", "the man i saw", 4, 2},
      {"one two three four five six", "one two three", 3, 1},
      {"alpha beta", "gamma alpha delta beta", 2, 2},
      {"connected connecting connection", "connect", 1, 1},
      {"the cat", "", 0, 0},
  };
  return cases;
}

}  // namespace oracle
