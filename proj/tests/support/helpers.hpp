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
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "paraflow/corpus.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(PARAFLOW_FIXTURE_DIR) / name;
}

// Fresh directory under the build tree, removed first if present.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(PARAFLOW_SCRATCH_DIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline paraflow::Tokens words(const std::string& text) {
  std::istringstream in(text);
  paraflow::Tokens out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline paraflow::Paragraph paragraph(const std::string& id, const std::vector<std::string>& sentences,
                                     paraflow::Domain domain = paraflow::Domain::kSynthetic) {
  paraflow::Paragraph p{id, domain, {}};
  for (const auto& s : sentences) p.sentences.push_back(words(s));
  return p;
}

// `count` distinct valid paragraphs of 4 to 7 sentences.
inline std::vector<paraflow::Paragraph> numbered_paragraphs(int count) {
  std::vector<paraflow::Paragraph> out;
  for (int i = 0; i < count; ++i) {
    paraflow::Paragraph p{"n" + std::to_string(i), paraflow::Domain::kSynthetic, {}};
    for (int s = 0; s < 4 + i % 4; ++s) {
      p.sentences.push_back({"item", std::to_string(i), "line", std::to_string(s), "."});
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace testing
