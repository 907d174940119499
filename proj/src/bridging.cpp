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

#include "paraflow/bridging.hpp"

#include <istream>
#include <ostream>

#include <json.hpp>

#include "paraflow/error.hpp"
#include "paraflow/hash.hpp"

namespace paraflow::bridging {

using nlohmann::json;

std::vector<BridgingExample> make_examples(const std::vector<Paragraph>& paragraphs) {
  std::vector<BridgingExample> out;
  out.reserve(paragraphs.size());
  for (const auto& p : paragraphs) {
    if (p.sentences.size() < static_cast<std::size_t>(kMinSentences)) {
      throw DataError("too-short", "paragraph " + p.id + " has fewer than four sentences");
    }
    BridgingExample e;
    e.id = p.id;
    e.domain = p.domain;
    e.first = p.sentences.front();
    e.last = p.sentences.back();
    e.middle_ref.assign(p.sentences.begin() + 1, p.sentences.end() - 1);
    e.n_middle = static_cast<int>(e.middle_ref.size());
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<Generation> run_bridging(const Checkpoint& checkpoint,
                                     const std::vector<BridgingExample>& examples,
                                     const BridgeOptions& options) {
  const auto& model = *checkpoint.model;
  if (options.expected_variant && *options.expected_variant != model.config().variant) {
    throw DataError("mismatch", "checkpoint variant is " +
                                    std::string(models::variant_name(model.config().variant)) +
                                    ", expected " +
                                    std::string(models::variant_name(*options.expected_variant)));
  }
  if (options.expected_vocab_hash &&
      *options.expected_vocab_hash != checkpoint.vocab.fingerprint()) {
    throw DataError("mismatch", "checkpoint vocabulary hash " +
                                    to_hex(checkpoint.vocab.fingerprint()) + " differs from " +
                                    to_hex(*options.expected_vocab_hash));
  }
  std::vector<Generation> out;
  out.reserve(examples.size());
  for (const auto& e : examples) {
    const auto first = checkpoint.vocab.encode(e.first);
    const auto last = checkpoint.vocab.encode(e.last);
    Generation gen;
    gen.id = e.id;
    for (const auto& ids : model.generate(first, last, e.n_middle, options.max_len)) {
      Tokens sentence;
      for (int id : ids) {
        if (!Vocab::is_reserved(id)) sentence.push_back(checkpoint.vocab.token(id));
      }
      gen.hypothesis.push_back(std::move(sentence));
    }
    out.push_back(std::move(gen));
  }
  return out;
}

void write_examples(std::ostream& out, const std::vector<BridgingExample>& examples) {
  for (const auto& e : examples) {
    json j{{"id", e.id},
           {"domain", domain_name(e.domain)},
           {"first", e.first},
           {"last", e.last},
           {"middle_ref", e.middle_ref}};
    out << j.dump() << '\n';
  }
}

std::vector<BridgingExample> read_examples(std::istream& in) {
  std::vector<BridgingExample> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      BridgingExample e;
      e.id = j.at("id").get<std::string>();
      e.domain = parse_domain(j.value("domain", std::string("synthetic")));
      e.first = j.at("first").get<Tokens>();
      e.last = j.at("last").get<Tokens>();
      e.middle_ref = j.at("middle_ref").get<std::vector<Tokens>>();
      e.n_middle = static_cast<int>(e.middle_ref.size());
      out.push_back(std::move(e));
    } catch (const json::exception& ex) {
      throw DataError("examples", "examples line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

void write_generations(std::ostream& out, const std::vector<Generation>& generations) {
  for (const auto& g : generations) {
    json j{{"id", g.id}, {"hypothesis", g.hypothesis}};
    out << j.dump() << '\n';
  }
}

std::vector<Generation> read_generations(std::istream& in) {
  std::vector<Generation> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      out.push_back({j.at("id").get<std::string>(), j.at("hypothesis").get<std::vector<Tokens>>()});
    } catch (const json::exception& ex) {
      throw DataError("generations",
                      "generations line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  return out;
}

}  // namespace paraflow::bridging
