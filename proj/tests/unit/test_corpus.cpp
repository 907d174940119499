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

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "paraflow/corpus.hpp"
#include "paraflow/error.hpp"

using namespace paraflow;

namespace {

std::vector<std::string> valid_raw(int n) {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.push_back("The sentence number " + std::to_string(i) + " says something plain.");
  }
  return out;
}

std::optional<RejectReason> reason_of(const std::vector<std::string>& raw) {
  return filter_paragraph(raw, default_tokenize).reason;
}

}  // namespace

TEST_SUITE("corpus") {

TEST_CASE("default tokenizer splits punctuation and keeps joiners") {
  CHECK(default_tokenize("Don't stop-now, friend.") ==
        Tokens{"Don't", "stop-now", ",", "friend", "."});
  CHECK(default_tokenize("  \"Hi!\" ") == Tokens{"\"", "Hi", "!", "\""});
  CHECK(default_tokenize("").empty());
}

TEST_CASE("paragraph length bounds") {
  CHECK(reason_of(valid_raw(3)) == RejectReason::kParagraphLength);
  CHECK(reason_of(valid_raw(8)) == RejectReason::kParagraphLength);
  for (int n = kMinSentences; n <= kMaxSentences; ++n) CHECK_FALSE(reason_of(valid_raw(n)));
}

TEST_CASE("sentence length bounds") {
  auto raw = valid_raw(5);
  raw[2] = "Far too short.";  // 4 tokens
  CHECK(reason_of(raw) == RejectReason::kSentenceLength);
  raw[2] = "One two three four.";  // 5 tokens
  CHECK_FALSE(reason_of(raw));
  raw[2] = "One two three four five";
  CHECK_FALSE(reason_of(raw));
  std::string long_sentence;
  for (int i = 0; i < 25; ++i) long_sentence += "w ";
  raw[2] = long_sentence + ".";  // 26 tokens
  CHECK(reason_of(raw) == RejectReason::kSentenceLength);
}

TEST_CASE("caps ending rejects press signatures") {
  auto raw = valid_raw(5);
  raw.back() = "The talks ended without an agreement SAID JOHN REUTERS";
  CHECK(reason_of(raw) == RejectReason::kCapsEnding);
  raw.back() = "The talks ended without an agreement said JOHN.";
  CHECK_FALSE(reason_of(raw));
  CHECK(has_caps_ending(Tokens{"a", "NASA", "ESA", "."}));
  CHECK_FALSE(has_caps_ending(Tokens{"a", "b", "NASA", "."}));
  CHECK_FALSE(has_caps_ending(Tokens{"NASA"}));
}

TEST_CASE("sentence ending marks") {
  for (const char* s : {"x.", "x!", "x?", "x.\"", "x!\"", "x?\"", "x.  "}) CHECK(has_end_mark(s));
  for (const char* s : {"x", "x,", "x;", "x\"", "x:"}) CHECK_FALSE(has_end_mark(s));
  auto raw = valid_raw(4);
  raw.back() = "This final sentence has no mark";
  CHECK(reason_of(raw) == RejectReason::kNoEndMark);
  raw.back() = "This final sentence ends in dialogue!\"";
  CHECK_FALSE(reason_of(raw));
}

TEST_CASE("adjacent identical sentences") {
  auto raw = valid_raw(5);
  raw[3] = raw[2];
  CHECK(reason_of(raw) == RejectReason::kAdjacentIdentical);
  raw = valid_raw(5);
  raw[4] = raw[2];  // not adjacent
  CHECK_FALSE(reason_of(raw));
}

TEST_CASE("tokenizer failure is a rejection") {
  const Tokenizer broken = [](std::string_view) -> Tokens { throw std::runtime_error("boom"); };
  CHECK(filter_paragraph(valid_raw(4), broken).reason == RejectReason::kTokenizeError);
}

TEST_CASE("accepted paragraphs are lowercased and satisfy the invariants") {
  std::mt19937_64 rng(5);
  const std::vector<std::string> pool = {"Alpha", "beta", "GAMMA", "delta", ",", "'", "-",
                                         "x-ray", "it's", ".", "!", "?", "\"", "Z"};
  int accepted = 0;
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> raw;
    const int m = 2 + static_cast<int>(rng() % 8);
    for (int s = 0; s < m; ++s) {
      std::string line;
      const int n = 1 + static_cast<int>(rng() % 30);
      for (int t = 0; t < n; ++t) line += pool[rng() % pool.size()] + " ";
      if (rng() % 4 != 0) line += ".";
      raw.push_back(line);
    }
    const auto r = filter_paragraph(raw, default_tokenize);
    REQUIRE(r.accepted() != r.reason.has_value());
    if (!r.accepted()) continue;
    ++accepted;
    const auto& p = *r.paragraph;
    CHECK(p.sentences.size() >= kMinSentences);
    CHECK(p.sentences.size() <= kMaxSentences);
    for (std::size_t i = 0; i < p.sentences.size(); ++i) {
      CHECK(p.sentences[i].size() >= kMinSentenceTokens);
      CHECK(p.sentences[i].size() <= kMaxSentenceTokens);
      for (const auto& t : p.sentences[i]) CHECK(t == lowercase(t));
      if (i > 0) CHECK(p.sentences[i] != p.sentences[i - 1]);
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("filtering does not depend on paragraph order") {
  std::vector<std::vector<std::string>> blocks = {valid_raw(4), valid_raw(3), valid_raw(6)};
  std::vector<bool> forward, backward;
  for (const auto& b : blocks) forward.push_back(filter_paragraph(b, default_tokenize).accepted());
  for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
    backward.insert(backward.begin(), filter_paragraph(*it, default_tokenize).accepted());
  }
  CHECK(forward == backward);
}

TEST_CASE("dedupe keeps first occurrences") {
  auto ps = testing::numbered_paragraphs(3);
  auto copy = ps[1];
  copy.id = "dup";
  ps.push_back(copy);
  std::vector<std::string> removed;
  const auto kept = dedupe(ps, &removed);
  CHECK(kept.size() == 3);
  CHECK(removed == std::vector<std::string>{"dup"});
}

TEST_CASE("split sizes follow floor arithmetic") {
  auto sizes = [](int n, std::uint64_t seed) {
    const auto s = split_corpus(testing::numbered_paragraphs(n), SplitSpec{seed});
    return std::array<std::size_t, 3>{s.train.size(), s.valid.size(), s.test.size()};
  };
  CHECK(sizes(20, 7) == std::array<std::size_t, 3>{18, 1, 1});
  CHECK(sizes(100, 1) == std::array<std::size_t, 3>{90, 5, 5});
  CHECK(sizes(1000, 3) == std::array<std::size_t, 3>{900, 50, 50});
  CHECK(sizes(39, 3) == std::array<std::size_t, 3>{37, 1, 1});
  CHECK_THROWS_AS(split_corpus(testing::numbered_paragraphs(19), SplitSpec{}), DataError);
}

TEST_CASE("split is a deterministic partition") {
  const auto ps = testing::numbered_paragraphs(57);
  const auto a = split_corpus(ps, SplitSpec{11});
  const auto b = split_corpus(ps, SplitSpec{11});
  CHECK(a.train == b.train);
  CHECK(a.valid == b.valid);
  CHECK(a.test == b.test);
  std::multiset<std::string> ids;
  for (const auto* part : {&a.train, &a.valid, &a.test}) {
    for (const auto& p : *part) ids.insert(p.id);
  }
  CHECK(ids.size() == ps.size());
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == ps.size());
  const auto c = split_corpus(ps, SplitSpec{12});
  CHECK((c.valid != a.valid || c.test != a.test));
}

TEST_CASE("split manifest round trip") {
  const auto ps = testing::numbered_paragraphs(25);
  const auto s = split_corpus(ps, SplitSpec{4});
  std::stringstream io;
  write_split_manifest(io, s, 4);
  const auto back = read_split_manifest(io, ps);
  CHECK(back.train == s.train);
  CHECK(back.valid == s.valid);
  CHECK(back.test == s.test);
  std::stringstream bad(R"({"seed":1,"train":["nope"],"valid":[],"test":[]})");
  CHECK_THROWS_AS(read_split_manifest(bad, ps), DataError);
}

TEST_CASE("vocabulary construction") {
  const auto p = testing::paragraph("a", {"ab aa c c c", "d e ab aa c"});
  const auto v = build_vocab({p});
  CHECK(v.size() == 5 + Vocab::kNumReserved);
  CHECK(v.token(Vocab::kNumReserved) == "c");
  CHECK(v.token(Vocab::kNumReserved + 1) == "aa");  // tie with "ab" broken lexicographically
  CHECK(v.token(Vocab::kNumReserved + 2) == "ab");

  const auto capped = build_vocab({p}, 2);
  CHECK(capped.size() == 2 + Vocab::kNumReserved);
  CHECK(capped.id("aa") != Vocab::kUnk);
  CHECK(capped.id("ab") == Vocab::kUnk);
  CHECK_THROWS_AS(build_vocab({}), DataError);
}

TEST_CASE("vocabulary cap at the default size") {
  Paragraph p{"big", Domain::kSynthetic, {}};
  Tokens sentence;
  for (int i = 0; i < 60001; ++i) {
    sentence.push_back("t" + std::to_string(i));
    // The first 50,000 tokens appear twice so the cut is unambiguous.
    if (i < kDefaultVocabSize) sentence.push_back("t" + std::to_string(i));
  }
  p.sentences.push_back(sentence);
  const auto v = build_vocab({p});
  CHECK(v.size() == kDefaultVocabSize + Vocab::kNumReserved);
  CHECK(v.id("t60000") == Vocab::kUnk);
  CHECK(v.id("t49999") != Vocab::kUnk);
}

TEST_CASE("encode and decode") {
  const auto v = build_vocab({testing::paragraph("a", {"x y z"})});
  const Tokens toks{"x", "q", "z"};
  const auto ids = v.encode(toks);
  CHECK(ids[1] == Vocab::kUnk);
  CHECK(v.decode(ids) == Tokens{"x", "<unk>", "z"});
  std::vector<int> all;
  for (int i = Vocab::kNumReserved; i < v.size(); ++i) all.push_back(i);
  CHECK(v.encode(v.decode(all)) == all);

  std::stringstream io;
  write_vocab(io, v);
  const auto back = read_vocab(io);
  CHECK(back.tokens() == v.tokens());
  CHECK(back.fingerprint() == v.fingerprint());
}

TEST_CASE("embedding loading") {
  const auto v = build_vocab({testing::paragraph("a", {"x y"})});
  std::stringstream full("x 1 2 3\ny 4 5 6\n");
  const auto t = load_embeddings(full, v, 3, 1);
  CHECK(t.loaded == 2);
  CHECK(t.vectors.row(v.id("y")).isApprox(Eigen::RowVector3d(4, 5, 6)));
  CHECK(t.vectors.row(Vocab::kPad).isZero(0));

  std::stringstream empty;
  const auto r = load_embeddings(empty, v, 3, 1);
  CHECK(r.loaded == 0);
  CHECK(r.vectors.row(Vocab::kPad).isZero(0));
  CHECK(r.vectors.cwiseAbs().maxCoeff() <= 0.1);
  CHECK(r.vectors.row(v.id("x")).norm() > 0);

  std::stringstream short_line("x 1 2\n");
  try {
    load_embeddings(short_line, v, 3, 1);
    FAIL("expected bad-dim");
  } catch (const DataError& e) {
    CHECK(e.code() == "bad-dim");
  }
}

TEST_CASE("corpus JSONL round trip") {
  std::vector<Paragraph> ps = {testing::paragraph("a", {"one two", "three"}, Domain::kScifi)};
  std::stringstream io;
  write_corpus(io, ps);
  CHECK(read_corpus(io) == ps);
}

TEST_CASE("raw block reader") {
  std::stringstream in("a.\nb.\n\n\n c. \n");
  const auto blocks = read_raw_blocks(in);
  REQUIRE(blocks.size() == 2);
  CHECK(blocks[0].size() == 2);
  CHECK(blocks[1].size() == 1);
}

}  // TEST_SUITE
