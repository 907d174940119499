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
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace paraflow {

using Tokens = std::vector<std::string>;

enum class Domain { kPapers, kScifi, kFantasy, kSynthetic };

std::string_view domain_name(Domain d);
Domain parse_domain(std::string_view name);

// A tokenized paragraph. Tokens are lowercased UTF-8 strings.
struct Paragraph {
  std::string id;
  Domain domain = Domain::kSynthetic;
  std::vector<Tokens> sentences;

  bool operator==(const Paragraph&) const = default;
};

inline constexpr int kMinSentences = 4;
inline constexpr int kMaxSentences = 7;
inline constexpr int kMinSentenceTokens = 5;
inline constexpr int kMaxSentenceTokens = 25;

// Splits one sentence into tokens. Case must be preserved: the capitalized
// ending rule inspects raw case before tokens are lowercased.
using Tokenizer = std::function<Tokens(std::string_view)>;

// Whitespace split, then every ASCII punctuation character becomes its own
// token, except apostrophes and hyphens between word characters.
Tokens default_tokenize(std::string_view sentence);

std::string lowercase(std::string_view s);

// First failing rule wins, checked in declaration order.
enum class RejectReason {
  kParagraphLength,
  kTokenizeError,
  kSentenceLength,
  kAdjacentIdentical,
  kCapsEnding,
  kNoEndMark,
  kDuplicate,   // corpus-level, see dedupe()
  kUnparsed,    // discourse ingest, see discourse::attach_trees()
};

std::string_view reason_code(RejectReason r);

struct FilterResult {
  std::optional<Paragraph> paragraph;
  std::optional<RejectReason> reason;

  bool accepted() const { return paragraph.has_value(); }
};

FilterResult filter_paragraph(const std::vector<std::string>& raw, const Tokenizer& tokenize,
                              std::string id = {}, Domain domain = Domain::kSynthetic);

// True when the final two alphabetic tokens are entirely uppercase.
bool has_caps_ending(const Tokens& cased_tokens);
// Raw-string check against {. ! ? ." !" ?"} after trailing whitespace.
bool has_end_mark(std::string_view raw_sentence);

// Keeps the first occurrence of each sentence sequence; ids of removed
// paragraphs are appended to `removed`.
std::vector<Paragraph> dedupe(std::vector<Paragraph> paragraphs,
                              std::vector<std::string>* removed = nullptr);

struct SplitSpec {
  std::uint64_t seed = 0;
  double train = 0.9;
  double valid = 0.05;
  double test = 0.05;
};

struct Split {
  std::vector<Paragraph> train;
  std::vector<Paragraph> valid;
  std::vector<Paragraph> test;
};

inline constexpr std::size_t kMinSplitParagraphs = 20;

// Valid and test sizes are floor(n * ratio); the remainder goes to train.
Split split_corpus(const std::vector<Paragraph>& paragraphs, const SplitSpec& spec);

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kBos = 2;
  static constexpr int kEos = 3;
  static constexpr int kSep = 4;
  static constexpr int kEop = 5;
  static constexpr int kNumReserved = 6;

  Vocab();
  explicit Vocab(const std::vector<std::string>& tokens_in_id_order);

  int size() const { return static_cast<int>(tokens_.size()); }
  int id(std::string_view token) const;
  const std::string& token(int id) const;
  static bool is_reserved(int id) { return id >= 0 && id < kNumReserved; }

  std::vector<int> encode(const Tokens& tokens) const;
  Tokens decode(const std::vector<int>& ids) const;

  const std::vector<std::string>& tokens() const { return tokens_; }
  std::uint64_t fingerprint() const;

 private:
  void append(std::string token);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

inline constexpr int kDefaultVocabSize = 50000;

// Most frequent first, ties lexicographic. `max_size` excludes reserved ids.
Vocab build_vocab(const std::vector<Paragraph>& train, int max_size = kDefaultVocabSize);

void write_vocab(std::ostream& out, const Vocab& vocab);
Vocab read_vocab(std::istream& in);

struct EmbeddingTable {
  int dimension = 0;
  Eigen::MatrixXd vectors;  // vocab.size() x dimension
  int loaded = 0;           // rows taken from the file
};

inline constexpr int kDefaultEmbeddingDim = 300;

// Text format "token v1 ... vD" per line. Rows missing from the file get
// seeded uniform(-0.1, 0.1) values; PAD is always zero.
EmbeddingTable load_embeddings(std::istream& in, const Vocab& vocab, int dimension,
                               std::uint64_t seed);
EmbeddingTable random_embeddings(const Vocab& vocab, int dimension, std::uint64_t seed);

// JSON lines {id, domain, sentences}.
void write_corpus(std::ostream& out, const std::vector<Paragraph>& paragraphs);
std::vector<Paragraph> read_corpus(std::istream& in);

// Split manifest JSON {seed, train: [ids], valid: [ids], test: [ids]}.
void write_split_manifest(std::ostream& out, const Split& split, std::uint64_t seed);
// Rebuilds the partition from a manifest; unknown ids raise DataError.
Split read_split_manifest(std::istream& in, const std::vector<Paragraph>& corpus);

// Blank-line separated blocks, one sentence per line.
std::vector<std::vector<std::string>> read_raw_blocks(std::istream& in);

}  // namespace paraflow
