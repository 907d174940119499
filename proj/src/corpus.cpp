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

#include "paraflow/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "paraflow/error.hpp"
#include "paraflow/hash.hpp"

namespace paraflow {

using nlohmann::json;

std::string_view domain_name(Domain d) {
  switch (d) {
    case Domain::kPapers: return "papers";
    case Domain::kScifi: return "scifi";
    case Domain::kFantasy: return "fantasy";
    case Domain::kSynthetic: return "synthetic";
  }
  return "synthetic";
}

Domain parse_domain(std::string_view name) {
  if (name == "papers") return Domain::kPapers;
  if (name == "scifi") return Domain::kScifi;
  if (name == "fantasy") return Domain::kFantasy;
  if (name == "synthetic") return Domain::kSynthetic;
  throw DataError("domain", "unknown domain '" + std::string(name) + "'");
}

namespace {

bool is_ascii_punct(unsigned char c) { return c < 128 && std::ispunct(c); }
bool is_word_char(unsigned char c) { return c >= 128 || std::isalnum(c); }

}  // namespace

Tokens default_tokenize(std::string_view sentence) {
  Tokens out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    const auto c = static_cast<unsigned char>(sentence[i]);
    if (std::isspace(c)) {
      flush();
    } else if (is_ascii_punct(c)) {
      const bool joiner = (c == '\'' || c == '-') && !current.empty() &&
                          i + 1 < sentence.size() &&
                          is_word_char(static_cast<unsigned char>(sentence[i + 1]));
      if (joiner) {
        current.push_back(static_cast<char>(c));
      } else {
        flush();
        out.emplace_back(1, static_cast<char>(c));
      }
    } else {
      current.push_back(static_cast<char>(c));
    }
  }
  flush();
  return out;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 128) ch = static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string_view reason_code(RejectReason r) {
  switch (r) {
    case RejectReason::kTokenizeError: return "tokenize-error";
    case RejectReason::kParagraphLength: return "paragraph-length";
    case RejectReason::kSentenceLength: return "sentence-length";
    case RejectReason::kAdjacentIdentical: return "adjacent-identical";
    case RejectReason::kCapsEnding: return "caps-ending";
    case RejectReason::kNoEndMark: return "no-end-mark";
    case RejectReason::kDuplicate: return "duplicate-paragraph";
    case RejectReason::kUnparsed: return "unparsed";
  }
  return "unknown";
}

bool has_caps_ending(const Tokens& cased_tokens) {
  int seen = 0;
  for (auto it = cased_tokens.rbegin(); it != cased_tokens.rend() && seen < 2; ++it) {
    bool has_alpha = false;
    bool all_upper = true;
    for (unsigned char c : *it) {
      if (c < 128 && std::isalpha(c)) {
        has_alpha = true;
        if (!std::isupper(c)) all_upper = false;
      }
    }
    if (!has_alpha) continue;
    if (!all_upper) return false;
    ++seen;
  }
  return seen >= 2;
}

bool has_end_mark(std::string_view raw_sentence) {
  while (!raw_sentence.empty() &&
         std::isspace(static_cast<unsigned char>(raw_sentence.back()))) {
    raw_sentence.remove_suffix(1);
  }
  static constexpr std::string_view kMarks[] = {".\"", "!\"", "?\"", ".", "!", "?"};
  return std::any_of(std::begin(kMarks), std::end(kMarks),
                     [&](std::string_view m) { return raw_sentence.ends_with(m); });
}

FilterResult filter_paragraph(const std::vector<std::string>& raw, const Tokenizer& tokenize,
                              std::string id, Domain domain) {
  auto reject = [](RejectReason r) { return FilterResult{std::nullopt, r}; };

  const auto m = static_cast<int>(raw.size());
  if (m < kMinSentences || m > kMaxSentences) return reject(RejectReason::kParagraphLength);

  std::vector<Tokens> cased;
  cased.reserve(raw.size());
  try {
    for (const auto& s : raw) cased.push_back(tokenize(s));
  } catch (const std::exception&) {
    return reject(RejectReason::kTokenizeError);
  }

  for (const auto& toks : cased) {
    const auto n = static_cast<int>(toks.size());
    if (n < kMinSentenceTokens || n > kMaxSentenceTokens) {
      return reject(RejectReason::kSentenceLength);
    }
  }

  Paragraph p{std::move(id), domain, {}};
  p.sentences.reserve(cased.size());
  for (const auto& toks : cased) {
    Tokens lower;
    lower.reserve(toks.size());
    for (const auto& t : toks) lower.push_back(lowercase(t));
    p.sentences.push_back(std::move(lower));
  }
  for (std::size_t i = 1; i < p.sentences.size(); ++i) {
    if (p.sentences[i] == p.sentences[i - 1]) return reject(RejectReason::kAdjacentIdentical);
  }

  if (has_caps_ending(cased.back())) return reject(RejectReason::kCapsEnding);
  if (!has_end_mark(raw.back())) return reject(RejectReason::kNoEndMark);

  return FilterResult{std::move(p), std::nullopt};
}

std::vector<Paragraph> dedupe(std::vector<Paragraph> paragraphs,
                              std::vector<std::string>* removed) {
  std::set<std::vector<Tokens>> seen;
  std::vector<Paragraph> kept;
  kept.reserve(paragraphs.size());
  for (auto& p : paragraphs) {
    if (seen.insert(p.sentences).second) {
      kept.push_back(std::move(p));
    } else if (removed) {
      removed->push_back(p.id);
    }
  }
  return kept;
}

Split split_corpus(const std::vector<Paragraph>& paragraphs, const SplitSpec& spec) {
  if (paragraphs.size() < kMinSplitParagraphs) {
    throw DataError("too-small", "split needs at least " + std::to_string(kMinSplitParagraphs) +
                                     " paragraphs, got " + std::to_string(paragraphs.size()));
  }
  if (std::abs(spec.train + spec.valid + spec.test - 1.0) > 1e-9 || spec.train < 0 ||
      spec.valid < 0 || spec.test < 0) {
    throw DataError("ratios", "split ratios must be nonnegative and sum to 1");
  }
  const std::size_t n = paragraphs.size();
  const auto n_valid = static_cast<std::size_t>(std::floor(n * spec.valid + 1e-9));
  const auto n_test = static_cast<std::size_t>(std::floor(n * spec.test + 1e-9));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(spec.seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto take = [&](std::size_t from, std::size_t count) {
    std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(from),
                                 order.begin() + static_cast<std::ptrdiff_t>(from + count));
    std::sort(idx.begin(), idx.end());
    std::vector<Paragraph> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(paragraphs[i]);
    return out;
  };
  Split split;
  split.valid = take(0, n_valid);
  split.test = take(n_valid, n_test);
  split.train = take(n_valid + n_test, n - n_valid - n_test);
  return split;
}

Vocab::Vocab() {
  for (const char* t : {"<pad>", "<unk>", "<s>", "</s>", "<sep>", "<eop>"}) append(t);
}

Vocab::Vocab(const std::vector<std::string>& tokens_in_id_order) : Vocab() {
  if (tokens_in_id_order.size() < static_cast<std::size_t>(kNumReserved)) {
    throw DataError("vocab", "vocabulary is missing reserved entries");
  }
  for (int i = 0; i < kNumReserved; ++i) {
    if (tokens_in_id_order[static_cast<std::size_t>(i)] != tokens_[static_cast<std::size_t>(i)]) {
      throw DataError("vocab", "reserved entry mismatch at id " + std::to_string(i));
    }
  }
  for (std::size_t i = kNumReserved; i < tokens_in_id_order.size(); ++i) {
    if (index_.contains(tokens_in_id_order[i])) {
      throw DataError("vocab", "duplicate vocabulary entry '" + tokens_in_id_order[i] + "'");
    }
    append(tokens_in_id_order[i]);
  }
}

void Vocab::append(std::string token) {
  index_.emplace(token, size());
  tokens_.push_back(std::move(token));
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) throw DataError("vocab", "token id out of range");
  return tokens_[static_cast<std::size_t>(id)];
}

std::vector<int> Vocab::encode(const Tokens& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

Tokens Vocab::decode(const std::vector<int>& ids) const {
  Tokens out;
  out.reserve(ids.size());
  for (int i : ids) out.push_back(token(i));
  return out;
}

std::uint64_t Vocab::fingerprint() const {
  std::uint64_t h = fnv1a64("");
  for (const auto& t : tokens_) {
    h = fnv1a64(t, h);
    h = fnv1a64("\n", h);
  }
  return h;
}

Vocab build_vocab(const std::vector<Paragraph>& train, int max_size) {
  std::map<std::string, long> counts;
  for (const auto& p : train) {
    for (const auto& s : p.sentences) {
      for (const auto& t : s) ++counts[t];
    }
  }
  if (counts.empty()) throw DataError("empty", "cannot build a vocabulary from an empty corpus");

  std::vector<std::pair<std::string, long>> ranked(counts.begin(), counts.end());
  // `counts` iterates lexicographically, so a stable sort on frequency keeps
  // ties in lexicographic order.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens = Vocab().tokens();
  for (const auto& [tok, n] : ranked) {
    if (static_cast<int>(tokens.size()) - Vocab::kNumReserved >= max_size) break;
    if (Vocab().id(tok) != Vocab::kUnk) continue;  // never shadow a reserved token
    tokens.push_back(tok);
  }
  return Vocab(tokens);
}

void write_vocab(std::ostream& out, const Vocab& vocab) {
  for (const auto& t : vocab.tokens()) out << t << '\n';
}

Vocab read_vocab(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return Vocab(tokens);
}

EmbeddingTable random_embeddings(const Vocab& vocab, int dimension, std::uint64_t seed) {
  EmbeddingTable table;
  table.dimension = dimension;
  table.vectors.resize(vocab.size(), dimension);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-0.1, 0.1);
  for (int r = 0; r < vocab.size(); ++r) {
    for (int c = 0; c < dimension; ++c) table.vectors(r, c) = uni(rng);
  }
  table.vectors.row(Vocab::kPad).setZero();
  return table;
}

EmbeddingTable load_embeddings(std::istream& in, const Vocab& vocab, int dimension,
                               std::uint64_t seed) {
  EmbeddingTable table = random_embeddings(vocab, dimension, seed);
  std::vector<bool> filled(static_cast<std::size_t>(vocab.size()), false);
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(dimension));
    double v = 0;
    while (fields >> v) values.push_back(v);
    if (!fields.eof()) {
      throw DataError("bad-value", "non-numeric value on embedding line " + std::to_string(line_no));
    }
    if (static_cast<int>(values.size()) != dimension) {
      throw DataError("bad-dim", "embedding line " + std::to_string(line_no) + " has " +
                                     std::to_string(values.size()) + " values, expected " +
                                     std::to_string(dimension));
    }
    const int id = vocab.id(token);
    if (id == Vocab::kUnk && token != vocab.token(Vocab::kUnk)) continue;
    if (id == Vocab::kPad || filled[static_cast<std::size_t>(id)]) continue;
    for (int c = 0; c < dimension; ++c) table.vectors(id, c) = values[static_cast<std::size_t>(c)];
    filled[static_cast<std::size_t>(id)] = true;
    ++table.loaded;
  }
  return table;
}

void write_corpus(std::ostream& out, const std::vector<Paragraph>& paragraphs) {
  for (const auto& p : paragraphs) {
    json j{{"id", p.id}, {"domain", domain_name(p.domain)}, {"sentences", p.sentences}};
    out << j.dump() << '\n';
  }
}

std::vector<Paragraph> read_corpus(std::istream& in) {
  std::vector<Paragraph> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      Paragraph p;
      p.id = j.at("id").get<std::string>();
      p.domain = parse_domain(j.at("domain").get<std::string>());
      p.sentences = j.at("sentences").get<std::vector<Tokens>>();
      out.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw DataError("corpus", "corpus line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_split_manifest(std::ostream& out, const Split& split, std::uint64_t seed) {
  auto ids = [](const std::vector<Paragraph>& ps) {
    std::vector<std::string> v;
    v.reserve(ps.size());
    for (const auto& p : ps) v.push_back(p.id);
    return v;
  };
  json j{{"seed", seed}, {"train", ids(split.train)}, {"valid", ids(split.valid)},
         {"test", ids(split.test)}};
  out << j.dump(2) << '\n';
}

Split read_split_manifest(std::istream& in, const std::vector<Paragraph>& corpus) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError("split", std::string("bad split manifest: ") + e.what());
  }
  std::unordered_map<std::string, const Paragraph*> by_id;
  for (const auto& p : corpus) by_id.emplace(p.id, &p);
  auto collect = [&](const char* key) {
    std::vector<Paragraph> out;
    for (const auto& id : j.at(key).get<std::vector<std::string>>()) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw DataError("split", "split manifest names unknown id " + id);
      out.push_back(*it->second);
    }
    return out;
  };
  return Split{collect("train"), collect("valid"), collect("test")};
}

std::vector<std::vector<std::string>> read_raw_blocks(std::istream& in) {
  std::vector<std::vector<std::string>> blocks;
  std::vector<std::string> current;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(line);
    }
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  return blocks;
}

}  // namespace paraflow
