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

#include "paraflow/discourse.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <ostream>
#include <set>

#include "paraflow/error.hpp"

namespace paraflow::discourse {

namespace {

void collect_edus(const RstNode& node, std::vector<EduSpan>& out) {
  if (node.is_leaf()) {
    out.push_back(*node.span);
    return;
  }
  for (const auto& c : node.children) collect_edus(c, out);
}

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  RstTree parse() {
    RstTree tree;
    skip_ws();
    if (peek() == '(') {
      tree.root = node();
    } else {
      tree.root.span = span(atom());
    }
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return tree;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw DataError("parse", "tree parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string_view atom() {
    skip_ws();
    const auto begin = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos_;
    }
    if (pos_ == begin) fail("expected a name");
    return text_.substr(begin, pos_ - begin);
  }

  EduSpan span(std::string_view s) {
    EduSpan out;
    auto read_int = [&](std::string_view& rest, char stop, int& value) {
      const auto cut = stop ? rest.find(stop) : rest.size();
      if (cut == std::string_view::npos) fail("bad span '" + std::string(s) + "'");
      const auto part = rest.substr(0, cut);
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
      if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
        fail("bad span '" + std::string(s) + "'");
      }
      rest.remove_prefix(stop ? cut + 1 : cut);
    };
    std::string_view rest = s;
    read_int(rest, ':', out.sentence);
    read_int(rest, '-', out.start);
    read_int(rest, '\0', out.end);
    if (out.sentence < 0 || out.start < 0 || out.end < out.start) {
      fail("empty or negative span '" + std::string(s) + "'");
    }
    return out;
  }

  RstNode node() {
    expect('(');
    RstNode n;
    n.relation = std::string(atom());
    while (peek() == '(') n.children.push_back(child());
    expect(')');
    if (n.children.size() < 2) fail("relation '" + n.relation + "' needs at least two children");
    const bool has_nucleus = std::any_of(n.children.begin(), n.children.end(), [](const auto& c) {
      return c.nuclearity == Nuclearity::kNucleus;
    });
    if (!has_nucleus) fail("relation '" + n.relation + "' has no nucleus");
    return n;
  }

  RstNode child() {
    expect('(');
    const auto nuc = atom();
    Nuclearity nuclearity;
    if (nuc == "N") {
      nuclearity = Nuclearity::kNucleus;
    } else if (nuc == "S") {
      nuclearity = Nuclearity::kSatellite;
    } else {
      fail("expected N or S, got '" + std::string(nuc) + "'");
    }
    RstNode c;
    if (peek() == '(') {
      c = node();
    } else {
      c.span = span(atom());
    }
    c.nuclearity = nuclearity;
    expect(')');
    return c;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void check_tiling(const std::vector<EduSpan>& edus) {
  for (std::size_t i = 1; i < edus.size(); ++i) {
    const auto& a = edus[i - 1];
    const auto& b = edus[i];
    const bool same_sentence = b.sentence == a.sentence && b.start == a.end + 1;
    const bool next_sentence = b.sentence == a.sentence + 1 && b.start == 0;
    if (!same_sentence && !next_sentence) {
      throw DataError("align", "EDU " + std::to_string(i) + " does not follow EDU " +
                                   std::to_string(i - 1) + " contiguously");
    }
  }
}

void render_node(const RstNode& n, std::string& out) {
  if (n.is_leaf()) {
    out += std::to_string(n.span->sentence) + ":" + std::to_string(n.span->start) + "-" +
           std::to_string(n.span->end);
    return;
  }
  out += "(" + n.relation;
  for (const auto& c : n.children) {
    out += c.nuclearity == Nuclearity::kNucleus ? " (N " : " (S ";
    render_node(c, out);
    out += ")";
  }
  out += ")";
}

// Returns the EDU index range [first, last] covered by `n`.
std::pair<int, int> flatten_node(const RstNode& n, int first_edu, FlatRelationSeq& out) {
  if (n.is_leaf()) return {first_edu, first_edu};
  std::vector<std::pair<int, int>> ranges;
  int next = first_edu;
  for (const auto& c : n.children) {
    ranges.push_back(flatten_node(c, next, out));
    next = ranges.back().second + 1;
  }
  int nucleus_start = -1;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (n.children[i].nuclearity == Nuclearity::kNucleus) {
      nucleus_start = ranges[i].first;
      break;
    }
  }
  // A boundary between two children of `n` has `n` as the lowest node
  // spanning both sides, so nothing deeper can claim it.
  for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
    const int boundary = ranges[i].second;
    if (nucleus_start > boundary) {
      out[static_cast<std::size_t>(boundary)] = std::nullopt;
    } else {
      out[static_cast<std::size_t>(boundary)] = n.relation;
    }
  }
  return {first_edu, next - 1};
}

void collect_relations(const RstNode& n, std::set<std::string>& out) {
  if (n.is_leaf()) return;
  out.insert(n.relation);
  for (const auto& c : n.children) collect_relations(c, out);
}

}  // namespace

std::vector<EduSpan> RstTree::edus() const {
  std::vector<EduSpan> out;
  collect_edus(root, out);
  return out;
}

RelationInventory::RelationInventory() : names_{std::string(kNullName)} {}

RelationInventory::RelationInventory(std::vector<std::string> names_without_null)
    : RelationInventory() {
  for (auto& n : names_without_null) {
    if (n == kNullName || find(n)) throw DataError("inventory", "duplicate relation '" + n + "'");
    names_.push_back(std::move(n));
  }
}

std::optional<int> RelationInventory::find(std::string_view relation) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == relation) return static_cast<int>(i);
  }
  return std::nullopt;
}

RstTree parse_tree(std::string_view text, const Paragraph* paragraph) {
  RstTree tree = TreeParser(text).parse();
  check_tiling(tree.edus());
  if (paragraph) check_alignment(tree, *paragraph);
  return tree;
}

void check_alignment(const RstTree& tree, const Paragraph& paragraph) {
  const auto edus = tree.edus();
  check_tiling(edus);
  const auto& sents = paragraph.sentences;
  if (edus.front().sentence != 0 || edus.front().start != 0) {
    throw DataError("align", "first EDU must start at 0:0");
  }
  for (std::size_t i = 0; i < edus.size(); ++i) {
    const auto& e = edus[i];
    if (e.sentence >= static_cast<int>(sents.size()) ||
        e.end >= static_cast<int>(sents[static_cast<std::size_t>(e.sentence)].size())) {
      throw DataError("align", "EDU " + std::to_string(i) + " exceeds the paragraph's tokens");
    }
    const bool leaves_sentence = i + 1 == edus.size() || edus[i + 1].sentence != e.sentence;
    if (leaves_sentence &&
        e.end + 1 != static_cast<int>(sents[static_cast<std::size_t>(e.sentence)].size())) {
      throw DataError("align", "EDU " + std::to_string(i) + " leaves tokens of sentence " +
                                   std::to_string(e.sentence) + " uncovered");
    }
  }
  if (edus.back().sentence + 1 != static_cast<int>(sents.size())) {
    throw DataError("align", "tree does not cover every sentence");
  }
}

std::string render(const RstTree& tree) {
  std::string out;
  render_node(tree.root, out);
  return out;
}

std::map<std::string, RstTree> read_tree_file(std::istream& in,
                                              std::vector<std::string>* unparsed) {
  std::map<std::string, RstTree> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("parse", "tree file line " + std::to_string(line_no) + " has no TAB");
    }
    auto id = line.substr(0, tab);
    try {
      out.insert_or_assign(id, parse_tree(std::string_view(line).substr(tab + 1)));
    } catch (const DataError&) {
      if (!unparsed) throw;
      out.erase(id);
      unparsed->push_back(std::move(id));
    }
  }
  return out;
}

void write_tree_file(std::ostream& out,
                     const std::vector<std::pair<std::string, RstTree>>& trees) {
  for (const auto& [id, tree] : trees) out << id << '\t' << render(tree) << '\n';
}

FlatRelationSeq flatten(const RstTree& tree) {
  const int e = tree.edu_count();
  FlatRelationSeq out(static_cast<std::size_t>(std::max(0, e - 1)));
  flatten_node(tree.root, 0, out);
  return out;
}

std::vector<LabelSeq> project_labels(const Paragraph& paragraph, const RstTree& tree,
                                     const FlatRelationSeq& flat,
                                     const RelationInventory& inventory, LabelMode mode) {
  check_alignment(tree, paragraph);
  const auto edus = tree.edus();
  if (flat.size() + 1 != edus.size()) {
    throw DataError("align", "flattened sequence length does not match the tree's EDUs");
  }
  std::vector<LabelSeq> labels;
  labels.reserve(paragraph.sentences.size());
  for (const auto& s : paragraph.sentences) labels.emplace_back(s.size(), RelationInventory::kNull);

  for (std::size_t k = 0; k < flat.size(); ++k) {
    if (!flat[k]) continue;
    int id = RelationInventory::kNull;
    if (auto found = inventory.find(*flat[k])) {
      id = *found;
    } else if (mode == LabelMode::kTrain) {
      throw DataError("unknown-relation", "relation '" + *flat[k] + "' is not in the inventory");
    }
    const auto& next = edus[k + 1];
    labels[static_cast<std::size_t>(next.sentence)][static_cast<std::size_t>(next.start)] = id;
  }
  return labels;
}

RelationInventory build_inventory(const std::vector<RstTree>& train_trees) {
  std::set<std::string> names;
  for (const auto& t : train_trees) collect_relations(t.root, names);
  names.erase(std::string(RelationInventory::kNullName));
  return RelationInventory(std::vector<std::string>(names.begin(), names.end()));
}

void write_inventory(std::ostream& out, const RelationInventory& inventory) {
  for (const auto& n : inventory.names()) out << n << '\n';
}

RelationInventory read_inventory(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) names.push_back(line);
  }
  if (names.empty() || names.front() != RelationInventory::kNullName) {
    throw DataError("inventory", "inventory file must start with the null label");
  }
  names.erase(names.begin());
  return RelationInventory(std::move(names));
}

AttachResult attach_trees(const std::vector<Paragraph>& paragraphs,
                          const std::map<std::string, RstTree>& trees) {
  AttachResult out;
  for (const auto& p : paragraphs) {
    const auto it = trees.find(p.id);
    if (it == trees.end()) {
      out.unparsed.push_back(p.id);
      continue;
    }
    try {
      check_alignment(it->second, p);
    } catch (const DataError&) {
      out.unparsed.push_back(p.id);
      continue;
    }
    out.kept.push_back(p);
    out.trees.emplace_back(p.id, it->second);
  }
  return out;
}

RstTree chain_tree(const Paragraph& paragraph, const std::vector<std::string>& relations) {
  const auto m = paragraph.sentences.size();
  if (m == 0) throw DataError("empty", "cannot build a tree for an empty paragraph");
  if (relations.size() + 1 != m) {
    throw DataError("align", "chain_tree needs one relation per sentence boundary");
  }
  auto leaf = [&](std::size_t i, Nuclearity nuc) {
    RstNode n;
    n.nuclearity = nuc;
    n.span = EduSpan{static_cast<int>(i), 0, static_cast<int>(paragraph.sentences[i].size()) - 1};
    return n;
  };
  // Build bottom-up: the deepest node joins the last two sentences.
  RstNode right = leaf(m - 1, Nuclearity::kSatellite);
  for (std::size_t k = m - 1; k-- > 0;) {
    RstNode n;
    n.nuclearity = Nuclearity::kSatellite;
    n.relation = relations[k];
    n.children.push_back(leaf(k, Nuclearity::kNucleus));
    n.children.push_back(std::move(right));
    right = std::move(n);
  }
  right.nuclearity = Nuclearity::kNucleus;
  return RstTree{std::move(right)};
}

RstTree stub_parse(const Paragraph& paragraph, std::uint64_t seed) {
  std::vector<std::string> relations;
  for (std::size_t k = 0; k + 1 < paragraph.sentences.size(); ++k) {
    relations.emplace_back(kStubRelations[(seed + k) % kStubRelations.size()]);
  }
  return chain_tree(paragraph, relations);
}

}  // namespace paraflow::discourse
