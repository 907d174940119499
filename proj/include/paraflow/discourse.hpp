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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paraflow/corpus.hpp"

namespace paraflow::discourse {

// Inclusive token range inside one sentence, 0-based within the paragraph.
struct EduSpan {
  int sentence = 0;
  int start = 0;
  int end = 0;

  bool operator==(const EduSpan&) const = default;
};

enum class Nuclearity { kNucleus, kSatellite };

// A leaf holds `span`; an internal node holds `relation` and >= 2 children.
// `nuclearity` is the node's role inside its parent (the root's is unused).
struct RstNode {
  Nuclearity nuclearity = Nuclearity::kNucleus;
  std::string relation;
  std::optional<EduSpan> span;
  std::vector<RstNode> children;

  bool is_leaf() const { return span.has_value(); }
  bool operator==(const RstNode&) const = default;
};

struct RstTree {
  RstNode root;

  std::vector<EduSpan> edus() const;
  int edu_count() const { return static_cast<int>(edus().size()); }
  bool operator==(const RstTree&) const = default;
};

// Entry k is the relation across the boundary between EDU k and EDU k+1;
// nullopt marks an excluded (nucleus-after-satellite) boundary.
using FlatRelationSeq = std::vector<std::optional<std::string>>;

// Per-token label ids for one sentence; 0 is the null label.
using LabelSeq = std::vector<int>;

class RelationInventory {
 public:
  static constexpr int kNull = 0;
  static constexpr std::string_view kNullName = "o";

  RelationInventory();
  explicit RelationInventory(std::vector<std::string> names_without_null);

  int size() const { return static_cast<int>(names_.size()); }
  std::optional<int> find(std::string_view relation) const;
  const std::string& name(int id) const { return names_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
};

// Grammar, whitespace-insensitive between tokens:
//   tree  := node | span
//   node  := "(" RELATION child child+ ")"
//   child := "(" NUC " " (span | node) ")"      NUC in {N, S}
//   span  := SENT ":" START "-" END
// Throws DataError("parse") on malformed text. With `paragraph`, also
// requires the leaves to tile the paragraph's tokens (DataError("align")).
RstTree parse_tree(std::string_view text, const Paragraph* paragraph = nullptr);
std::string render(const RstTree& tree);

// Checks the leaf tiling against the paragraph; throws DataError("align").
void check_alignment(const RstTree& tree, const Paragraph& paragraph);

// Tree file records: "id<TAB>bracketed tree" per line.
// With `unparsed`, records whose tree fails to parse are skipped and their
// ids collected; otherwise the first failure throws.
std::map<std::string, RstTree> read_tree_file(std::istream& in,
                                              std::vector<std::string>* unparsed = nullptr);
void write_tree_file(std::ostream& out, const std::vector<std::pair<std::string, RstTree>>& trees);

FlatRelationSeq flatten(const RstTree& tree);

enum class LabelMode { kTrain, kEval };

// Places each boundary relation on the first token of the EDU that follows
// the boundary. Unknown relations throw DataError("unknown-relation") in
// kTrain mode and map to the null label in kEval mode.
std::vector<LabelSeq> project_labels(const Paragraph& paragraph, const RstTree& tree,
                                     const FlatRelationSeq& flat,
                                     const RelationInventory& inventory,
                                     LabelMode mode = LabelMode::kTrain);

struct AttachResult {
  std::vector<Paragraph> kept;
  std::vector<std::pair<std::string, RstTree>> trees;  // aligned with `kept`
  std::vector<std::string> unparsed;                   // ids dropped
};

// Pairs paragraphs with their tree records. Paragraphs without a record or
// whose tree does not tile the paragraph are dropped as unparsed.
AttachResult attach_trees(const std::vector<Paragraph>& paragraphs,
                          const std::map<std::string, RstTree>& trees);

RelationInventory build_inventory(const std::vector<RstTree>& train_trees);

void write_inventory(std::ostream& out, const RelationInventory& inventory);
RelationInventory read_inventory(std::istream& in);

inline constexpr std::array<std::string_view, 6> kStubRelations = {
    "Elaboration", "Attribution", "Background", "Contrast", "Cause", "Temporal"};

// Right-branching tree with one EDU per sentence and the nucleus on the
// left; relations[k] joins sentence k to the rest of the paragraph.
RstTree chain_tree(const Paragraph& paragraph, const std::vector<std::string>& relations);

// chain_tree with relations taken round-robin from kStubRelations,
// starting at seed % 6.
RstTree stub_parse(const Paragraph& paragraph, std::uint64_t seed);

}  // namespace paraflow::discourse
