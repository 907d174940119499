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

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"
#include "paraflow/discourse.hpp"
#include "paraflow/error.hpp"

using namespace paraflow;
using namespace paraflow::discourse;

namespace {

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

const Paragraph kTwoSentences = testing::paragraph("p", {"a b c d e f", "g h i j k"});

}  // namespace

TEST_SUITE("discourse") {

TEST_CASE("parse and render round trip") {
  const std::string text = "(Elaboration (N 0:0-2) (S (Attribution (S 0:3-5) (N 1:0-4))))";
  const auto tree = parse_tree(text, &kTwoSentences);
  CHECK(render(tree) == text);
  CHECK(tree.edu_count() == 3);
  CHECK(parse_tree(render(tree)) == tree);
}

TEST_CASE("malformed trees") {
  CHECK(error_code([] { parse_tree("(Elaboration (N 0:0-2) (S 0:3-5)"); }) == "parse");
  CHECK(error_code([] { parse_tree("(Elaboration (S 0:0-2) (S 0:3-5))"); }) == "parse");
  CHECK(error_code([] { parse_tree("(Elaboration (N 0:0-2))"); }) == "parse");
  CHECK(error_code([] { parse_tree("(Elaboration (X 0:0-2) (N 0:3-5))"); }) == "parse");
  CHECK(error_code([] { parse_tree("(Elaboration (N 0:0-2) (N 0:4-5))"); }) == "align");
  const auto p = testing::paragraph("p", {"a b c d e f g h i j"});
  CHECK(error_code([&] { parse_tree("(Joint (N 0:0-5) (N 0:6-11))", &p); }) == "align");
  CHECK(error_code([&] { parse_tree("(Joint (N 0:0-5) (N 0:6-8))", &p); }) == "align");
}

TEST_CASE("tree file reading keeps going past bad lines when asked") {
  std::stringstream in("a\t(Joint (N 0:0-1) (N 1:0-1))\nb\t(Joint (N 0:0-1)\n\nc\t0:0-3\n");
  std::vector<std::string> unparsed;
  const auto trees = read_tree_file(in, &unparsed);
  CHECK(trees.size() == 2);
  CHECK(unparsed == std::vector<std::string>{"b"});
  std::stringstream again(in.str());
  CHECK_THROWS_AS(read_tree_file(again), DataError);
}

TEST_CASE("flatten applies depth and exclusion rules") {
  // Boundary 0 lies inside the Attribution node (deeper), boundary 1 belongs
  // to the root whose nucleus is on the left.
  auto t = parse_tree("(Elaboration (N (Attribution (S 0:0-2) (N 0:3-5))) (S 1:0-4))");
  CHECK(flatten(t) == FlatRelationSeq{std::nullopt, std::string("Elaboration")});
  t = parse_tree("(Background (S 0:0-5) (N 1:0-4))");
  CHECK(flatten(t) == FlatRelationSeq{std::nullopt});
  t = parse_tree("(Joint (N 0:0-1) (N 0:2-3) (N 0:4-5))");
  CHECK(flatten(t) == FlatRelationSeq{std::string("Joint"), std::string("Joint")});
  // n-ary node whose first nucleus sits between the two boundaries.
  t = parse_tree("(List (S 0:0-1) (N 0:2-3) (S 0:4-5))");
  CHECK(flatten(t) == FlatRelationSeq{std::nullopt, std::string("List")});
  CHECK(flatten(parse_tree("0:0-3")).empty());
}

TEST_CASE("flatten matches the boundary walk on every shape over four EDUs") {
  std::mt19937_64 rng(2);
  const auto shapes = oracle::binary_shapes(4);
  CHECK(shapes.size() == 5);
  for (auto tree : shapes) {
    for (int trial = 0; trial < 20; ++trial) {
      oracle::decorate(tree.root, rng);
      const auto flat = flatten(tree);
      CHECK(flat.size() == 3);
      CHECK(flat == oracle::flatten_walk(tree));
    }
  }
}

TEST_CASE("flatten length is edu count minus one") {
  std::mt19937_64 rng(8);
  for (int e = 1; e <= 6; ++e) {
    for (auto tree : oracle::binary_shapes(e)) {
      oracle::decorate(tree.root, rng);
      CHECK(flatten(tree).size() == static_cast<std::size_t>(e - 1));
      CHECK(flatten(tree) == flatten(tree));
    }
  }
}

TEST_CASE("label projection places relations at the first token of the next EDU") {
  const auto p = testing::paragraph("p", {"a b c d e f"});
  const auto t = parse_tree("(Attribution (N 0:0-2) (S 0:3-5))", &p);
  const RelationInventory inv({"Attribution"});
  const auto labels = project_labels(p, t, flatten(t), inv);
  CHECK(labels == std::vector<LabelSeq>{{0, 0, 0, 1, 0, 0}});

  const auto q = testing::paragraph("q", {"a b c", "d e", "f g h"});
  const auto chain = parse_tree("(Elaboration (N 0:0-2) (S (Joint (N 1:0-1) (N 2:0-2))))", &q);
  const RelationInventory inv2({"Elaboration", "Joint"});
  const auto l2 = project_labels(q, chain, flatten(chain), inv2);
  CHECK(l2[0] == LabelSeq{0, 0, 0});
  CHECK(l2[1] == LabelSeq{1, 0});
  CHECK(l2[2] == LabelSeq{2, 0, 0});

  const auto single = testing::paragraph("s", {"a b c"});
  const auto leaf = parse_tree("0:0-2", &single);
  CHECK(project_labels(single, leaf, flatten(leaf), inv)[0] == LabelSeq{0, 0, 0});
}

TEST_CASE("unknown relations") {
  const auto p = testing::paragraph("p", {"a b c d e f"});
  const auto t = parse_tree("(Contrast (N 0:0-2) (S 0:3-5))", &p);
  const RelationInventory inv({"Attribution"});
  CHECK(error_code([&] { project_labels(p, t, flatten(t), inv, LabelMode::kTrain); }) ==
        "unknown-relation");
  CHECK(project_labels(p, t, flatten(t), inv, LabelMode::kEval)[0] == LabelSeq(6, 0));
}

TEST_CASE("inventory") {
  const auto a = parse_tree("(Elaboration (N 0:0-1) (S (Attribution (N 1:0-1) (S 2:0-1))))");
  const auto b = parse_tree("(Elaboration (N 0:0-1) (S 1:0-1))");
  const auto inv = build_inventory({a, b});
  CHECK(inv.size() == 3);
  CHECK(inv.name(RelationInventory::kNull) == "o");
  CHECK(inv.find("Attribution").has_value());
  CHECK_FALSE(inv.find("Contrast").has_value());
  std::stringstream io;
  write_inventory(io, inv);
  CHECK(read_inventory(io).names() == inv.names());
}

TEST_CASE("stub parser") {
  const auto four = testing::numbered_paragraphs(1)[0];
  REQUIRE(four.sentences.size() == 4);
  const auto t = stub_parse(four, 0);
  CHECK(t.edu_count() == 4);
  int internal = 0;
  std::function<void(const RstNode&)> count = [&](const RstNode& n) {
    if (n.is_leaf()) return;
    ++internal;
    for (const auto& c : n.children) count(c);
  };
  count(t.root);
  CHECK(internal == 3);
  CHECK(stub_parse(four, 0) == t);
  CHECK_NOTHROW(check_alignment(t, four));

  const auto seven = testing::numbered_paragraphs(4)[3];
  REQUIRE(seven.sentences.size() == 7);
  const auto flat = flatten(stub_parse(seven, 0));
  REQUIRE(flat.size() == 6);
  for (std::size_t k = 0; k < flat.size(); ++k) {
    REQUIRE(flat[k].has_value());
    CHECK(*flat[k] == kStubRelations[k % kStubRelations.size()]);
  }
}

TEST_CASE("attach drops paragraphs without a usable tree") {
  auto ps = testing::numbered_paragraphs(3);
  std::map<std::string, RstTree> trees;
  trees[ps[0].id] = stub_parse(ps[0], 1);
  trees[ps[1].id] = stub_parse(ps[2], 1);  // wrong shape for ps[1]
  const auto r = attach_trees(ps, trees);
  CHECK(r.kept.size() == 1);
  CHECK(r.trees.size() == 1);
  CHECK(r.unparsed == std::vector<std::string>{ps[1].id, ps[2].id});
}

}  // TEST_SUITE
