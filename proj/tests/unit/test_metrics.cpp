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

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "metric_cases.hpp"
#include "oracles.hpp"
#include "paraflow/error.hpp"
#include "paraflow/metrics.hpp"
#include "paraflow/stemmer.hpp"

using namespace paraflow;
using namespace paraflow::metrics;
using testing::words;

namespace {

struct Table {
  Vocab vocab;
  EmbeddingTable table;
};

// Vocabulary "w0".."w{n-1}" with the given rows.
Table table_of(const std::vector<Eigen::VectorXd>& rows) {
  auto tokens = Vocab().tokens();
  for (std::size_t i = 0; i < rows.size(); ++i) tokens.push_back("w" + std::to_string(i));
  Table t{Vocab(tokens), {}};
  const auto dim = rows.front().size();
  t.table.dimension = static_cast<int>(dim);
  t.table.vectors = Eigen::MatrixXd::Zero(t.vocab.size(), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t.table.vectors.row(Vocab::kNumReserved + static_cast<int>(i)) = rows[i].transpose();
  }
  return t;
}

bridging::BridgingExample example(const std::string& id, Domain d, int n_middle) {
  bridging::BridgingExample e;
  e.id = id;
  e.domain = d;
  e.first = words("w0 w1");
  e.last = words("w1 w2");
  for (int i = 0; i < n_middle; ++i) e.middle_ref.push_back(words("w0 w2 w1"));
  e.n_middle = n_middle;
  return e;
}

}  // namespace

TEST_SUITE("metrics") {

TEST_CASE("porter stemmer reference pairs") {
  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"caresses", "caress"}, {"ponies", "poni"},       {"cats", "cat"},
      {"feed", "feed"},       {"agreed", "agre"},       {"plastered", "plaster"},
      {"motoring", "motor"},  {"sing", "sing"},         {"conflated", "conflat"},
      {"hopping", "hop"},     {"falling", "fall"},      {"filing", "file"},
      {"happy", "happi"},     {"relational", "relat"},  {"generalization", "gener"},
      {"hopeful", "hope"},    {"revival", "reviv"},     {"adjustable", "adjust"},
      {"controll", "control"}, {"rate", "rate"},        {"connection", "connect"},
      {"generals", "gener"},  {"argued", "argu"},       {"argues", "argu"},
  };
  for (const auto& [word, stem] : pairs) {
    INFO(word);
    CHECK(porter_stem(word) == stem);
  }
  CHECK(porter_stem("is") == "is");
  CHECK(porter_stem("Running") == "Running");  // only lowercase words are stemmed
}

TEST_CASE("identical ten token sentences") {
  const auto s = words("a b c d e f g h i j");
  CHECK(meteor(s, s) == doctest::Approx(1.0 * (1 - 0.5 * std::pow(0.1, 3))).epsilon(1e-15));
  CHECK(meteor(s, s) == doctest::Approx(0.9995));
}

TEST_CASE("partial overlap") {
  const auto st = meteor_stats(words("the cat sat"), words("the cat sat down"));
  CHECK(st.matches == 3);
  CHECK(st.chunks == 1);
  CHECK(st.precision == 1.0);
  CHECK(st.recall == 0.75);
  const double fmean = 10 * 1.0 * 0.75 / (0.75 + 9 * 1.0);
  CHECK(st.score == doctest::Approx(fmean * (1 - 0.5 / 27)).epsilon(1e-15));
}

TEST_CASE("constructed cases match the formula on hand counts") {
  for (const auto& c : oracle::meteor_cases()) {
    INFO(c.hypothesis, " | ", c.reference);
    const auto h = words(c.hypothesis), r = words(c.reference);
    const auto st = meteor_stats(h, r);
    CHECK(st.matches == c.matches);
    CHECK(st.chunks == c.chunks);
    const double expect = h.empty() || r.empty()
                              ? 0.0
                              : oracle::meteor_formula(c.matches, c.chunks, static_cast<int>(h.size()),
                                                       static_cast<int>(r.size()));
    CHECK(std::abs(st.score - expect) < 1e-9);
  }
  CHECK(meteor_stats({}, words("a")).empty_input);
}

TEST_CASE("vector extrema on constructed tables") {
  std::mt19937_64 rng(1);
  std::vector<Eigen::VectorXd> rows;
  for (int i = 0; i < 6; ++i) rows.push_back(oracle::random_matrix(4, 1, 1.0, rng));
  const auto t = table_of(rows);
  CHECK(vector_extrema(words("w0 w1"), words("w0 w1"), t.vocab, t.table) == doctest::Approx(1.0));

  const auto h = words("w2 w3 w5"), r = words("w1 w4 w0");
  const double expect = oracle::cosine_of_means({rows[2], rows[3], rows[5]}, {rows[1], rows[4], rows[0]});
  CHECK(std::abs(vector_extrema(h, r, t.vocab, t.table) - expect) < 1e-12);

  // OOV tokens are skipped, not averaged in as zeros.
  CHECK(std::abs(vector_extrema(words("w2 zz w3 w5"), r, t.vocab, t.table) - expect) < 1e-12);
  bool all_oov = false;
  CHECK(vector_extrema(words("zz"), r, t.vocab, t.table, VeMode::kAverage, &all_oov) == 0.0);
  CHECK(all_oov);
}

TEST_CASE("orthogonal means give zero") {
  const Eigen::Vector2d e1(1, 0), e2(0, 1), e3(1, 1), e4(1, -1);
  const auto t = table_of({e1, e2, e3, e4});
  CHECK(std::abs(vector_extrema(words("w0"), words("w1"), t.vocab, t.table)) < 1e-15);
  CHECK(std::abs(vector_extrema(words("w2"), words("w3"), t.vocab, t.table)) < 1e-15);
  // Means (0.5, 0.5) and (1, -1).
  CHECK(std::abs(vector_extrema(words("w0 w1"), words("w3 w3"), t.vocab, t.table)) < 1e-15);
}

TEST_CASE("extrema pooling keeps the largest magnitude per dimension") {
  const Eigen::Vector2d a(0.2, -0.9), b(-0.5, 0.3), c(0.4, 0.1);
  const auto t = table_of({a, b, c});
  // Hypothesis pools to (-0.5, -0.9); reference is c alone.
  const Eigen::Vector2d pooled(-0.5, -0.9);
  const double expect = pooled.dot(c) / (pooled.norm() * c.norm());
  CHECK(vector_extrema(words("w0 w1"), words("w2"), t.vocab, t.table, VeMode::kExtrema) ==
        doctest::Approx(expect).epsilon(1e-14));
  CHECK(parse_ve_mode(ve_mode_name(VeMode::kExtrema)) == VeMode::kExtrema);
  CHECK_THROWS_AS(parse_ve_mode("max"), Error);
}

TEST_CASE("score_run aggregates by domain and length") {
  const auto t = table_of({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)});
  std::vector<bridging::BridgingExample> ex = {example("a", Domain::kScifi, 2),
                                               example("b", Domain::kScifi, 3),
                                               example("c", Domain::kPapers, 2)};
  std::vector<bridging::Generation> gen = {
      {"a", {words("w0 w2 w1"), words("w0 w2 w1")}},
      {"b", {words("w0"), {}, words("w2")}},
      {"c", {words("w1 w1"), words("w0 w2 w1")}},
  };
  const auto rep = score_run(gen, ex, t.vocab, t.table);
  REQUIRE(rep.per_example.size() == 3);
  CHECK(rep.per_example[0].meteor == doctest::Approx(meteor(words("w0 w2 w1 w0 w2 w1"), words("w0 w2 w1 w0 w2 w1"))));
  CHECK(rep.per_example[0].ve == doctest::Approx(1.0));
  CHECK(rep.per_example[1].length == 5);
  CHECK(rep.overall.count == 3);
  const double mean_m = (rep.per_example[0].meteor + rep.per_example[1].meteor + rep.per_example[2].meteor) / 3;
  CHECK(rep.overall.meteor == doctest::Approx(mean_m));
  CHECK(rep.by_domain.at("scifi").count == 2);
  CHECK(rep.by_domain.at("scifi").ve ==
        doctest::Approx((rep.per_example[0].ve + rep.per_example[1].ve) / 2));
  CHECK(rep.by_domain.at("papers").meteor == doctest::Approx(rep.per_example[2].meteor));
  CHECK(rep.by_length.at(4).count == 2);
  CHECK(rep.by_length.at(5).count == 1);

  std::stringstream io;
  write_report_json(io, rep);
  const auto back = read_report_json(io);
  CHECK(back.overall.meteor == doctest::Approx(rep.overall.meteor).epsilon(1e-15));
  CHECK(back.by_length.at(5).ve == doctest::Approx(rep.by_length.at(5).ve).epsilon(1e-15));
  CHECK(back.per_example.size() == 3);

  std::stringstream csv;
  write_report_csv(csv, rep);
  std::string header;
  std::getline(csv, header);
  CHECK(header.find("id") != std::string::npos);
}

TEST_CASE("single example aggregate equals its score") {
  const auto t = table_of({Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)});
  const auto rep = score_run({{"a", {words("w0 w1"), words("w2")}}}, {example("a", Domain::kFantasy, 2)},
                             t.vocab, t.table);
  CHECK(rep.overall.meteor == rep.per_example[0].meteor);
  CHECK(rep.overall.ve == rep.per_example[0].ve);
}

TEST_CASE("mismatched ids are reported") {
  const auto t = table_of({Eigen::Vector2d(1, 0)});
  try {
    score_run({{"x", {}}}, {example("a", Domain::kScifi, 2)}, t.vocab, t.table);
    FAIL("expected id-mismatch");
  } catch (const DataError& e) {
    CHECK(e.code() == "id-mismatch");
    CHECK(std::string(e.what()).find('x') != std::string::npos);
  }
}

}  // TEST_SUITE
