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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "paraflow/bridging.hpp"
#include "paraflow/corpus.hpp"

namespace paraflow::metrics {

// Unigram alignment statistics behind a METEOR score.
struct MeteorStats {
  int matches = 0;
  int exact_matches = 0;
  int chunks = 0;
  int hypothesis_length = 0;
  int reference_length = 0;
  double precision = 0;
  double recall = 0;
  double fmean = 0;
  double penalty = 0;
  double score = 0;
  bool empty_input = false;
};

// METEOR with exact and Porter-stem stages (no synonyms). Tokens are
// lowercased first. Fmean = 10PR / (R + 9P), penalty = 0.5 (chunks /
// matches)^3, score = Fmean (1 - penalty). A hypothesis token aligns to the
// unmatched reference token nearest to the slot after the previous match,
// the leftmost one on ties.
MeteorStats meteor_stats(const Tokens& hypothesis, const Tokens& reference);
double meteor(const Tokens& hypothesis, const Tokens& reference);

enum class VeMode { kAverage, kExtrema };

std::string_view ve_mode_name(VeMode mode);
VeMode parse_ve_mode(std::string_view name);

// Cosine between pooled embeddings: mean pooling (kAverage) or, per
// dimension, the value of largest magnitude (kExtrema). Tokens missing from
// the vocabulary are skipped; 0 when a side has no known token or a pooled
// vector is zero. `all_oov` reports the former case.
double vector_extrema(const Tokens& hypothesis, const Tokens& reference, const Vocab& vocab,
                      const EmbeddingTable& table, VeMode mode = VeMode::kAverage,
                      bool* all_oov = nullptr);

struct ExampleScore {
  std::string id;
  Domain domain = Domain::kSynthetic;
  int length = 0;  // paragraph length in sentences
  double meteor = 0;
  double ve = 0;
};

struct Aggregate {
  double meteor = 0;
  double ve = 0;
  int count = 0;
};

struct MetricReport {
  std::string ve_mode = "avg";
  Aggregate overall;
  std::map<std::string, Aggregate> by_domain;
  std::map<int, Aggregate> by_length;
  std::vector<ExampleScore> per_example;
  std::vector<std::string> warnings;
};

// Scores concatenated generated middles against concatenated references.
// Throws DataError("id-mismatch") listing ids present on only one side.
MetricReport score_run(const std::vector<bridging::Generation>& generations,
                       const std::vector<bridging::BridgingExample>& examples, const Vocab& vocab,
                       const EmbeddingTable& table, VeMode mode = VeMode::kAverage);

// Recomputes macro means from per_example.
void aggregate(MetricReport& report);

void write_report_json(std::ostream& out, const MetricReport& report);
MetricReport read_report_json(std::istream& in);
// One row per example: id,domain,length,meteor,ve.
void write_report_csv(std::ostream& out, const MetricReport& report);

}  // namespace paraflow::metrics
