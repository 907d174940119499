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

#include "paraflow/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <set>

#include <json.hpp>

#include "paraflow/error.hpp"
#include "paraflow/stemmer.hpp"

namespace paraflow::metrics {

using nlohmann::json;

namespace {

Tokens lowered(const Tokens& tokens) {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(lowercase(t));
  return out;
}

// Aligns hypothesis tokens to reference tokens with equal keys, skipping
// positions already aligned.
void align_stage(const std::vector<std::string>& hyp_keys, const std::vector<std::string>& ref_keys,
                 std::vector<int>& hyp_to_ref, std::vector<bool>& ref_used) {
  const int n_ref = static_cast<int>(ref_keys.size());
  for (std::size_t i = 0; i < hyp_keys.size(); ++i) {
    if (hyp_to_ref[i] >= 0) continue;
    int anchor = 0;
    for (std::size_t k = i; k-- > 0;) {
      if (hyp_to_ref[k] >= 0) {
        anchor = hyp_to_ref[k] + 1;
        break;
      }
    }
    int best = -1;
    for (int j = 0; j < n_ref; ++j) {
      if (ref_used[static_cast<std::size_t>(j)] || ref_keys[static_cast<std::size_t>(j)] != hyp_keys[i]) continue;
      if (best < 0 || std::abs(j - anchor) < std::abs(best - anchor)) best = j;
    }
    if (best >= 0) {
      hyp_to_ref[i] = best;
      ref_used[static_cast<std::size_t>(best)] = true;
    }
  }
}

}  // namespace

MeteorStats meteor_stats(const Tokens& hypothesis, const Tokens& reference) {
  MeteorStats s;
  s.hypothesis_length = static_cast<int>(hypothesis.size());
  s.reference_length = static_cast<int>(reference.size());
  if (hypothesis.empty() || reference.empty()) {
    s.empty_input = true;
    return s;
  }
  const auto hyp = lowered(hypothesis);
  const auto ref = lowered(reference);
  std::vector<int> hyp_to_ref(hyp.size(), -1);
  std::vector<bool> ref_used(ref.size(), false);
  align_stage(hyp, ref, hyp_to_ref, ref_used);
  s.exact_matches = static_cast<int>(std::count_if(hyp_to_ref.begin(), hyp_to_ref.end(), [](int j) { return j >= 0; }));

  std::vector<std::string> hyp_stems, ref_stems;
  for (const auto& t : hyp) hyp_stems.push_back(porter_stem(t));
  for (const auto& t : ref) ref_stems.push_back(porter_stem(t));
  align_stage(hyp_stems, ref_stems, hyp_to_ref, ref_used);

  int prev_ref = -2;
  bool in_chunk = false;
  for (int j : hyp_to_ref) {
    if (j < 0) {
      in_chunk = false;
      continue;
    }
    ++s.matches;
    if (!in_chunk || j != prev_ref + 1) ++s.chunks;
    in_chunk = true;
    prev_ref = j;
  }
  if (s.matches == 0) return s;
  s.precision = static_cast<double>(s.matches) / s.hypothesis_length;
  s.recall = static_cast<double>(s.matches) / s.reference_length;
  s.fmean = 10 * s.precision * s.recall / (s.recall + 9 * s.precision);
  const double frag = static_cast<double>(s.chunks) / s.matches;
  s.penalty = 0.5 * frag * frag * frag;
  s.score = s.fmean * (1 - s.penalty);
  return s;
}

double meteor(const Tokens& hypothesis, const Tokens& reference) {
  return meteor_stats(hypothesis, reference).score;
}

std::string_view ve_mode_name(VeMode mode) {
  return mode == VeMode::kAverage ? "avg" : "extrema";
}

VeMode parse_ve_mode(std::string_view name) {
  if (name == "avg") return VeMode::kAverage;
  if (name == "extrema") return VeMode::kExtrema;
  throw Error("usage", "VE mode must be avg or extrema");
}

namespace {

bool pool(const Tokens& tokens, const Vocab& vocab, const EmbeddingTable& table, VeMode mode,
          Eigen::VectorXd& out) {
  out = Eigen::VectorXd::Zero(table.dimension);
  int n = 0;
  for (const auto& t : tokens) {
    const int id = vocab.id(lowercase(t));
    if (id == Vocab::kUnk || Vocab::is_reserved(id)) continue;
    const Eigen::VectorXd v = table.vectors.row(id).transpose();
    if (mode == VeMode::kAverage) {
      out += v;
    } else {
      for (Eigen::Index d = 0; d < v.size(); ++d) {
        if (n == 0 || std::abs(v(d)) > std::abs(out(d))) out(d) = v(d);
      }
    }
    ++n;
  }
  if (n == 0) return false;
  if (mode == VeMode::kAverage) out /= n;
  return true;
}

}  // namespace

double vector_extrema(const Tokens& hypothesis, const Tokens& reference, const Vocab& vocab,
                      const EmbeddingTable& table, VeMode mode, bool* all_oov) {
  Eigen::VectorXd h, r;
  const bool ok = pool(hypothesis, vocab, table, mode, h) && pool(reference, vocab, table, mode, r);
  if (all_oov) *all_oov = !ok;
  if (!ok) return 0.0;
  const double denom = h.norm() * r.norm();
  if (denom == 0) return 0.0;
  return std::clamp(h.dot(r) / denom, -1.0, 1.0);
}

void aggregate(MetricReport& report) {
  report.overall = {};
  report.by_domain.clear();
  report.by_length.clear();
  auto add = [](Aggregate& a, const ExampleScore& e) {
    a.meteor += e.meteor;
    a.ve += e.ve;
    ++a.count;
  };
  for (const auto& e : report.per_example) {
    add(report.overall, e);
    add(report.by_domain[std::string(domain_name(e.domain))], e);
    add(report.by_length[e.length], e);
  }
  auto finish = [](Aggregate& a) {
    if (a.count == 0) return;
    a.meteor /= a.count;
    a.ve /= a.count;
  };
  finish(report.overall);
  for (auto& [k, a] : report.by_domain) finish(a);
  for (auto& [k, a] : report.by_length) finish(a);
}

MetricReport score_run(const std::vector<bridging::Generation>& generations,
                       const std::vector<bridging::BridgingExample>& examples, const Vocab& vocab,
                       const EmbeddingTable& table, VeMode mode) {
  std::map<std::string, const bridging::Generation*> by_id;
  std::vector<std::string> offenders;
  for (const auto& g : generations) {
    if (!by_id.emplace(g.id, &g).second) offenders.push_back(g.id + " (duplicate generation)");
  }
  std::set<std::string> example_ids;
  for (const auto& e : examples) {
    example_ids.insert(e.id);
    if (!by_id.contains(e.id)) offenders.push_back(e.id + " (no generation)");
  }
  for (const auto& g : generations) {
    if (!example_ids.contains(g.id)) offenders.push_back(g.id + " (no example)");
  }
  if (!offenders.empty()) {
    std::string msg = "generation and example ids differ:";
    for (const auto& o : offenders) msg += " " + o;
    throw DataError("id-mismatch", msg);
  }

  MetricReport report;
  report.ve_mode = std::string(ve_mode_name(mode));
  for (const auto& e : examples) {
    Tokens hyp, ref;
    for (const auto& s : by_id.at(e.id)->hypothesis) hyp.insert(hyp.end(), s.begin(), s.end());
    for (const auto& s : e.middle_ref) ref.insert(ref.end(), s.begin(), s.end());
    ExampleScore score;
    score.id = e.id;
    score.domain = e.domain;
    score.length = e.length();
    const auto stats = meteor_stats(hyp, ref);
    if (stats.empty_input) report.warnings.push_back(e.id + ": empty hypothesis or reference, METEOR = 0");
    score.meteor = stats.score;
    bool all_oov = false;
    score.ve = vector_extrema(hyp, ref, vocab, table, mode, &all_oov);
    if (all_oov) report.warnings.push_back(e.id + ": no in-vocabulary token on one side, VE = 0");
    report.per_example.push_back(std::move(score));
  }
  aggregate(report);
  return report;
}

namespace {

json to_json(const Aggregate& a) {
  return {{"METEOR", a.meteor}, {"VE", a.ve}, {"count", a.count}};
}

Aggregate aggregate_from(const json& j) {
  return {j.at("METEOR").get<double>(), j.at("VE").get<double>(), j.at("count").get<int>()};
}

}  // namespace

void write_report_json(std::ostream& out, const MetricReport& report) {
  json j;
  j["ve_mode"] = report.ve_mode;
  j["overall"] = to_json(report.overall);
  j["by_domain"] = json::object();
  for (const auto& [k, a] : report.by_domain) j["by_domain"][k] = to_json(a);
  j["by_length"] = json::object();
  for (const auto& [k, a] : report.by_length) j["by_length"][std::to_string(k)] = to_json(a);
  j["per_example"] = json::array();
  for (const auto& e : report.per_example) {
    j["per_example"].push_back({{"id", e.id},
                                {"domain", domain_name(e.domain)},
                                {"length", e.length},
                                {"METEOR", e.meteor},
                                {"VE", e.ve}});
  }
  j["warnings"] = report.warnings;
  out << j.dump(2) << '\n';
}

MetricReport read_report_json(std::istream& in) {
  MetricReport r;
  try {
    json j;
    in >> j;
    r.ve_mode = j.value("ve_mode", "avg");
    r.overall = aggregate_from(j.at("overall"));
    for (const auto& [k, v] : j.at("by_domain").items()) r.by_domain[k] = aggregate_from(v);
    for (const auto& [k, v] : j.at("by_length").items()) r.by_length[std::stoi(k)] = aggregate_from(v);
    for (const auto& e : j.at("per_example")) {
      r.per_example.push_back({e.at("id").get<std::string>(),
                               parse_domain(e.at("domain").get<std::string>()),
                               e.at("length").get<int>(), e.at("METEOR").get<double>(),
                               e.at("VE").get<double>()});
    }
    if (j.contains("warnings")) r.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError("report", std::string("unreadable metric report: ") + e.what());
  }
  return r;
}

void write_report_csv(std::ostream& out, const MetricReport& report) {
  out << "id,domain,length,meteor,ve\n";
  out.precision(17);
  for (const auto& e : report.per_example) {
    out << e.id << ',' << domain_name(e.domain) << ',' << e.length << ',' << e.meteor << ','
        << e.ve << '\n';
  }
}

}  // namespace paraflow::metrics
