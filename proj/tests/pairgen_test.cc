// Copyright 2026 The mvforge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mvforge/pairgen.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "gtest/gtest.h"
#include "mvforge/error.h"
#include "test_support.h"

namespace mvforge {
namespace {

using nlohmann::json;

// Independent enumerator: every bitmask of n bits with the right popcount.
std::set<ColumnSet> subsets_by_mask(int n, std::size_t k) {
  std::set<ColumnSet> out;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    ColumnSet s;
    for (int b = 0; b < n; ++b) {
      if (mask & (1u << b)) s.push_back(b);
    }
    if (s.size() == k) out.insert(s);
  }
  return out;
}

// Brute-force (positive, negative) pairs for a table.
std::multiset<std::pair<ColumnSet, ColumnSet>> brute_force_pairs(
    int n, const std::vector<GroundTruthChart>& gts) {
  std::multiset<std::pair<ColumnSet, ColumnSet>> out;
  if (n > kMaxCorpusTableColumns) return out;
  std::set<ColumnSet> truths;
  for (const auto& g : gts) {
    const ColumnSet c = canonical_columns(g.columns);
    const bool ok = !c.empty() && c.size() <= 4 && c.front() >= 0 && c.back() < n &&
                    c.size() == g.columns.size();
    if (ok) truths.insert(c);
  }
  for (const ColumnSet& t : truths) {
    for (const ColumnSet& s : subsets_by_mask(n, t.size())) {
      if (!truths.count(s)) out.insert({t, s});
    }
  }
  return out;
}

TEST(CorpusPairsTest, FiveColumnsOneTwoColumnTruthGivesNinePairs) {
  PairgenCounters counters;
  const auto pairs = corpus_pairs("t", 5, {{{1, 3}, ChartType::kBar}}, &counters);
  ASSERT_EQ(pairs.size(), 9u);
  EXPECT_EQ(counters.pairs, 9u);
  EXPECT_EQ(counters.charts_used, 1u);
  for (const auto& p : pairs) {
    EXPECT_EQ(p.pos.columns, (ColumnSet{1, 3}));
    EXPECT_EQ(p.pos.type, ChartType::kBar);
    EXPECT_EQ(p.neg.columns.size(), 2u);
    EXPECT_NE(p.neg.columns, p.pos.columns);
    EXPECT_FALSE(p.neg.type.has_value());
  }
}

TEST(CorpusPairsTest, MatchesBruteForceOnRandomTables) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 8);
    std::vector<GroundTruthChart> gts;
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int g = 0; g < count; ++g) {
      const int k = 1 + static_cast<int>(rng() % std::min(4, n));
      std::vector<int> cols(static_cast<std::size_t>(n));
      std::iota(cols.begin(), cols.end(), 0);
      std::shuffle(cols.begin(), cols.end(), rng);
      cols.resize(static_cast<std::size_t>(k));
      gts.push_back({canonical_columns(cols), std::nullopt});
    }
    PairgenCounters counters;
    const auto pairs = corpus_pairs("t", n, gts, &counters);
    std::multiset<std::pair<ColumnSet, ColumnSet>> got;
    for (const auto& p : pairs) got.insert({p.pos.columns, p.neg.columns});
    EXPECT_EQ(got, brute_force_pairs(n, gts)) << "trial " << trial;
    EXPECT_EQ(counters.pairs, pairs.size());
  }
}

TEST(CorpusPairsTest, WideTablesAndChartsAreSkippedAndCounted) {
  PairgenCounters counters;
  EXPECT_TRUE(corpus_pairs("wide", 11, {{{0, 1}, std::nullopt}, {{2}, std::nullopt}}, &counters).empty());
  EXPECT_EQ(counters.tables_seen, 1u);
  EXPECT_EQ(counters.tables_skipped_wide, 1u);
  EXPECT_EQ(counters.charts_in_skipped_tables, 2u);
  EXPECT_EQ(counters.pairs, 0u);

  PairgenCounters c2;
  const auto pairs = corpus_pairs(
      "t", 6,
      {{{0, 1, 2, 3, 4}, std::nullopt}, {{7}, std::nullopt}, {{2}, std::nullopt}, {{2}, std::nullopt}},
      &c2);
  EXPECT_EQ(c2.charts_skipped_wide, 1u);
  EXPECT_EQ(c2.charts_skipped_invalid, 2u);  // out of range, duplicate
  EXPECT_EQ(c2.charts_used, 1u);
  EXPECT_EQ(pairs.size(), 5u);
}

TEST(CorpusPairsTest, NegativeCapIsSeededAndBounded) {
  CorpusPairOptions opts;
  opts.cap_per_ground_truth = 4;
  opts.seed = 9;
  const std::vector<GroundTruthChart> gts{{{0, 1}, std::nullopt}};
  const auto a = corpus_pairs("t", 8, gts, nullptr, opts);
  const auto b = corpus_pairs("t", 8, gts, nullptr, opts);
  EXPECT_EQ(a.size(), 4u);
  EXPECT_EQ(a, b);
}

TEST(PairJsonlTest, ChartRecordsRoundTrip) {
  const auto pairs = corpus_pairs("t", 4, {{{0, 2}, ChartType::kLine}}, nullptr);
  const std::string text = write_chart_pairs_jsonl(pairs);
  EXPECT_EQ(read_chart_pairs_jsonl(text), pairs);
  EXPECT_THROW(read_chart_pairs_jsonl("{\"table_id\":1}\n"), Error);
}

TEST(PairJsonlTest, MvRecordsRoundTrip) {
  MvPairRecord r;
  r.session_id = "s";
  r.pos = Eigen::MatrixXd::Random(9, 3);
  r.neg = Eigen::MatrixXd::Random(9, 2);
  const auto back = read_mv_pairs_jsonl(write_mv_pairs_jsonl({r}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], r);
}

TEST(CorpusDirTest, ReadsGroundTruthAndFeatures) {
  const auto dir = testing::temp_dir("pairgen_corpus");
  write_file(dir / "tables" / "a.csv", testing::sample_csv());
  write_file(dir / "ground_truth.jsonl",
             "{\"table\":{\"name\":\"a\",\"csv_path\":\"tables/a.csv\"},"
             "\"charts\":[{\"columns\":[0,1],\"type\":\"bar\"}]}\n");
  const CorpusPairs result = corpus_pairs_from_dir(dir);
  EXPECT_EQ(result.records.size(), 14u);  // C(6,2) - 1
  EXPECT_EQ(result.features.tables.size(), 1u);
  const auto& id = result.records.front().table_id;
  EXPECT_EQ(result.features.at(id).num_columns(), 6);
  EXPECT_THROW(result.features.at("missing"), Error);
  EXPECT_EQ(features_sidecar_path("x/p.jsonl"), std::filesystem::path("x/p.jsonl.features.json"));
}

ProvenanceLog scripted_log(const std::vector<std::vector<std::vector<int>>>& snapshots) {
  ProvenanceLog log;
  log.session_id = "s";
  std::int64_t seq = 0;
  const DataTable t = testing::sample_table();
  for (const auto& charts : snapshots) {
    ProvenanceEvent e;
    e.seq = ++seq;
    e.kind = EventKind::kAddChart;
    MVState mv;
    for (const auto& cols : charts) mv.charts.push_back({assign_encodings(t, cols, ChartType::kBar), false, {}});
    e.snapshot = mv;
    log.events.push_back(e);
  }
  return log;
}

TEST(ProvenancePairsTest, OnePairPerDistinctIntermediate) {
  // {A}, {A,B}, {A} again, {}, {A,B,C} final.
  const ProvenanceLog log = scripted_log({{{0}}, {{0}, {1}}, {{0}}, {}, {{0}, {1}, {2}}});
  const auto pairs = provenance_pairs(log);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].positive.size(), 3u);
  EXPECT_EQ(pairs[0].negative.size(), 1u);
  EXPECT_EQ(pairs[1].negative.size(), 2u);
}

TEST(ProvenancePairsTest, IntermediatesEqualToFinalAreNotNegatives) {
  const ProvenanceLog log = scripted_log({{{0}, {1}}, {{1}}, {{1}, {0}}});
  const auto pairs = provenance_pairs(log);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].negative.size(), 1u);
}

TEST(ProvenancePairsTest, NoDistinctHistoryThrows) {
  try {
    provenance_pairs(scripted_log({{}, {{0}}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInsufficientHistory);
  }
  EXPECT_THROW(provenance_pairs(scripted_log({})), Error);
}

}  // namespace
}  // namespace mvforge
