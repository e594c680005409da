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

#include "mvforge/synth.h"

#include <algorithm>

#include "gtest/gtest.h"
#include "mvforge/error.h"
#include "mvforge/mvrank.h"
#include "test_support.h"

namespace mvforge {
namespace {

TEST(SynthCorpusTest, SameSeedSameCorpus) {
  SynthOptions o;
  o.tables = 12;
  o.seed = 21;
  const SynthCorpus a = generate_synthetic_corpus(o);
  const SynthCorpus b = generate_synthetic_corpus(o);
  ASSERT_EQ(a.tables.size(), 12u);
  for (std::size_t i = 0; i < a.tables.size(); ++i) {
    EXPECT_EQ(a.tables[i].csv, b.tables[i].csv);
    EXPECT_EQ(a.tables[i].file_name, b.tables[i].file_name);
  }
  EXPECT_EQ(to_json(a.utility), to_json(b.utility));
  o.seed = 22;
  EXPECT_NE(generate_synthetic_corpus(o).tables[0].csv, a.tables[0].csv);
}

TEST(SynthCorpusTest, GroundTruthIsTheWellSeparatedArgmax) {
  for (bool interaction : {false, true}) {
    SynthOptions o;
    o.tables = 10;
    o.seed = 8;
    o.interaction = interaction;
    const SynthCorpus c = generate_synthetic_corpus(o);
    EXPECT_EQ(c.utility.gamma, interaction ? o.gamma : 0.0);
    for (const SynthTable& t : c.tables) {
      const DataTable table = parse_csv(t.csv, t.entry.name);
      EXPECT_GE(table.num_columns(), o.cols_min);
      EXPECT_LE(table.num_columns(), o.cols_max);
      const TableFeatures f = featurize_table(table);
      ASSERT_EQ(t.entry.charts.size(), 1u);
      const ColumnSet truth = t.entry.charts[0].columns;
      std::vector<double> values;
      for (const ColumnSet& s : column_subsets_up_to(table.num_columns())) {
        if (s != truth) values.push_back(c.utility.value(f, s));
      }
      const double best_other = *std::max_element(values.begin(), values.end());
      EXPECT_GE(c.utility.value(f, truth) - best_other, o.min_gap);
      EXPECT_EQ(t.entry.charts[0].type, planted_chart_type(table, truth));
    }
  }
}

TEST(SynthCorpusTest, InteractionTermMatchesItsDefinition) {
  SynthOptions o;
  o.tables = 1;
  o.seed = 2;
  o.interaction = true;
  const SynthCorpus c = generate_synthetic_corpus(o);
  const TableFeatures f = featurize_table(parse_csv(c.tables[0].csv, "t"));
  const ColumnSet cols{0, 1};
  double lin = 0.0, balance = 0.0;
  for (int col : cols) {
    const Embedding& e = f.columns[static_cast<std::size_t>(col)].vector;
    for (int i = 0; i < kEmbeddingDim; ++i) {
      lin += c.utility.linear(i) * e(i);
      balance += c.utility.interaction(i) * e(i);
    }
  }
  EXPECT_NEAR(c.utility.value(f, cols), lin + c.utility.gamma * balance * balance, 1e-9);
  // +1 on the quantitative slot, -1 on the dimension slots.
  EXPECT_EQ(c.utility.interaction(kTypeOffset + 0), 1.0);
  EXPECT_EQ(c.utility.interaction(kTypeOffset + 1), -1.0);
  EXPECT_EQ(c.utility.interaction(kTypeOffset + 3), -1.0);
  EXPECT_EQ(planted_utility_from_json(to_json(c.utility)).linear, c.utility.linear);
}

TEST(SynthCorpusTest, PlantedOracleHasPerfectRecall) {
  SynthOptions o;
  o.tables = 15;
  o.seed = 4;
  const SynthCorpus c = generate_synthetic_corpus(o);
  const auto dir = testing::temp_dir("synth_recall");
  write_synthetic_corpus(c, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "utility.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "ground_truth.jsonl"));
  const auto tables = load_recall_tables(dir);
  ASSERT_EQ(tables.size(), 15u);
  EXPECT_EQ(topk_recall(planted_scorer(c.utility), tables, 1), 1.0);
}

TEST(PlantedChartTypeTest, FollowsColumnTypes) {
  const DataTable t = testing::sample_table();  // N Q N T Q Q
  EXPECT_EQ(planted_chart_type(t, {3, 1}), ChartType::kLine);
  EXPECT_EQ(planted_chart_type(t, {0, 1, 3}), ChartType::kArea);
  EXPECT_EQ(planted_chart_type(t, {1, 4}), ChartType::kScatter);
  EXPECT_EQ(planted_chart_type(t, {1}), ChartType::kBar);
  EXPECT_EQ(planted_chart_type(t, {0}), ChartType::kPie);
  EXPECT_EQ(planted_chart_type(t, {0, 1}), ChartType::kBar);
}

TEST(MvSessionsTest, FinalSnapshotBeatsEveryIntermediate) {
  const ModelBundle single = testing::random_bundle(ModelKind::kSingleChart, 3);
  MvSessionOptions o;
  o.sessions = 6;
  o.seed = 12;
  const MvSessionCorpus c = generate_mv_sessions(o, single);
  ASSERT_EQ(c.logs.size(), 6u);
  for (const ProvenanceLog& log : c.logs) {
    EXPECT_TRUE(log.consent);
    const DataTable table = log_table(log);
    const ChartScorer scorer = cached_chart_scorer(single, log.features);
    std::vector<const MVState*> snaps;
    for (const auto& e : log.events) {
      if (e.snapshot && !e.snapshot->empty()) snaps.push_back(&*e.snapshot);
    }
    ASSERT_GE(snaps.size(), 2u);
    const MVState& final_mv = *snaps.back();
    EXPECT_GE(final_mv.size(), static_cast<std::size_t>(o.final_min));
    EXPECT_LE(final_mv.size(), static_cast<std::size_t>(o.final_max));
    const double best = planted_mv_utility(
        c.weights, mv_embeddings(final_mv.specs(), table.num_columns(), scorer));
    for (std::size_t i = 0; i + 1 < snaps.size(); ++i) {
      if (mv_identity(*snaps[i]) == mv_identity(final_mv)) continue;
      EXPECT_LE(planted_mv_utility(c.weights,
                                   mv_embeddings(snaps[i]->specs(), table.num_columns(), scorer)),
                best - o.min_gap + 1e-12);
    }
    EXPECT_EQ(log.events.back().kind, EventKind::kRecommendMvRequest);
    EXPECT_NO_THROW(provenance_pairs(log));
  }
}

}  // namespace
}  // namespace mvforge
