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

#include "mvforge/recommend.h"

#include <algorithm>
#include <map>
#include <random>

#include "gtest/gtest.h"
#include "mvforge/error.h"
#include "mvforge/mvrank.h"
#include "test_support.h"

namespace mvforge {
namespace {

using nlohmann::json;

ChartScore with_s_data(double s) {
  ChartScore c;
  c.s_data = s;
  return c;
}

// Pool of dedup candidates over the given column sets with fixed s_data.
CandidatePool stub_pool(const DataTable& t, const std::map<ColumnSet, double>& scores) {
  CandidatePool pool;
  pool.dedup = true;
  for (const auto& [cols, s] : scores) {
    pool.candidates.push_back({assign_encodings(t, cols, ChartType::kBar), with_s_data(s)});
  }
  return pool;
}

BatchChartScorer stub_batch(const std::map<ColumnSet, double>& scores) {
  return [scores](const std::vector<ColumnSet>& sets) {
    std::vector<ChartScore> out;
    for (const auto& s : sets) {
      auto it = scores.find(s);
      out.push_back(with_s_data(it == scores.end() ? 0.0 : it->second));
    }
    return out;
  };
}

double mean_s_data(const std::vector<ChartSpec>& specs, const std::map<ColumnSet, double>& scores) {
  double total = 0.0;
  for (const auto& s : specs) {
    auto it = scores.find(s.columns);
    total += it == scores.end() ? 0.0 : it->second;
  }
  return total / static_cast<double>(specs.size());
}

TEST(RecommendMvTest, ModularScorerMatchesExhaustiveOptimum) {
  const DataTable t = testing::sample_table();
  const auto all_sets = column_subsets_up_to(6);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t pool_size = 1 + rng() % 10;
    std::vector<ColumnSet> sets = all_sets;
    std::shuffle(sets.begin(), sets.end(), rng);
    std::map<ColumnSet, double> scores;
    for (std::size_t i = 0; i < pool_size; ++i) scores[sets[i]] = std::round(u(rng) * 20) / 20;
    std::vector<ChartSpec> locked;
    if (rng() % 3 == 0) {
      locked.push_back(assign_encodings(t, sets[pool_size], ChartType::kPie));
      scores[sets[pool_size]] = u(rng);
    }
    CandidatePool pool;
    pool.dedup = true;
    for (std::size_t i = 0; i < pool_size; ++i) {
      pool.candidates.push_back({assign_encodings(t, sets[i], ChartType::kBar), with_s_data(scores[sets[i]])});
    }
    const int n = static_cast<int>(locked.size()) +
                  1 + static_cast<int>(rng() % std::min<std::size_t>(3, pool_size));
    const MVState mv = recommend_mv(t, n, locked, pool, modular_mv_scorer(stub_batch(scores)));
    ASSERT_EQ(mv.size(), static_cast<std::size_t>(n));

    // Exhaustive search over all (n - locked)-combinations of the pool.
    const std::size_t k = static_cast<std::size_t>(n) - locked.size();
    double best = -1.0;
    std::vector<bool> pick(pool_size, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
    do {
      std::vector<ChartSpec> specs = locked;
      for (std::size_t i = 0; i < pool_size; ++i) {
        if (pick[i]) specs.push_back(pool.candidates[i].spec);
      }
      best = std::max(best, mean_s_data(specs, scores));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    EXPECT_NEAR(mean_s_data(mv.specs(), scores), best, 1e-12) << "trial " << trial;
    for (std::size_t i = 0; i < locked.size(); ++i) {
      EXPECT_EQ(mv.charts[i].spec, locked[i]);
      EXPECT_TRUE(mv.charts[i].locked);
    }
  }
}

TEST(RecommendMvTest, LearnedScorerAppendsTheOneStepArgmax) {
  const DataTable t = testing::sample_table();
  const TableFeatures f = featurize_table(t);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const ModelBundle single = testing::random_bundle(ModelKind::kSingleChart, seed);
    const ModelBundle mv_model = testing::random_bundle(ModelKind::kMv, seed + 10);
    const CandidatePool pool = enumerate_candidates(t, single, true);
    const std::vector<ChartSpec> locked{assign_encodings(t, {0, 1}, ChartType::kBar)};
    const MVState mv = recommend_mv(t, 4, locked, pool, learned_mv_scorer(mv_model, single, f));
    ASSERT_EQ(mv.size(), 4u);
    EXPECT_EQ(mv.charts[0].spec, locked[0]);
    for (std::size_t step = 1; step < mv.size(); ++step) {
      MVState prefix;
      prefix.charts.assign(mv.charts.begin(), mv.charts.begin() + static_cast<long>(step));
      std::set<ColumnSet> used;
      for (const auto& c : prefix.charts) used.insert(c.spec.columns);
      double best = -1.0;
      for (const Candidate& c : pool.candidates) {
        if (used.count(c.spec.columns)) continue;
        MVState trial = prefix;
        trial.charts.push_back({c.spec, false, {}});
        best = std::max(best, score_mv(mv_model, trial, single, f));
      }
      MVState chosen = prefix;
      chosen.charts.push_back(mv.charts[step]);
      EXPECT_NEAR(score_mv(mv_model, chosen, single, f), best, 1e-12);
      EXPECT_FALSE(used.count(mv.charts[step].spec.columns));
    }
  }
}

TEST(RecommendMvTest, InfeasibleRequests) {
  const DataTable t = testing::sample_table();
  const CandidatePool pool = stub_pool(t, {{{0}, 0.5}, {{1}, 0.4}});
  const MvScorer scorer = modular_mv_scorer(stub_batch({}));
  auto code_of = [&](int n, std::vector<ChartSpec> locked) {
    try {
      recommend_mv(t, n, locked, pool, scorer);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kConfig;
  };
  EXPECT_EQ(code_of(0, {}), ErrorCode::kInfeasibleRequest);
  EXPECT_EQ(code_of(13, {}), ErrorCode::kInfeasibleRequest);
  EXPECT_EQ(code_of(3, {}), ErrorCode::kInfeasibleRequest);
  const ChartSpec lock = assign_encodings(t, {2}, ChartType::kPie);
  EXPECT_EQ(code_of(1, {lock, assign_encodings(t, {3}, ChartType::kBar)}), ErrorCode::kInfeasibleRequest);
  EXPECT_EQ(recommend_mv(t, 3, {lock}, pool, scorer).size(), 3u);
  // A locked chart already in the pool is not offered twice.
  EXPECT_EQ(code_of(3, {assign_encodings(t, {0}, ChartType::kPie)}), ErrorCode::kInfeasibleRequest);
}

TEST(EnumerateCandidatesTest, PoolSizesAndOrdering) {
  const DataTable t = testing::sample_table();
  const ModelBundle single = testing::random_bundle(ModelKind::kSingleChart, 4);
  const CandidatePool dedup = enumerate_candidates(t, single, true);
  const CandidatePool all = enumerate_candidates(t, single, false);
  EXPECT_EQ(dedup.size(), 6u + 15u + 20u + 15u);
  EXPECT_EQ(all.size(), dedup.size() * 5u);
  for (std::size_t i = 1; i < dedup.size(); ++i) {
    EXPECT_GE(dedup.candidates[i - 1].score.s_data, dedup.candidates[i].score.s_data);
  }
  for (const Candidate& c : dedup.candidates) EXPECT_EQ(c.spec.type, c.score.best_type());
  for (std::size_t i = 1; i < all.size(); ++i) {
    const Candidate& a = all.candidates[i - 1];
    const Candidate& b = all.candidates[i];
    EXPECT_GE(a.score.overall(a.spec.type), b.score.overall(b.spec.type));
  }
}

TEST(ChartIdeasTest, ExcludesCurrentChartsAndHonorsMustInclude) {
  const DataTable t = testing::sample_table();
  const TableFeatures f = featurize_table(t);
  const ModelBundle single = testing::random_bundle(ModelKind::kSingleChart, 6);
  const ModelBundle mv_model = testing::random_bundle(ModelKind::kMv, 7);
  const CandidatePool pool = enumerate_candidates(t, single, true);
  const MvScorer scorer = learned_mv_scorer(mv_model, single, f);

  // Empty MV: ranked by s_data.
  const auto first = chart_ideas(MVState{}, {}, pool, scorer, 5);
  ASSERT_EQ(first.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(first[i].spec, pool.candidates[i].spec);
    EXPECT_EQ(first[i].projected, pool.candidates[i].score.s_data);
  }

  MVState mv;
  mv.charts.push_back({pool.candidates[0].spec, false, {}});
  mv.charts.push_back({assign_encodings(t, {1, 3}, ChartType::kPie), false, {}});
  const auto ideas = chart_ideas(mv, {1}, pool, scorer, 100);
  EXPECT_FALSE(ideas.empty());
  for (std::size_t i = 0; i < ideas.size(); ++i) {
    EXPECT_TRUE(std::count(ideas[i].spec.columns.begin(), ideas[i].spec.columns.end(), 1));
    EXPECT_NE(ideas[i].spec.columns, pool.candidates[0].spec.columns);
    EXPECT_NE(ideas[i].spec.columns, (ColumnSet{1, 3}));
    MVState trial = mv;
    trial.charts.push_back({ideas[i].spec, false, {}});
    EXPECT_NEAR(ideas[i].projected, score_mv(mv_model, trial, single, f), 1e-12);
    if (i > 0) EXPECT_GE(ideas[i - 1].projected, ideas[i].projected);
  }
  // Every subset containing column 1 except those already in the MV.
  const bool top_has_1 = std::count(pool.candidates[0].spec.columns.begin(),
                                    pool.candidates[0].spec.columns.end(), 1) > 0;
  std::size_t expected = 0;
  for (const ColumnSet& s : column_subsets_up_to(6)) {
    if (std::count(s.begin(), s.end(), 1)) ++expected;
  }
  EXPECT_EQ(ideas.size(), expected - 1 - (top_has_1 ? 1 : 0));
}

TEST(RecommendationJsonTest, CarriesSpecsVegaLiteAndScores) {
  const DataTable t = testing::sample_table();
  MVState mv;
  mv.charts.push_back({assign_encodings(t, {0, 1}, ChartType::kBar), true, default_layout(0)});
  const json j = recommendation_json(t, mv, 0.7, {with_s_data(0.4)});
  EXPECT_EQ(j["mv"]["charts"].size(), 1u);
  EXPECT_EQ(j["mv"]["charts"][0]["vegalite"]["mark"], "bar");
  EXPECT_EQ(j["scores"]["mv_score"], 0.7);
  EXPECT_EQ(j["scores"]["per_chart"][0]["s_data"], 0.4);
}

}  // namespace
}  // namespace mvforge
