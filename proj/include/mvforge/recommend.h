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

#ifndef MVFORGE_RECOMMEND_H_
#define MVFORGE_RECOMMEND_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <vector>

#include "json.hpp"
#include "mvforge/bundle.h"
#include "mvforge/chartspec.h"
#include "mvforge/mvrank.h"
#include "mvforge/mvstate.h"
#include "mvforge/ranker.h"

namespace mvforge {

struct Candidate {
  ChartSpec spec;
  ChartScore score;
};

struct CandidatePool {
  std::vector<Candidate> candidates;
  bool dedup = true;

  std::size_t size() const { return candidates.size(); }
};

// Identity used for "already in the MV" checks under a dedup mode.
ChartIdentity pool_identity(const ChartSpec& spec, bool dedup);

// Single-chart scores for many column sets of one table.
using BatchChartScorer = std::function<std::vector<ChartScore>(const std::vector<ColumnSet>&)>;

BatchChartScorer bundle_chart_scorer(const ModelBundle& single, const TableFeatures& features);

struct PoolOptions {
  bool dedup = true;
  // For tables wider than 10 columns, keep only the best column sets by
  // s_data.
  std::size_t wide_table_cap = 256;
};

// One spec per column subset (its most likely type) with dedup, otherwise
// one per subset and type. Sorted by s_data (dedup) or s_overall, ties by
// columns then type order.
CandidatePool enumerate_candidates(const DataTable& table, const BatchChartScorer& scorer,
                                   const PoolOptions& options = {});
CandidatePool enumerate_candidates(const DataTable& table, const ModelBundle& single,
                                   bool dedup = true);

// Scores of many candidate MVs, each a chart list in sequence order.
using MvScorer = std::function<std::vector<double>(const std::vector<std::vector<ChartSpec>>&)>;

// score_mv through the learned MV model.
MvScorer learned_mv_scorer(const ModelBundle& mv_model, const ModelBundle& single,
                           const TableFeatures& features);
// Mean s_data of the charts; additive, so greedy selection is optimal.
MvScorer modular_mv_scorer(const BatchChartScorer& scorer);

// Greedy: starts from the locked charts and repeatedly appends the pool
// chart that maximizes the MV score. Throws InfeasibleRequest.
MVState recommend_mv(const DataTable& table, int n_charts, const std::vector<ChartSpec>& locked,
                     const CandidatePool& pool, const MvScorer& mv_scorer);

struct ChartIdea {
  ChartSpec spec;
  ChartScore score;
  double projected = 0.0;  // MV score after adding, or s_data for an empty MV
};

// Pool charts containing must_include and absent from the MV, best first.
std::vector<ChartIdea> chart_ideas(const MVState& mv, const std::set<int>& must_include,
                                   const CandidatePool& pool, const MvScorer& mv_scorer,
                                   std::size_t limit);

// Flat view of an MV: each chart's spec fields plus vegalite, layout and
// locked, and a parallel "locked" array.
nlohmann::json mv_view_json(const DataTable& table, const MVState& mv);

nlohmann::json recommendation_json(const DataTable& table, const MVState& mv, double mv_score,
                                   const std::vector<ChartScore>& per_chart);
nlohmann::json to_json(const ChartScore& score);

}  // namespace mvforge

#endif  // MVFORGE_RECOMMEND_H_
