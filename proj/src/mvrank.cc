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

#include "mvforge/mvrank.h"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

#include "mvforge/error.h"

namespace mvforge {
namespace {

void check_mv_size(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kEmptyMv, "an MV needs at least one chart");
  if (n > static_cast<std::size_t>(kMaxMvCharts)) {
    throw Error(ErrorCode::kTooManyCharts,
                "an MV holds at most 12 charts, got " + std::to_string(n));
  }
}

double jaccard(const ColumnSet& a, const ColumnSet& b) {
  std::vector<int> inter, uni;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(inter));
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(uni));
  return uni.empty() ? 0.0 : static_cast<double>(inter.size()) / static_cast<double>(uni.size());
}

}  // namespace

ChartScorer cached_chart_scorer(const ModelBundle& single, const TableFeatures& features) {
  check_single_chart_bundle(single);
  auto bundle = std::make_shared<const ModelBundle>(single);
  auto feats = std::make_shared<const TableFeatures>(features);
  auto cache = std::make_shared<std::map<ColumnSet, ChartScore>>();
  return [bundle, feats, cache](const ColumnSet& cols) {
    auto it = cache->find(cols);
    if (it == cache->end()) it = cache->emplace(cols, score_chart(*bundle, *feats, cols)).first;
    return it->second;
  };
}

Eigen::MatrixXd mv_embeddings(const std::vector<ChartSpec>& charts, int table_columns,
                              const ChartScorer& scorer) {
  const std::size_t n = charts.size();
  Eigen::MatrixXd out(kChartEmbeddingDim, static_cast<Eigen::Index>(n));
  std::vector<ColumnSet> cols(n);
  std::vector<ChartIdentity> ids(n);
  for (std::size_t i = 0; i < n; ++i) {
    cols[i] = canonical_columns(charts[i].columns);
    ids[i] = chart_identity(charts[i], true);
  }
  std::set<int> covered;
  for (std::size_t i = 0; i < n; ++i) {
    const ChartScore s = scorer(cols[i]);
    std::size_t same_type = 0;
    double overlap = 0.0;
    bool duplicate = false;
    std::set<int> elsewhere;
    for (std::size_t j = 0; j < n; ++j) {
      if (charts[j].type == charts[i].type) ++same_type;
      if (j == i) continue;
      overlap += jaccard(cols[i], cols[j]);
      duplicate = duplicate || ids[j] == ids[i];
      elsewhere.insert(cols[j].begin(), cols[j].end());
    }
    std::size_t novel = 0;
    std::size_t gained = 0;
    for (int c : cols[i]) {
      if (!elsewhere.count(c)) ++novel;
      if (covered.insert(c).second) ++gained;
    }
    const double size = static_cast<double>(n);
    auto e = out.col(static_cast<Eigen::Index>(i));
    e(static_cast<int>(ContextDim::kSData)) = s.s_data;
    e(static_cast<int>(ContextDim::kPType)) = s.p_type[static_cast<std::size_t>(charts[i].type)];
    e(static_cast<int>(ContextDim::kSizeRatio)) =
        static_cast<double>(cols[i].size()) / kMaxChartColumns;
    e(static_cast<int>(ContextDim::kTypeDiversity)) = 1.0 - static_cast<double>(same_type) / size;
    e(static_cast<int>(ContextDim::kOverlapMean)) = n > 1 ? overlap / (size - 1.0) : 0.0;
    e(static_cast<int>(ContextDim::kNovelColumnRatio)) =
        cols[i].empty() ? 0.0 : static_cast<double>(novel) / static_cast<double>(cols[i].size());
    e(static_cast<int>(ContextDim::kCoverageGain)) =
        table_columns > 0 ? static_cast<double>(gained) / table_columns : 0.0;
    e(static_cast<int>(ContextDim::kParsimony)) = size / kMaxMvCharts;
    e(static_cast<int>(ContextDim::kDuplicateFlag)) = duplicate ? 1.0 : 0.0;
  }
  return out;
}

Eigen::MatrixXd mv_embeddings(const MVState& mv, const ModelBundle& single,
                              const TableFeatures& features) {
  return mv_embeddings(mv.specs(), features.num_columns(), cached_chart_scorer(single, features));
}

Eigen::VectorXd chart_context_embedding(const MVState& mv, std::size_t position,
                                        const ModelBundle& single, const TableFeatures& features) {
  if (position >= mv.size()) {
    throw Error(ErrorCode::kPosition, "no chart at position " + std::to_string(position));
  }
  return mv_embeddings(mv, single, features).col(static_cast<Eigen::Index>(position));
}

void check_mv_bundle(const ModelBundle& bundle) {
  if (bundle.kind != ModelKind::kMv) throw Error(ErrorCode::kLayout, "expected an mv model");
  if (bundle.layout_version != kChartEmbeddingLayoutVersion ||
      bundle.model.config().input_dim != kChartEmbeddingDim) {
    throw Error(ErrorCode::kLayout, "mv model does not match the chart-embedding layout");
  }
}

std::vector<double> score_mv_batch(const ModelBundle& mv_model,
                                   const std::vector<Eigen::MatrixXd>& embeddings) {
  check_mv_bundle(mv_model);
  std::vector<neural::SequenceRef> refs;
  refs.reserve(embeddings.size());
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    check_mv_size(static_cast<std::size_t>(embeddings[i].cols()));
    neural::SequenceRef r;
    r.bank = static_cast<int>(i);
    for (int t = 0; t < embeddings[i].cols(); ++t) r.steps.push_back(t);
    refs.push_back(std::move(r));
  }
  std::vector<double> out = neural::score_sequences(mv_model.model, embeddings, refs);
  for (double& s : out) s = neural::sigmoid(s);
  return out;
}

double score_mv_embeddings(const ModelBundle& mv_model, const Eigen::MatrixXd& embeddings) {
  return score_mv_batch(mv_model, {embeddings}).front();
}

double score_mv(const ModelBundle& mv_model, const MVState& mv, const ModelBundle& single,
                const TableFeatures& features) {
  check_mv_size(mv.size());
  return score_mv_embeddings(mv_model, mv_embeddings(mv, single, features));
}

ModelBundle train_mv(const PairDataset& data, const TrainingHyper& hyper) {
  return train_model(ModelKind::kMv, data, hyper, default_scorer_config(ModelKind::kMv)).bundle;
}

std::vector<MvPairRecord> mv_pair_records(const std::vector<MvStatePair>& pairs,
                                          const ModelBundle& single,
                                          const TableFeatures& features) {
  const ChartScorer scorer = cached_chart_scorer(single, features);
  std::vector<MvPairRecord> out;
  for (const MvStatePair& p : pairs) {
    check_mv_size(p.positive.size());
    check_mv_size(p.negative.size());
    MvPairRecord r;
    r.session_id = p.session_id;
    r.pos = mv_embeddings(p.positive.specs(), features.num_columns(), scorer);
    r.neg = mv_embeddings(p.negative.specs(), features.num_columns(), scorer);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mvforge
