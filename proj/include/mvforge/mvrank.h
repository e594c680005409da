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

#ifndef MVFORGE_MVRANK_H_
#define MVFORGE_MVRANK_H_

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "mvforge/bundle.h"
#include "mvforge/chartspec.h"
#include "mvforge/featurize.h"
#include "mvforge/mvstate.h"
#include "mvforge/pairgen.h"
#include "mvforge/ranker.h"

namespace mvforge {

// Rows of a chart context embedding.
enum class ContextDim {
  kSData = 0,
  kPType,
  kSizeRatio,
  kTypeDiversity,
  kOverlapMean,
  kNovelColumnRatio,
  kCoverageGain,
  kParsimony,
  kDuplicateFlag,
};

using ChartScorer = std::function<ChartScore(const ColumnSet&)>;

// Scores through the single-chart bundle, memoized per column set.
ChartScorer cached_chart_scorer(const ModelBundle& single, const TableFeatures& features);

// 9 x n, one column per chart in sequence order.
Eigen::MatrixXd mv_embeddings(const std::vector<ChartSpec>& charts, int table_columns,
                              const ChartScorer& scorer);
Eigen::MatrixXd mv_embeddings(const MVState& mv, const ModelBundle& single,
                              const TableFeatures& features);

// Throws PositionError for a position outside the MV.
Eigen::VectorXd chart_context_embedding(const MVState& mv, std::size_t position,
                                        const ModelBundle& single, const TableFeatures& features);

// Throws LayoutError unless the bundle is an MV model over 9-dim embeddings.
void check_mv_bundle(const ModelBundle& bundle);

// Sigmoid of the raw score of one embedding sequence.
double score_mv_embeddings(const ModelBundle& mv_model, const Eigen::MatrixXd& embeddings);
// Batched over sequences of any lengths.
std::vector<double> score_mv_batch(const ModelBundle& mv_model,
                                   const std::vector<Eigen::MatrixXd>& embeddings);

// Throws EmptyMV or TooManyCharts.
double score_mv(const ModelBundle& mv_model, const MVState& mv, const ModelBundle& single,
                const TableFeatures& features);

ModelBundle train_mv(const PairDataset& data, const TrainingHyper& hyper = {});

// Embeds both sides of provenance pairs so training needs no tables.
std::vector<MvPairRecord> mv_pair_records(const std::vector<MvStatePair>& pairs,
                                          const ModelBundle& single,
                                          const TableFeatures& features);

}  // namespace mvforge

#endif  // MVFORGE_MVRANK_H_
