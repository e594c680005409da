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

#ifndef MVFORGE_RANKER_H_
#define MVFORGE_RANKER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mvforge/bundle.h"
#include "mvforge/chartspec.h"
#include "mvforge/featurize.h"
#include "mvforge/neural.h"
#include "mvforge/pairgen.h"

namespace mvforge {

// Data score squashed to (0,1) times the type distribution.
struct ChartScore {
  double raw = 0.0;
  double s_data = 0.5;
  std::array<double, kNumChartTypes> p_type{0.2, 0.2, 0.2, 0.2, 0.2};

  double overall(ChartType type) const { return s_data * p_type[static_cast<std::size_t>(type)]; }
  // First type in type order among those with the highest probability.
  ChartType best_type() const;
};

ChartScore make_chart_score(double raw, const Eigen::VectorXd& type_probs);

// Throws LayoutError unless the bundle is a single-chart model built for the
// current column layout.
void check_single_chart_bundle(const ModelBundle& bundle);

ChartScore score_chart(const ModelBundle& bundle, const TableFeatures& features,
                       const std::vector<int>& columns);
// Batched; same results as calling score_chart per subset.
std::vector<ChartScore> score_charts(const ModelBundle& bundle, const TableFeatures& features,
                                     const std::vector<ColumnSet>& subsets);

// Sequences referenced by bank index plus the group (table or session) each
// pair belongs to.
struct PairDataset {
  int input_dim = kEmbeddingDim;
  int max_len = kMaxChartColumns;
  Eigen::VectorXd padding;  // fills positions past a sequence's length when flattened
  std::vector<Eigen::MatrixXd> banks;
  std::vector<neural::TrainingPair> pairs;
  std::vector<std::string> groups;  // one per pair

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
  PairDataset subset(const std::vector<std::size_t>& pair_indices) const;
  // Sorted, unique.
  std::vector<std::string> group_ids() const;
};

PairDataset single_chart_dataset(const std::vector<ChartPairRecord>& records,
                                 const FeatureStore& features);
PairDataset mv_dataset(const std::vector<MvPairRecord>& records);

struct TrainReport {
  ModelBundle bundle;
  std::vector<neural::EpochReport> epochs;
};

using EpochCallback = std::function<void(const neural::EpochReport&)>;

TrainReport train_model(ModelKind kind, const PairDataset& data, const TrainingHyper& hyper,
                        const neural::ScorerConfig& config, const EpochCallback& on_epoch = {});
// Continues training from `start`. Throws Layout when its kind or layout
// version differs from what this build expects, Shape when its input width
// does not match the data.
TrainReport resume_training(const ModelBundle& start, const PairDataset& data,
                            const TrainingHyper& hyper, const EpochCallback& on_epoch = {});
ModelBundle train_single(const PairDataset& data, const TrainingHyper& hyper = {});

// Any model is evaluated through this signature so every model sees the
// same harness.
using SequenceScorer =
    std::function<std::vector<double>(const PairDataset&, std::span<const neural::SequenceRef>)>;

SequenceScorer bundle_scorer(const ModelBundle& bundle);

// Fraction of pairs with score(pos) > score(neg); ties are wrong.
double pair_accuracy(const SequenceScorer& scorer, const PairDataset& data);
double pair_accuracy(const ModelBundle& bundle, const PairDataset& data);

struct RecallTable {
  std::string table_id;
  TableFeatures features;
  std::vector<ColumnSet> ground_truths;
};

// Loads corpus tables with their usable ground truths, applying the
// pair-generation filters.
std::vector<RecallTable> load_recall_tables(const std::filesystem::path& corpus_dir);

// Scores for all given subsets of one table.
using SubsetScorer =
    std::function<std::vector<double>(const TableFeatures&, const std::vector<ColumnSet>&)>;

SubsetScorer bundle_subset_scorer(const ModelBundle& bundle);

// Candidates are all subsets of size 1-4, ranked by descending score with
// lexicographic column order breaking ties.
double topk_recall(const SubsetScorer& scorer, const std::vector<RecallTable>& tables, int k);
std::vector<double> topk_recall_curve(const SubsetScorer& scorer,
                                      const std::vector<RecallTable>& tables,
                                      const std::vector<int>& ks);

struct CvRun {
  int run = 0;
  std::vector<std::string> train_groups;
  std::vector<std::string> test_groups;
  std::size_t train_pairs = 0;
  std::size_t test_pairs = 0;
  double value = 0.0;
  bool disjoint = true;
};

struct CvReport {
  std::string metric = "pair_accuracy";
  std::vector<CvRun> runs;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation
  bool disjoint = true;
};

using TrainAndEvaluate =
    std::function<double(const PairDataset& train, const PairDataset& test, int run)>;

// Group-granular Monte-Carlo cross validation.
CvReport mc_cross_validate(const PairDataset& data, const TrainAndEvaluate& fn, int runs = 10,
                           double split = 0.8, std::uint64_t seed = 0);

nlohmann::json to_json(const CvReport& report, bool include_groups = false);

}  // namespace mvforge

#endif  // MVFORGE_RANKER_H_
