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

#ifndef MVFORGE_SYNTH_H_
#define MVFORGE_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mvforge/chartspec.h"
#include "mvforge/featurize.h"
#include "mvforge/pairgen.h"
#include "mvforge/provenance.h"
#include "mvforge/ranker.h"

namespace mvforge {

// u(S) = sum_c linear . e_c + gamma * (sum_c interaction . e_c)^2
struct PlantedUtility {
  Eigen::VectorXd linear = Eigen::VectorXd::Zero(kEmbeddingDim);
  Eigen::VectorXd interaction = Eigen::VectorXd::Zero(kEmbeddingDim);
  double gamma = 0.0;

  double value(const TableFeatures& features, const ColumnSet& columns) const;
};

nlohmann::json to_json(const PlantedUtility& u);
PlantedUtility planted_utility_from_json(const nlohmann::json& j);

struct SynthOptions {
  int tables = 50;
  int cols_min = 3;
  int cols_max = 8;
  int rows_min = 20;
  int rows_max = 60;
  std::uint64_t seed = 0;
  // Adds a squared measure-versus-dimension balance term no linear scorer
  // can express.
  bool interaction = false;
  double gamma = 1.5;
  // Tables whose best subset beats the runner-up by less than this are
  // redrawn.
  double min_gap = 1.0;
  int max_attempts = 500;
};

struct SynthTable {
  std::string file_name;
  std::string csv;
  CorpusEntry entry;
};

struct SynthCorpus {
  PlantedUtility utility;
  std::vector<SynthTable> tables;
};

SynthCorpus generate_synthetic_corpus(const SynthOptions& options);

// tables/*.csv, ground_truth.jsonl and utility.json under dir.
void write_synthetic_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

// Chart type implied by the column types of a selection.
ChartType planted_chart_type(const DataTable& table, const ColumnSet& columns);

SubsetScorer planted_scorer(const PlantedUtility& utility);

// Authoring sessions whose final MV greedily maximizes the sum of
// weights . e over its chart context embeddings; every earlier snapshot
// scores at least min_gap lower. The parsimony weight is negative, so the
// utility is concave in the number of charts.
struct MvSessionOptions {
  int sessions = 60;
  int cols_min = 4;
  int cols_max = 8;
  int final_min = 2;
  int final_max = 6;
  int walk_min = 3;
  int walk_max = 8;
  double min_gap = 0.05;
  std::uint64_t seed = 0;
};

Eigen::VectorXd planted_mv_weights();
double planted_mv_utility(const Eigen::VectorXd& weights, const Eigen::MatrixXd& embeddings);

struct MvSessionCorpus {
  Eigen::VectorXd weights;
  std::vector<ProvenanceLog> logs;
};

MvSessionCorpus generate_mv_sessions(const MvSessionOptions& options, const ModelBundle& single);

}  // namespace mvforge

#endif  // MVFORGE_SYNTH_H_
