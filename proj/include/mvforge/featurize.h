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

#ifndef MVFORGE_FEATURIZE_H_
#define MVFORGE_FEATURIZE_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

#include "mvforge/ingest.h"

namespace mvforge {

inline constexpr int kEmbeddingDim = 96;
inline constexpr int kLayoutVersion = 1;
inline constexpr int kMaxChartColumns = 4;

// Block offsets inside a column embedding.
inline constexpr int kSemanticOffset = 0;
inline constexpr int kSemanticDim = 64;
inline constexpr int kStatsOffset = 64;
inline constexpr int kTypeOffset = 88;

// One-hot slots of the type block, relative to kTypeOffset.
enum class TypeSlot {
  kQuantitative = 0,
  kNominal = 1,
  kOrdinal = 2,
  kTemporal = 3,
  kBoolean = 4,
  kIdLike = 5,
  kReserved = 6,
  kPadding = 7,
};

using Embedding = Eigen::Matrix<double, kEmbeddingDim, 1>;

struct ColumnEmbedding {
  Embedding vector = Embedding::Zero();
  int layout_version = kLayoutVersion;
};

// Sorted, duplicate-free column indices.
using ColumnSet = std::vector<int>;

ColumnSet canonical_columns(std::vector<int> indices);

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<ColumnSet> column_subsets(int n, int k);
// Subsets of sizes 1..max_size, by size and then lexicographically.
std::vector<ColumnSet> column_subsets_up_to(int n, int max_size = kMaxChartColumns);

struct ChartInput {
  std::vector<ColumnEmbedding> embeddings;
  int true_length = 0;
  ColumnSet column_indices;

  // kEmbeddingDim x true_length, one column per step.
  Eigen::MatrixXd sequence() const;
  // kEmbeddingDim x 4 with padding embeddings after true_length.
  Eigen::MatrixXd padded() const;
};

// Per-table cache of column embeddings; featurization is the expensive part
// of scoring and every candidate reuses it.
struct TableFeatures {
  std::string table_id;
  std::vector<ColumnEmbedding> columns;

  int num_columns() const { return static_cast<int>(columns.size()); }
};

Eigen::Matrix<double, kSemanticDim, 1> header_embedding(std::string_view header);

ColumnEmbedding embed_column(const Column& column, const ColumnProfile& profile);

ColumnEmbedding padding_embedding();

TableFeatures featurize_table(const DataTable& table);

// Throws Error{kCardinality} for 0 or >4 distinct indices, Error{kIndex} for
// indices outside the table.
ChartInput build_chart_input(const TableFeatures& features,
                             const std::vector<int>& column_indices);
ChartInput build_chart_input(const DataTable& table,
                             const std::vector<int>& column_indices);

bool is_id_like(const Column& column, const ColumnProfile& profile);

// {"table_id", "layout_version", "columns": [[96 values], ...]}; loading a
// dump from another layout version throws LayoutError.
nlohmann::json features_to_json(const TableFeatures& features);
TableFeatures features_from_json(const nlohmann::json& j);

}  // namespace mvforge

#endif  // MVFORGE_FEATURIZE_H_
