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

#include "mvforge/featurize.h"

#include <algorithm>
#include <cmath>
#include <regex>

#include "mvforge/error.h"

namespace mvforge {
namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

int type_slot(DataType type) {
  switch (type) {
    case DataType::kQuantitative: return static_cast<int>(TypeSlot::kQuantitative);
    case DataType::kNominal: return static_cast<int>(TypeSlot::kNominal);
    case DataType::kOrdinal: return static_cast<int>(TypeSlot::kOrdinal);
    case DataType::kTemporal: return static_cast<int>(TypeSlot::kTemporal);
    case DataType::kBoolean: return static_cast<int>(TypeSlot::kBoolean);
  }
  return static_cast<int>(TypeSlot::kNominal);
}

}  // namespace

ColumnSet canonical_columns(std::vector<int> indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return indices;
}

Eigen::Matrix<double, kSemanticDim, 1> header_embedding(std::string_view header) {
  Eigen::Matrix<double, kSemanticDim, 1> v = Eigen::Matrix<double, kSemanticDim, 1>::Zero();
  if (header.empty()) return v;
  std::string padded;
  padded.reserve(header.size() + 2);
  padded.push_back('\x02');
  for (char c : header) {
    padded.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
  }
  padded.push_back('\x03');
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    const std::uint64_t h = fnv1a(std::string_view(padded).substr(i, 3));
    // Bit 0 is the sign; the bucket comes from the remaining bits so that
    // sign and bucket are independent.
    const double sign = (h & 1U) ? -1.0 : 1.0;
    v[static_cast<Eigen::Index>((h >> 1) % kSemanticDim)] += sign;
  }
  const double norm = v.norm();
  if (norm > 0) v /= norm;
  return v;
}

bool is_id_like(const Column& column, const ColumnProfile& profile) {
  static const std::regex kIdHeader("(^|_)id$|^index$", std::regex::icase);
  return profile[ProfileStat::kAllUniqueFlag] == 1.0 &&
         std::regex_search(column.header, kIdHeader);
}

ColumnEmbedding embed_column(const Column& column, const ColumnProfile& profile) {
  ColumnEmbedding e;
  e.vector.segment<kSemanticDim>(kSemanticOffset) = header_embedding(column.header);
  for (int i = 0; i < kProfileSize; ++i) {
    e.vector[kStatsOffset + i] = profile.values[static_cast<std::size_t>(i)];
  }
  const int slot = is_id_like(column, profile) ? static_cast<int>(TypeSlot::kIdLike)
                                               : type_slot(column.inferred_type);
  e.vector[kTypeOffset + slot] = 1.0;
  return e;
}

ColumnEmbedding padding_embedding() {
  ColumnEmbedding e;
  e.vector[kTypeOffset + static_cast<int>(TypeSlot::kPadding)] = 1.0;
  return e;
}

TableFeatures featurize_table(const DataTable& table) {
  TableFeatures f;
  f.table_id = table.table_id;
  f.columns.reserve(table.columns.size());
  for (const Column& column : table.columns) {
    f.columns.push_back(embed_column(column, profile(column)));
  }
  return f;
}

Eigen::MatrixXd ChartInput::sequence() const {
  Eigen::MatrixXd seq(kEmbeddingDim, true_length);
  for (int i = 0; i < true_length; ++i) seq.col(i) = embeddings[static_cast<std::size_t>(i)].vector;
  return seq;
}

Eigen::MatrixXd ChartInput::padded() const {
  Eigen::MatrixXd seq(kEmbeddingDim, kMaxChartColumns);
  const Embedding pad = padding_embedding().vector;
  for (int i = 0; i < kMaxChartColumns; ++i) {
    seq.col(i) = i < true_length ? embeddings[static_cast<std::size_t>(i)].vector : pad;
  }
  return seq;
}

ChartInput build_chart_input(const TableFeatures& features,
                             const std::vector<int>& column_indices) {
  ColumnSet cols = canonical_columns(column_indices);
  if (cols.empty() || static_cast<int>(cols.size()) > kMaxChartColumns) {
    throw Error(ErrorCode::kCardinality,
                "a chart encodes 1-4 columns, got " + std::to_string(cols.size()));
  }
  for (int c : cols) {
    if (c < 0 || c >= features.num_columns()) {
      throw Error(ErrorCode::kIndex, "column " + std::to_string(c) +
                                         " outside table of " +
                                         std::to_string(features.num_columns()));
    }
  }
  ChartInput input;
  input.true_length = static_cast<int>(cols.size());
  for (int c : cols) input.embeddings.push_back(features.columns[static_cast<std::size_t>(c)]);
  input.column_indices = std::move(cols);
  return input;
}

ChartInput build_chart_input(const DataTable& table,
                             const std::vector<int>& column_indices) {
  // Only the selected columns are featurized.
  ColumnSet cols = canonical_columns(column_indices);
  TableFeatures partial;
  partial.table_id = table.table_id;
  partial.columns.resize(table.columns.size());
  for (int c : cols) {
    if (c >= 0 && c < table.num_columns()) {
      const Column& column = table.columns[static_cast<std::size_t>(c)];
      partial.columns[static_cast<std::size_t>(c)] = embed_column(column, profile(column));
    }
  }
  return build_chart_input(partial, cols);
}

std::vector<ColumnSet> column_subsets(int n, int k) {
  std::vector<ColumnSet> out;
  if (k <= 0 || k > n) return out;
  ColumnSet c(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) c[static_cast<std::size_t>(i)] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++c[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

std::vector<ColumnSet> column_subsets_up_to(int n, int max_size) {
  std::vector<ColumnSet> out;
  for (int k = 1; k <= std::min(n, max_size); ++k) {
    auto part = column_subsets(n, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

nlohmann::json features_to_json(const TableFeatures& features) {
  nlohmann::json cols = nlohmann::json::array();
  for (const ColumnEmbedding& c : features.columns) {
    cols.push_back(std::vector<double>(c.vector.data(), c.vector.data() + kEmbeddingDim));
  }
  return {{"table_id", features.table_id}, {"layout_version", kLayoutVersion}, {"columns", cols}};
}

TableFeatures features_from_json(const nlohmann::json& j) {
  TableFeatures f;
  try {
    const int version = j.at("layout_version").get<int>();
    if (version != kLayoutVersion) {
      throw Error(ErrorCode::kLayout, "feature layout " + std::to_string(version) +
                                          " does not match " + std::to_string(kLayoutVersion));
    }
    f.table_id = j.at("table_id").get<std::string>();
    for (const auto& c : j.at("columns")) {
      const auto values = c.get<std::vector<double>>();
      if (values.size() != static_cast<std::size_t>(kEmbeddingDim)) {
        throw Error(ErrorCode::kCorrupt, "column embedding has " + std::to_string(values.size()) +
                                             " entries");
      }
      ColumnEmbedding e;
      for (int i = 0; i < kEmbeddingDim; ++i) e.vector(i) = values[static_cast<std::size_t>(i)];
      f.columns.push_back(e);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("malformed feature dump: ") + e.what());
  }
  return f;
}

}  // namespace mvforge
