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

#ifndef MVFORGE_PAIRGEN_H_
#define MVFORGE_PAIRGEN_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "mvforge/chartspec.h"
#include "mvforge/featurize.h"
#include "mvforge/mvstate.h"
#include "mvforge/provenance.h"

namespace mvforge {

inline constexpr int kMaxCorpusTableColumns = 10;

enum class PairSource { kCorpus, kProvenance };

std::string_view pair_source_name(PairSource source);

struct ChartSide {
  ColumnSet columns;
  std::optional<ChartType> type;

  bool operator==(const ChartSide&) const = default;
};

// One line of a single-chart pair file.
struct ChartPairRecord {
  std::string table_id;
  ChartSide pos;
  ChartSide neg;
  PairSource source = PairSource::kCorpus;

  bool operator==(const ChartPairRecord&) const = default;
};

// One line of an MV pair file; sides are 9 x n chart-embedding sequences.
struct MvPairRecord {
  std::string session_id;
  Eigen::MatrixXd pos;
  Eigen::MatrixXd neg;
  PairSource source = PairSource::kProvenance;

  bool operator==(const MvPairRecord&) const = default;
};

nlohmann::json to_json(const ChartPairRecord& record);
ChartPairRecord chart_pair_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MvPairRecord& record);
MvPairRecord mv_pair_from_json(const nlohmann::json& j);

std::string write_chart_pairs_jsonl(const std::vector<ChartPairRecord>& records);
std::vector<ChartPairRecord> read_chart_pairs_jsonl(std::string_view text);
std::string write_mv_pairs_jsonl(const std::vector<MvPairRecord>& records);
std::vector<MvPairRecord> read_mv_pairs_jsonl(std::string_view text);

// Column embeddings of every table referenced by a single-chart pair file,
// stored next to it as "<pairs>.features.json".
struct FeatureStore {
  std::map<std::string, TableFeatures> tables;

  const TableFeatures& at(const std::string& table_id) const;
};

nlohmann::json to_json(const FeatureStore& store);
FeatureStore feature_store_from_json(const nlohmann::json& j);
std::filesystem::path features_sidecar_path(const std::filesystem::path& pairs_path);

struct GroundTruthChart {
  ColumnSet columns;
  std::optional<ChartType> type;
};

// One line of a ground-truth corpus file.
struct CorpusEntry {
  std::string name;
  std::string csv_path;  // relative paths resolve against the corpus file
  std::vector<GroundTruthChart> charts;
};

nlohmann::json to_json(const CorpusEntry& entry);
CorpusEntry corpus_entry_from_json(const nlohmann::json& j);
std::vector<CorpusEntry> read_corpus_jsonl(std::string_view text);

struct PairgenCounters {
  std::size_t tables_seen = 0;
  std::size_t tables_skipped_wide = 0;      // more than 10 columns
  std::size_t charts_seen = 0;
  std::size_t charts_in_skipped_tables = 0;
  std::size_t charts_skipped_wide = 0;      // more than 4 columns
  std::size_t charts_skipped_invalid = 0;   // empty, out of range or duplicate
  std::size_t charts_used = 0;
  std::size_t pairs = 0;

  PairgenCounters& operator+=(const PairgenCounters& other);
  nlohmann::json to_json() const;
};

struct CorpusPairOptions {
  // Negatives kept per ground truth; all of them when unset.
  std::optional<std::size_t> cap_per_ground_truth;
  std::uint64_t seed = 0;
};

// Pairs every usable ground truth against every other same-cardinality
// column subset that is not itself a ground truth.
std::vector<ChartPairRecord> corpus_pairs(const std::string& table_id, int num_columns,
                                          const std::vector<GroundTruthChart>& ground_truths,
                                          PairgenCounters* counters,
                                          const CorpusPairOptions& options = {});

struct CorpusPairs {
  std::vector<ChartPairRecord> records;
  FeatureStore features;
  PairgenCounters counters;
};

// Reads <dir>/ground_truth.jsonl and the CSV tables it references.
CorpusPairs corpus_pairs_from_dir(const std::filesystem::path& dir,
                                  const CorpusPairOptions& options = {});

struct MvStatePair {
  std::string session_id;
  MVState positive;
  MVState negative;
};

// Final snapshot against each distinct earlier one. Empty snapshots are not
// views and are ignored.
std::vector<MvStatePair> provenance_pairs(const ProvenanceLog& log);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace mvforge

#endif  // MVFORGE_PAIRGEN_H_
