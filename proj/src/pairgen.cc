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

#include "mvforge/pairgen.h"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "mvforge/error.h"

namespace mvforge {
namespace {

using nlohmann::json;

json side_json(const ChartSide& side) {
  json j = {{"columns", side.columns}};
  if (side.type) j["chart_type"] = chart_type_name(*side.type);
  return j;
}

ChartSide side_from_json(const json& j) {
  ChartSide s;
  s.columns = j.at("columns").get<ColumnSet>();
  if (j.contains("chart_type") && !j.at("chart_type").is_null()) {
    s.type = parse_chart_type(j.at("chart_type").get<std::string>());
    if (!s.type) throw Error(ErrorCode::kCorrupt, "unknown chart type in pair record");
  }
  return s;
}

PairSource parse_source(const std::string& name) {
  if (name == "corpus") return PairSource::kCorpus;
  if (name == "provenance") return PairSource::kProvenance;
  throw Error(ErrorCode::kCorrupt, "unknown pair source " + name);
}

json embeddings_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    out.push_back(std::vector<double>(m.col(c).data(), m.col(c).data() + m.rows()));
  }
  return out;
}

Eigen::MatrixXd embeddings_from_json(const json& j) {
  const auto cols = j.get<std::vector<std::vector<double>>>();
  if (cols.empty()) throw Error(ErrorCode::kCorrupt, "MV pair side has no charts");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(cols.front().size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (cols[c].size() != cols.front().size()) throw Error(ErrorCode::kCorrupt, "ragged embeddings");
    for (std::size_t r = 0; r < cols[c].size(); ++r) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = cols[c][r];
    }
  }
  return m;
}

template <typename Record, typename Parse>
std::vector<Record> read_jsonl(std::string_view text, Parse parse) {
  std::vector<Record> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse(json::parse(line)));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kCorrupt, "line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::string_view pair_source_name(PairSource source) {
  return source == PairSource::kCorpus ? "corpus" : "provenance";
}

json to_json(const ChartPairRecord& r) {
  return {{"table_id", r.table_id},
          {"pos", side_json(r.pos)},
          {"neg", side_json(r.neg)},
          {"source", pair_source_name(r.source)}};
}

ChartPairRecord chart_pair_from_json(const json& j) {
  ChartPairRecord r;
  r.table_id = j.at("table_id").get<std::string>();
  r.pos = side_from_json(j.at("pos"));
  r.neg = side_from_json(j.at("neg"));
  r.source = parse_source(j.value("source", "corpus"));
  return r;
}

json to_json(const MvPairRecord& r) {
  return {{"session_id", r.session_id},
          {"pos", {{"embeddings", embeddings_json(r.pos)}}},
          {"neg", {{"embeddings", embeddings_json(r.neg)}}},
          {"source", pair_source_name(r.source)}};
}

MvPairRecord mv_pair_from_json(const json& j) {
  MvPairRecord r;
  r.session_id = j.at("session_id").get<std::string>();
  r.pos = embeddings_from_json(j.at("pos").at("embeddings"));
  r.neg = embeddings_from_json(j.at("neg").at("embeddings"));
  r.source = parse_source(j.value("source", "provenance"));
  return r;
}

std::string write_chart_pairs_jsonl(const std::vector<ChartPairRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

std::vector<ChartPairRecord> read_chart_pairs_jsonl(std::string_view text) {
  return read_jsonl<ChartPairRecord>(text, chart_pair_from_json);
}

std::string write_mv_pairs_jsonl(const std::vector<MvPairRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

std::vector<MvPairRecord> read_mv_pairs_jsonl(std::string_view text) {
  return read_jsonl<MvPairRecord>(text, mv_pair_from_json);
}

const TableFeatures& FeatureStore::at(const std::string& table_id) const {
  auto it = tables.find(table_id);
  if (it == tables.end()) throw Error(ErrorCode::kCorrupt, "no features for table " + table_id);
  return it->second;
}

json to_json(const FeatureStore& store) {
  json tables = json::object();
  for (const auto& [id, f] : store.tables) tables[id] = features_to_json(f);
  return {{"layout_version", kLayoutVersion}, {"tables", tables}};
}

FeatureStore feature_store_from_json(const json& j) {
  FeatureStore store;
  try {
    for (const auto& [id, f] : j.at("tables").items()) store.tables[id] = features_from_json(f);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("malformed feature store: ") + e.what());
  }
  return store;
}

std::filesystem::path features_sidecar_path(const std::filesystem::path& pairs_path) {
  return pairs_path.string() + ".features.json";
}

json to_json(const CorpusEntry& entry) {
  json charts = json::array();
  for (const auto& c : entry.charts) {
    json cj = {{"columns", c.columns}};
    if (c.type) cj["type"] = chart_type_name(*c.type);
    charts.push_back(cj);
  }
  return {{"table", {{"name", entry.name}, {"csv_path", entry.csv_path}}}, {"charts", charts}};
}

CorpusEntry corpus_entry_from_json(const json& j) {
  CorpusEntry e;
  e.name = j.at("table").at("name").get<std::string>();
  e.csv_path = j.at("table").at("csv_path").get<std::string>();
  for (const auto& c : j.at("charts")) {
    GroundTruthChart g;
    g.columns = c.at("columns").get<ColumnSet>();
    if (c.contains("type") && !c.at("type").is_null()) {
      g.type = parse_chart_type(c.at("type").get<std::string>());
      if (!g.type) throw Error(ErrorCode::kCorrupt, "unknown chart type in corpus");
    }
    e.charts.push_back(std::move(g));
  }
  return e;
}

std::vector<CorpusEntry> read_corpus_jsonl(std::string_view text) {
  return read_jsonl<CorpusEntry>(text, corpus_entry_from_json);
}

PairgenCounters& PairgenCounters::operator+=(const PairgenCounters& o) {
  tables_seen += o.tables_seen;
  tables_skipped_wide += o.tables_skipped_wide;
  charts_seen += o.charts_seen;
  charts_in_skipped_tables += o.charts_in_skipped_tables;
  charts_skipped_wide += o.charts_skipped_wide;
  charts_skipped_invalid += o.charts_skipped_invalid;
  charts_used += o.charts_used;
  pairs += o.pairs;
  return *this;
}

json PairgenCounters::to_json() const {
  return {{"tables_seen", tables_seen},
          {"tables_skipped_wide", tables_skipped_wide},
          {"charts_seen", charts_seen},
          {"charts_in_skipped_tables", charts_in_skipped_tables},
          {"charts_skipped_wide", charts_skipped_wide},
          {"charts_skipped_invalid", charts_skipped_invalid},
          {"charts_used", charts_used},
          {"pairs", pairs}};
}

std::vector<ChartPairRecord> corpus_pairs(const std::string& table_id, int num_columns,
                                          const std::vector<GroundTruthChart>& ground_truths,
                                          PairgenCounters* counters,
                                          const CorpusPairOptions& options) {
  PairgenCounters local;
  PairgenCounters& c = counters != nullptr ? *counters : local;
  std::vector<ChartPairRecord> out;
  ++c.tables_seen;
  c.charts_seen += ground_truths.size();
  if (num_columns > kMaxCorpusTableColumns) {
    ++c.tables_skipped_wide;
    c.charts_in_skipped_tables += ground_truths.size();
    return out;
  }
  std::vector<const GroundTruthChart*> usable;
  std::set<ColumnSet> truth_sets;
  for (const GroundTruthChart& g : ground_truths) {
    if (static_cast<int>(g.columns.size()) > kMaxChartColumns) {
      ++c.charts_skipped_wide;
      continue;
    }
    const ColumnSet cols = canonical_columns(g.columns);
    const bool in_range = !cols.empty() && cols.size() == g.columns.size() && cols.front() >= 0 &&
                          cols.back() < num_columns;
    if (!in_range || !truth_sets.insert(cols).second) {
      ++c.charts_skipped_invalid;
      continue;
    }
    usable.push_back(&g);
  }
  c.charts_used += usable.size();
  std::mt19937_64 rng(options.seed);
  for (const GroundTruthChart* g : usable) {
    const ColumnSet pos = canonical_columns(g->columns);
    std::vector<ColumnSet> negatives;
    for (ColumnSet& s : column_subsets(num_columns, static_cast<int>(pos.size()))) {
      if (!truth_sets.count(s)) negatives.push_back(std::move(s));
    }
    if (options.cap_per_ground_truth && negatives.size() > *options.cap_per_ground_truth) {
      std::shuffle(negatives.begin(), negatives.end(), rng);
      negatives.resize(*options.cap_per_ground_truth);
      std::sort(negatives.begin(), negatives.end());
    }
    for (ColumnSet& neg : negatives) {
      out.push_back({table_id, {pos, g->type}, {std::move(neg), std::nullopt}, PairSource::kCorpus});
    }
  }
  c.pairs += out.size();
  return out;
}

CorpusPairs corpus_pairs_from_dir(const std::filesystem::path& dir, const CorpusPairOptions& options) {
  const auto corpus_file = dir / "ground_truth.jsonl";
  if (!std::filesystem::exists(corpus_file)) {
    throw Error(ErrorCode::kEmptyDataset, "no ground_truth.jsonl in " + dir.string());
  }
  CorpusPairs result;
  const auto entries = read_corpus_jsonl(read_file(corpus_file));
  if (entries.empty()) throw Error(ErrorCode::kEmptyDataset, "corpus has no tables");
  for (const CorpusEntry& e : entries) {
    std::filesystem::path csv = e.csv_path;
    if (csv.is_relative()) csv = dir / csv;
    const DataTable table = parse_csv(read_file(csv), e.name);
    auto records = corpus_pairs(table.table_id, table.num_columns(), e.charts, &result.counters, options);
    if (!records.empty()) result.features.tables[table.table_id] = featurize_table(table);
    result.records.insert(result.records.end(), std::make_move_iterator(records.begin()),
                          std::make_move_iterator(records.end()));
  }
  return result;
}

std::vector<MvStatePair> provenance_pairs(const ProvenanceLog& log) {
  std::vector<const MVState*> snapshots;
  for (const ProvenanceEvent& e : log.events) {
    if (e.snapshot && !e.snapshot->empty()) snapshots.push_back(&*e.snapshot);
  }
  if (snapshots.empty()) {
    throw Error(ErrorCode::kInsufficientHistory, "session " + log.session_id + " has no snapshots");
  }
  const MVState& final_mv = *snapshots.back();
  const MvIdentity final_id = mv_identity(final_mv);
  std::set<MvIdentity> seen{final_id};
  std::vector<MvStatePair> out;
  for (std::size_t i = 0; i + 1 < snapshots.size(); ++i) {
    if (seen.insert(mv_identity(*snapshots[i])).second) {
      out.push_back({log.session_id, final_mv, *snapshots[i]});
    }
  }
  if (out.empty()) {
    throw Error(ErrorCode::kInsufficientHistory,
                "session " + log.session_id + " has fewer than 2 distinct snapshots");
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kEmptyInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kCorrupt, "cannot write " + path.string());
}

}  // namespace mvforge
