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

#include "mvforge/ranker.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>
#include <set>

#include "mvforge/error.h"

namespace mvforge {
namespace {

using nlohmann::json;

void require_nonempty(const PairDataset& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no pairs to evaluate");
}

Eigen::MatrixXd feature_bank(const TableFeatures& features) {
  Eigen::MatrixXd bank(kEmbeddingDim, features.num_columns());
  for (int c = 0; c < features.num_columns(); ++c) {
    bank.col(c) = features.columns[static_cast<std::size_t>(c)].vector;
  }
  return bank;
}

}  // namespace

ChartType ChartScore::best_type() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < p_type.size(); ++i) {
    if (p_type[i] > p_type[best]) best = i;
  }
  return kAllChartTypes[best];
}

ChartScore make_chart_score(double raw, const Eigen::VectorXd& type_probs) {
  ChartScore s;
  s.raw = raw;
  s.s_data = neural::sigmoid(raw);
  if (type_probs.size() == kNumChartTypes) {
    for (int i = 0; i < kNumChartTypes; ++i) s.p_type[static_cast<std::size_t>(i)] = type_probs(i);
  }
  return s;
}

void check_single_chart_bundle(const ModelBundle& bundle) {
  if (bundle.kind != ModelKind::kSingleChart) {
    throw Error(ErrorCode::kLayout, "expected a single_chart model");
  }
  if (bundle.layout_version != kLayoutVersion || bundle.model.config().input_dim != kEmbeddingDim) {
    throw Error(ErrorCode::kLayout, "model layout " + std::to_string(bundle.layout_version) +
                                        " does not match column layout " +
                                        std::to_string(kLayoutVersion));
  }
}

ChartScore score_chart(const ModelBundle& bundle, const TableFeatures& features,
                       const std::vector<int>& columns) {
  check_single_chart_bundle(bundle);
  const ChartInput input = build_chart_input(features, columns);
  auto s = bundle.model.score(input.sequence());
  return make_chart_score(s.score, s.type_probs);
}

std::vector<ChartScore> score_charts(const ModelBundle& bundle, const TableFeatures& features,
                                     const std::vector<ColumnSet>& subsets) {
  check_single_chart_bundle(bundle);
  std::vector<ChartScore> out(subsets.size());
  if (subsets.empty()) return out;
  const std::vector<Eigen::MatrixXd> banks{feature_bank(features)};
  std::vector<neural::SequenceRef> refs;
  refs.reserve(subsets.size());
  for (const ColumnSet& s : subsets) {
    build_chart_input(features, s);  // validates cardinality and indices
    refs.push_back({0, canonical_columns(s)});
  }
  std::vector<const neural::SequenceRef*> ptrs;
  for (const auto& r : refs) ptrs.push_back(&r);
  for (auto& [len, group] : neural::internal::group_by_length(banks, ptrs)) {
    auto result = bundle.model.forward(group.steps);
    for (std::size_t j = 0; j < group.slots.size(); ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      Eigen::VectorXd probs;
      if (result.type_probs.size() > 0) probs = result.type_probs.col(col);
      out[group.slots[j]] = make_chart_score(result.scores(0, col), probs);
    }
  }
  return out;
}

PairDataset PairDataset::subset(const std::vector<std::size_t>& pair_indices) const {
  PairDataset out;
  out.input_dim = input_dim;
  out.max_len = max_len;
  out.padding = padding;
  std::map<int, int> remap;
  auto bank_of = [&](int old) {
    auto [it, inserted] = remap.emplace(old, static_cast<int>(out.banks.size()));
    if (inserted) out.banks.push_back(banks[static_cast<std::size_t>(old)]);
    return it->second;
  };
  for (std::size_t i : pair_indices) {
    neural::TrainingPair p = pairs.at(i);
    p.positive.bank = bank_of(p.positive.bank);
    p.negative.bank = bank_of(p.negative.bank);
    out.pairs.push_back(std::move(p));
    out.groups.push_back(groups.at(i));
  }
  return out;
}

std::vector<std::string> PairDataset::group_ids() const {
  std::set<std::string> ids(groups.begin(), groups.end());
  return {ids.begin(), ids.end()};
}

PairDataset single_chart_dataset(const std::vector<ChartPairRecord>& records,
                                 const FeatureStore& features) {
  PairDataset data;
  data.input_dim = kEmbeddingDim;
  data.max_len = kMaxChartColumns;
  data.padding = padding_embedding().vector;
  std::map<std::string, int> bank_index;
  for (const ChartPairRecord& r : records) {
    auto it = bank_index.find(r.table_id);
    const TableFeatures& f = features.at(r.table_id);
    if (it == bank_index.end()) {
      it = bank_index.emplace(r.table_id, static_cast<int>(data.banks.size())).first;
      data.banks.push_back(feature_bank(f));
    }
    // Validates both sides against the table.
    build_chart_input(f, r.pos.columns);
    build_chart_input(f, r.neg.columns);
    neural::TrainingPair p;
    p.positive = {it->second, canonical_columns(r.pos.columns)};
    p.negative = {it->second, canonical_columns(r.neg.columns)};
    p.type_label = r.pos.type ? static_cast<int>(*r.pos.type) : -1;
    data.pairs.push_back(std::move(p));
    data.groups.push_back(r.table_id);
  }
  return data;
}

PairDataset mv_dataset(const std::vector<MvPairRecord>& records) {
  PairDataset data;
  data.input_dim = kChartEmbeddingDim;
  data.max_len = kMaxMvCharts;
  data.padding = Eigen::VectorXd::Zero(kChartEmbeddingDim);
  auto add_side = [&](const Eigen::MatrixXd& m) {
    if (m.rows() != kChartEmbeddingDim) {
      throw Error(ErrorCode::kShape, "MV embeddings must have 9 rows");
    }
    if (m.cols() < 1 || m.cols() > kMaxMvCharts) {
      throw Error(ErrorCode::kTooManyCharts, "MV side has " + std::to_string(m.cols()) + " charts");
    }
    neural::SequenceRef ref;
    ref.bank = static_cast<int>(data.banks.size());
    ref.steps.resize(static_cast<std::size_t>(m.cols()));
    std::iota(ref.steps.begin(), ref.steps.end(), 0);
    data.banks.push_back(m);
    return ref;
  };
  for (const MvPairRecord& r : records) {
    neural::TrainingPair p;
    p.positive = add_side(r.pos);
    p.negative = add_side(r.neg);
    data.pairs.push_back(std::move(p));
    data.groups.push_back(r.session_id);
  }
  return data;
}

namespace {

TrainReport run_training(ModelBundle bundle, const PairDataset& data, const TrainingHyper& hyper,
                         const EpochCallback& on_epoch) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no training pairs");
  if (bundle.model.config().input_dim != data.input_dim) {
    throw Error(ErrorCode::kShape, "model input_dim does not match the pair data");
  }
  TrainReport report;
  report.bundle = std::move(bundle);
  report.bundle.hyper = hyper;
  if (hyper.epochs > 0) {
    report.epochs = neural::train_siamese(report.bundle.model, data.banks, data.pairs,
                                          hyper.siamese_options(),
                                          [&](const neural::EpochReport& r) {
                                            if (on_epoch) on_epoch(r);
                                          });
  }
  report.bundle.meta.epochs_run = static_cast<int>(report.epochs.size());
  report.bundle.meta.pair_count = data.size();
  report.bundle.meta.seed = hyper.seed;
  report.bundle.meta.final_loss = report.epochs.empty() ? 0.0 : report.epochs.back().mean_loss;
  return report;
}

}  // namespace

TrainReport train_model(ModelKind kind, const PairDataset& data, const TrainingHyper& hyper,
                        const neural::ScorerConfig& config, const EpochCallback& on_epoch) {
  ModelBundle bundle = make_bundle(kind, config, false);
  bundle.model.initialize(hyper.seed);
  return run_training(std::move(bundle), data, hyper, on_epoch);
}

TrainReport resume_training(const ModelBundle& start, const PairDataset& data,
                            const TrainingHyper& hyper, const EpochCallback& on_epoch) {
  if (start.layout_version != expected_layout_version(start.kind)) {
    throw Error(ErrorCode::kLayout, "model layout_version " + std::to_string(start.layout_version) +
                                        " does not match this build");
  }
  return run_training(start, data, hyper, on_epoch);
}

ModelBundle train_single(const PairDataset& data, const TrainingHyper& hyper) {
  return train_model(ModelKind::kSingleChart, data, hyper,
                     default_scorer_config(ModelKind::kSingleChart))
      .bundle;
}

SequenceScorer bundle_scorer(const ModelBundle& bundle) {
  auto model = std::make_shared<const neural::BiLstmScorer<double>>(bundle.model);
  return [model](const PairDataset& data, std::span<const neural::SequenceRef> refs) {
    return neural::score_sequences(*model, data.banks, refs);
  };
}

double pair_accuracy(const SequenceScorer& scorer, const PairDataset& data) {
  require_nonempty(data);
  std::vector<neural::SequenceRef> refs;
  refs.reserve(2 * data.size());
  for (const auto& p : data.pairs) refs.push_back(p.positive);
  for (const auto& p : data.pairs) refs.push_back(p.negative);
  const std::vector<double> s = scorer(data, refs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (s[i] > s[i + data.size()]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double pair_accuracy(const ModelBundle& bundle, const PairDataset& data) {
  return pair_accuracy(bundle_scorer(bundle), data);
}

std::vector<RecallTable> load_recall_tables(const std::filesystem::path& corpus_dir) {
  const auto entries = read_corpus_jsonl(read_file(corpus_dir / "ground_truth.jsonl"));
  std::vector<RecallTable> out;
  for (const CorpusEntry& e : entries) {
    std::filesystem::path csv = e.csv_path;
    if (csv.is_relative()) csv = corpus_dir / csv;
    const DataTable table = parse_csv(read_file(csv), e.name);
    if (table.num_columns() > kMaxCorpusTableColumns) continue;
    RecallTable t;
    t.table_id = table.table_id;
    std::set<ColumnSet> seen;
    for (const GroundTruthChart& g : e.charts) {
      const ColumnSet cols = canonical_columns(g.columns);
      if (cols.empty() || cols.size() != g.columns.size() ||
          static_cast<int>(cols.size()) > kMaxChartColumns || cols.front() < 0 ||
          cols.back() >= table.num_columns() || !seen.insert(cols).second) {
        continue;
      }
      t.ground_truths.push_back(cols);
    }
    if (t.ground_truths.empty()) continue;
    t.features = featurize_table(table);
    out.push_back(std::move(t));
  }
  if (out.empty()) throw Error(ErrorCode::kEmptyDataset, "corpus has no usable tables");
  return out;
}

SubsetScorer bundle_subset_scorer(const ModelBundle& bundle) {
  auto b = std::make_shared<const ModelBundle>(bundle);
  return [b](const TableFeatures& features, const std::vector<ColumnSet>& subsets) {
    std::vector<double> out;
    out.reserve(subsets.size());
    for (const ChartScore& s : score_charts(*b, features, subsets)) out.push_back(s.raw);
    return out;
  };
}

std::vector<double> topk_recall_curve(const SubsetScorer& scorer,
                                      const std::vector<RecallTable>& tables,
                                      const std::vector<int>& ks) {
  if (tables.empty()) throw Error(ErrorCode::kEmptyDataset, "no tables for recall");
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kConfig, "k must be at least 1");
  }
  std::vector<double> sums(ks.size(), 0.0);
  for (const RecallTable& t : tables) {
    if (t.ground_truths.empty()) throw Error(ErrorCode::kEmptyDataset, "table without ground truth");
    const auto candidates = column_subsets_up_to(t.features.num_columns());
    const std::vector<double> scores = scorer(t.features, candidates);
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (scores[a] != scores[b]) return scores[a] > scores[b];
      return candidates[a] < candidates[b];
    });
    std::map<ColumnSet, std::size_t> rank;
    for (std::size_t r = 0; r < order.size(); ++r) rank[candidates[order[r]]] = r;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      std::size_t hits = 0;
      for (const ColumnSet& g : t.ground_truths) {
        auto it = rank.find(g);
        if (it != rank.end() && it->second < static_cast<std::size_t>(ks[i])) ++hits;
      }
      sums[i] += static_cast<double>(hits) / static_cast<double>(t.ground_truths.size());
    }
  }
  for (double& s : sums) s /= static_cast<double>(tables.size());
  return sums;
}

double topk_recall(const SubsetScorer& scorer, const std::vector<RecallTable>& tables, int k) {
  return topk_recall_curve(scorer, tables, {k}).front();
}

CvReport mc_cross_validate(const PairDataset& data, const TrainAndEvaluate& fn, int runs,
                           double split, std::uint64_t seed) {
  if (data.empty()) throw Error(ErrorCode::kEmptyDataset, "no pairs to cross-validate");
  if (runs < 1) throw Error(ErrorCode::kConfig, "runs must be at least 1");
  if (!(split > 0.0 && split < 1.0)) throw Error(ErrorCode::kConfig, "split must lie in (0,1)");
  const std::vector<std::string> ids = data.group_ids();
  if (ids.size() < 2) throw Error(ErrorCode::kEmptyDataset, "need at least two groups to split");
  const std::size_t n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(split * static_cast<double>(ids.size()))), 1,
      ids.size() - 1);
  CvReport report;
  for (int run = 0; run < runs; ++run) {
    std::vector<std::string> shuffled = ids;
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(run) * 0x9e3779b97f4a7c15ULL);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CvRun r;
    r.run = run + 1;
    r.train_groups.assign(shuffled.begin(), shuffled.begin() + static_cast<long>(n_train));
    r.test_groups.assign(shuffled.begin() + static_cast<long>(n_train), shuffled.end());
    std::sort(r.train_groups.begin(), r.train_groups.end());
    std::sort(r.test_groups.begin(), r.test_groups.end());
    const std::set<std::string> train_set(r.train_groups.begin(), r.train_groups.end());
    std::vector<std::size_t> train_idx, test_idx;
    for (std::size_t i = 0; i < data.size(); ++i) {
      (train_set.count(data.groups[i]) ? train_idx : test_idx).push_back(i);
    }
    const PairDataset train = data.subset(train_idx);
    const PairDataset test = data.subset(test_idx);
    // Audit: recomputed from the materialized splits, not from the plan.
    const auto tg = train.group_ids();
    const auto sg = test.group_ids();
    std::vector<std::string> both;
    std::set_intersection(tg.begin(), tg.end(), sg.begin(), sg.end(), std::back_inserter(both));
    r.disjoint = both.empty();
    report.disjoint = report.disjoint && r.disjoint;
    r.train_pairs = train.size();
    r.test_pairs = test.size();
    r.value = fn(train, test, run);
    report.runs.push_back(std::move(r));
  }
  double sum = 0.0;
  for (const CvRun& r : report.runs) sum += r.value;
  report.mean = sum / static_cast<double>(report.runs.size());
  if (report.runs.size() > 1) {
    double ss = 0.0;
    for (const CvRun& r : report.runs) ss += (r.value - report.mean) * (r.value - report.mean);
    report.std = std::sqrt(ss / static_cast<double>(report.runs.size() - 1));
  }
  return report;
}

json to_json(const CvReport& report, bool include_groups) {
  json runs = json::array();
  for (const CvRun& r : report.runs) {
    json j = {{"run", r.run},
              {"value", r.value},
              {"train_pairs", r.train_pairs},
              {"test_pairs", r.test_pairs},
              {"train_groups", r.train_groups.size()},
              {"test_groups", r.test_groups.size()},
              {"disjoint", r.disjoint}};
    if (include_groups) {
      j["train_group_ids"] = r.train_groups;
      j["test_group_ids"] = r.test_groups;
    }
    runs.push_back(std::move(j));
  }
  return {{"metric", report.metric},
          {"runs", runs},
          {"mean", report.mean},
          {"std", report.std},
          {"audit", {{"disjoint", report.disjoint}}}};
}

}  // namespace mvforge
