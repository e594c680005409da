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

#include "mvforge/recommend.h"

#include <algorithm>
#include <memory>
#include <numeric>

#include "mvforge/error.h"

namespace mvforge {
namespace {

bool pool_before(const Candidate& a, const Candidate& b, bool dedup) {
  const double ka = dedup ? a.score.s_data : a.score.overall(a.spec.type);
  const double kb = dedup ? b.score.s_data : b.score.overall(b.spec.type);
  if (ka != kb) return ka > kb;
  if (a.spec.columns != b.spec.columns) return a.spec.columns < b.spec.columns;
  return a.spec.type < b.spec.type;
}

std::set<ChartIdentity> identities(const std::vector<ChartSpec>& charts, bool dedup) {
  std::set<ChartIdentity> out;
  for (const ChartSpec& c : charts) out.insert(pool_identity(c, dedup));
  return out;
}

// Index of the first maximum; pool order breaks ties.
std::size_t first_max(const std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace

ChartIdentity pool_identity(const ChartSpec& spec, bool dedup) { return chart_identity(spec, dedup); }

BatchChartScorer bundle_chart_scorer(const ModelBundle& single, const TableFeatures& features) {
  check_single_chart_bundle(single);
  auto b = std::make_shared<const ModelBundle>(single);
  auto f = std::make_shared<const TableFeatures>(features);
  return [b, f](const std::vector<ColumnSet>& subsets) { return score_charts(*b, *f, subsets); };
}

CandidatePool enumerate_candidates(const DataTable& table, const BatchChartScorer& scorer,
                                   const PoolOptions& options) {
  CandidatePool pool;
  pool.dedup = options.dedup;
  std::vector<ColumnSet> subsets = column_subsets_up_to(table.num_columns());
  std::vector<ChartScore> scores = scorer(subsets);
  if (scores.size() != subsets.size()) throw Error(ErrorCode::kShape, "scorer returned wrong count");
  if (table.num_columns() > kMaxCorpusTableColumns && subsets.size() > options.wide_table_cap) {
    std::vector<std::size_t> order(subsets.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return scores[a].s_data > scores[b].s_data;
    });
    order.resize(options.wide_table_cap);
    std::sort(order.begin(), order.end());
    std::vector<ColumnSet> kept_sets;
    std::vector<ChartScore> kept_scores;
    for (std::size_t i : order) {
      kept_sets.push_back(std::move(subsets[i]));
      kept_scores.push_back(scores[i]);
    }
    subsets = std::move(kept_sets);
    scores = std::move(kept_scores);
  }
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    if (options.dedup) {
      pool.candidates.push_back(
          {assign_encodings(table, subsets[i], scores[i].best_type()), scores[i]});
    } else {
      for (ChartType t : kAllChartTypes) {
        pool.candidates.push_back({assign_encodings(table, subsets[i], t), scores[i]});
      }
    }
  }
  std::sort(pool.candidates.begin(), pool.candidates.end(),
            [&](const Candidate& a, const Candidate& b) { return pool_before(a, b, options.dedup); });
  return pool;
}

CandidatePool enumerate_candidates(const DataTable& table, const ModelBundle& single, bool dedup) {
  PoolOptions o;
  o.dedup = dedup;
  return enumerate_candidates(table, bundle_chart_scorer(single, featurize_table(table)), o);
}

MvScorer learned_mv_scorer(const ModelBundle& mv_model, const ModelBundle& single,
                           const TableFeatures& features) {
  check_mv_bundle(mv_model);
  auto mv = std::make_shared<const ModelBundle>(mv_model);
  const ChartScorer chart_scorer = cached_chart_scorer(single, features);
  const int columns = features.num_columns();
  return [mv, chart_scorer, columns](const std::vector<std::vector<ChartSpec>>& mvs) {
    std::vector<Eigen::MatrixXd> emb;
    emb.reserve(mvs.size());
    for (const auto& charts : mvs) emb.push_back(mv_embeddings(charts, columns, chart_scorer));
    return score_mv_batch(*mv, emb);
  };
}

MvScorer modular_mv_scorer(const BatchChartScorer& scorer) {
  return [scorer](const std::vector<std::vector<ChartSpec>>& mvs) {
    std::vector<double> out;
    out.reserve(mvs.size());
    for (const auto& charts : mvs) {
      std::vector<ColumnSet> cols;
      for (const ChartSpec& c : charts) cols.push_back(c.columns);
      double sum = 0.0;
      for (const ChartScore& s : scorer(cols)) sum += s.s_data;
      out.push_back(charts.empty() ? 0.0 : sum / static_cast<double>(charts.size()));
    }
    return out;
  };
}

MVState recommend_mv(const DataTable& table, int n_charts, const std::vector<ChartSpec>& locked,
                     const CandidatePool& pool, const MvScorer& mv_scorer) {
  auto infeasible = [](const std::string& what) { throw Error(ErrorCode::kInfeasibleRequest, what); };
  if (n_charts < 1 || n_charts > kMaxMvCharts) infeasible("n_charts must lie in 1..12");
  if (static_cast<std::size_t>(n_charts) < locked.size()) {
    infeasible("n_charts is smaller than the number of locked charts");
  }
  for (const ChartSpec& s : locked) validate_spec(table, s);
  MVState mv;
  std::vector<ChartSpec> specs;
  for (const ChartSpec& s : locked) {
    mv.charts.push_back({s, true, default_layout(mv.charts.size())});
    specs.push_back(s);
  }
  std::set<ChartIdentity> used = identities(specs, pool.dedup);
  std::size_t available = 0;
  for (const Candidate& c : pool.candidates) {
    if (!used.count(pool_identity(c.spec, pool.dedup))) ++available;
  }
  if (locked.size() + available < static_cast<std::size_t>(n_charts)) {
    infeasible("not enough distinct candidates for " + std::to_string(n_charts) + " charts");
  }
  while (mv.charts.size() < static_cast<std::size_t>(n_charts)) {
    std::vector<const Candidate*> options;
    std::vector<std::vector<ChartSpec>> trials;
    for (const Candidate& c : pool.candidates) {
      if (used.count(pool_identity(c.spec, pool.dedup))) continue;
      options.push_back(&c);
      trials.push_back(specs);
      trials.back().push_back(c.spec);
    }
    const std::size_t best = first_max(mv_scorer(trials));
    const ChartSpec& pick = options[best]->spec;
    used.insert(pool_identity(pick, pool.dedup));
    specs.push_back(pick);
    mv.charts.push_back({pick, false, default_layout(mv.charts.size())});
  }
  return mv;
}

std::vector<ChartIdea> chart_ideas(const MVState& mv, const std::set<int>& must_include,
                                   const CandidatePool& pool, const MvScorer& mv_scorer,
                                   std::size_t limit) {
  const std::vector<ChartSpec> specs = mv.specs();
  const std::set<ChartIdentity> used = identities(specs, pool.dedup);
  std::vector<const Candidate*> options;
  for (const Candidate& c : pool.candidates) {
    if (used.count(pool_identity(c.spec, pool.dedup))) continue;
    if (!std::includes(c.spec.columns.begin(), c.spec.columns.end(), must_include.begin(),
                       must_include.end())) {
      continue;
    }
    options.push_back(&c);
  }
  std::vector<double> projected(options.size());
  if (specs.empty()) {
    for (std::size_t i = 0; i < options.size(); ++i) {
      const Candidate& c = *options[i];
      projected[i] = pool.dedup ? c.score.s_data : c.score.overall(c.spec.type);
    }
  } else if (!options.empty()) {
    std::vector<std::vector<ChartSpec>> trials;
    for (const Candidate* c : options) {
      trials.push_back(specs);
      trials.back().push_back(c->spec);
    }
    projected = mv_scorer(trials);
  }
  std::vector<std::size_t> order(options.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return projected[a] > projected[b]; });
  std::vector<ChartIdea> out;
  for (std::size_t i = 0; i < order.size() && out.size() < limit; ++i) {
    out.push_back({options[order[i]]->spec, options[order[i]]->score, projected[order[i]]});
  }
  return out;
}

nlohmann::json to_json(const ChartScore& s) {
  nlohmann::json p = nlohmann::json::object();
  nlohmann::json overall = nlohmann::json::object();
  for (ChartType t : kAllChartTypes) {
    p[std::string(chart_type_name(t))] = s.p_type[static_cast<std::size_t>(t)];
    overall[std::string(chart_type_name(t))] = s.overall(t);
  }
  return {{"s_data", s.s_data}, {"p_type", p}, {"s_overall", overall}};
}

nlohmann::json mv_view_json(const DataTable& table, const MVState& mv) {
  nlohmann::json charts = nlohmann::json::array();
  nlohmann::json locked = nlohmann::json::array();
  for (const MvChart& c : mv.charts) {
    nlohmann::json j = to_json(c.spec);
    j["vegalite"] = vegalite_json(c.spec, table);
    j["layout"] = to_json(c.layout);
    j["locked"] = c.locked;
    charts.push_back(std::move(j));
    locked.push_back(c.locked);
  }
  return {{"charts", std::move(charts)}, {"locked", std::move(locked)}};
}

nlohmann::json recommendation_json(const DataTable& table, const MVState& mv, double mv_score,
                                   const std::vector<ChartScore>& per_chart) {
  nlohmann::json scores = nlohmann::json::array();
  for (const ChartScore& s : per_chart) scores.push_back(to_json(s));
  return {{"mv", mv_view_json(table, mv)},
          {"scores", {{"mv_score", mv_score}, {"per_chart", scores}}}};
}

}  // namespace mvforge
