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

#include "mvforge/synth.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>
#include <set>

#include "mvforge/error.h"
#include "mvforge/mvrank.h"
#include "mvforge/recommend.h"

namespace mvforge {
namespace {

using nlohmann::json;
using Rng = std::mt19937_64;

enum class Kind { kMeasure, kCount, kCategory, kOrdinalVocab, kDate, kYear, kFlag, kId };

constexpr std::array<Kind, 8> kKinds = {Kind::kMeasure,      Kind::kCount, Kind::kCategory,
                                        Kind::kOrdinalVocab, Kind::kDate,  Kind::kYear,
                                        Kind::kFlag,         Kind::kId};
constexpr std::array<double, 8> kKindWeights = {4, 2, 3, 1.5, 1, 0.7, 0.8, 0.7};

const std::vector<std::string>& headers_for(Kind kind) {
  static const std::vector<std::string> measure = {
      "price", "sales", "revenue", "profit", "weight", "height", "score", "temperature",
      "distance", "duration", "rating", "income", "cost", "volume", "speed", "horsepower",
      "mpg", "acceleration", "margin", "discount"};
  static const std::vector<std::string> count = {"count", "quantity", "units", "visits",
                                                 "clicks", "orders", "passengers", "votes"};
  static const std::vector<std::string> category = {
      "region", "category", "country", "product", "department", "segment", "brand", "city",
      "origin", "channel", "genre", "team"};
  static const std::vector<std::string> ordinal = {"month", "weekday", "priority", "size"};
  static const std::vector<std::string> date = {"date", "order_date", "ship_date", "timestamp",
                                                "day"};
  static const std::vector<std::string> year = {"year", "model_year", "season"};
  static const std::vector<std::string> flag = {"is_active", "returned", "flag", "churned",
                                                "verified"};
  static const std::vector<std::string> id = {"id", "customer_id", "index", "order_id", "row_id"};
  switch (kind) {
    case Kind::kMeasure: return measure;
    case Kind::kCount: return count;
    case Kind::kCategory: return category;
    case Kind::kOrdinalVocab: return ordinal;
    case Kind::kDate: return date;
    case Kind::kYear: return year;
    case Kind::kFlag: return flag;
    case Kind::kId: return id;
  }
  return measure;
}

std::string format_number(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

std::string iso_date(int days_since_epoch) {
  // Civil-from-days conversion.
  int z = days_since_epoch + 719468;
  const int era = (z >= 0 ? z : z - 146096) / 146097;
  const int doe = z - era * 146097;
  const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  int y = yoe + era * 400;
  const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const int mp = (5 * doy + 2) / 153;
  const int d = doy - (153 * mp + 2) / 5 + 1;
  const int m = mp < 10 ? mp + 3 : mp - 9;
  if (m <= 2) ++y;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

std::vector<std::string> column_values(Kind kind, const std::string& header, int rows, Rng& rng) {
  std::vector<std::string> out(static_cast<std::size_t>(rows));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  switch (kind) {
    case Kind::kMeasure: {
      const double mean = std::uniform_real_distribution<double>(-50, 500)(rng);
      const double scale = std::uniform_real_distribution<double>(1, 100)(rng);
      std::normal_distribution<double> dist(mean, scale);
      for (auto& v : out) v = format_number(dist(rng), 2);
      break;
    }
    case Kind::kCount: {
      std::poisson_distribution<int> dist(std::uniform_real_distribution<double>(2, 200)(rng));
      for (auto& v : out) v = std::to_string(dist(rng));
      break;
    }
    case Kind::kCategory: {
      const int levels = std::uniform_int_distribution<int>(3, 8)(rng);
      std::uniform_int_distribution<int> pick(0, levels - 1);
      for (auto& v : out) v = header + "_" + static_cast<char>('A' + pick(rng));
      break;
    }
    case Kind::kOrdinalVocab: {
      static const std::vector<std::string> months = {"January", "February", "March", "April",
                                                      "May", "June", "July", "August",
                                                      "September", "October", "November",
                                                      "December"};
      static const std::vector<std::string> weekdays = {"Monday", "Tuesday", "Wednesday",
                                                        "Thursday", "Friday", "Saturday",
                                                        "Sunday"};
      static const std::vector<std::string> priority = {"low", "medium", "high"};
      static const std::vector<std::string> size = {"small", "medium", "large"};
      const auto& vocab = header == "month"     ? months
                          : header == "weekday" ? weekdays
                          : header == "priority" ? priority
                                                 : size;
      std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
      for (auto& v : out) v = vocab[pick(rng)];
      break;
    }
    case Kind::kDate: {
      int day = std::uniform_int_distribution<int>(7000, 19000)(rng);
      const int step = std::uniform_int_distribution<int>(1, 30)(rng);
      for (auto& v : out) {
        v = iso_date(day);
        day += step;
      }
      break;
    }
    case Kind::kYear: {
      int year = std::uniform_int_distribution<int>(1950, 2010)(rng);
      for (auto& v : out) {
        v = std::to_string(year);
        if (unit(rng) < 0.5) ++year;
      }
      break;
    }
    case Kind::kFlag: {
      const double p = std::uniform_real_distribution<double>(0.2, 0.8)(rng);
      for (auto& v : out) v = unit(rng) < p ? "true" : "false";
      break;
    }
    case Kind::kId: {
      int start = std::uniform_int_distribution<int>(0, 1000)(rng);
      for (auto& v : out) v = std::to_string(start++);
      break;
    }
  }
  return out;
}

// Draws a table as CSV text; values never need quoting.
std::string draw_csv(int cols, int rows, Rng& rng) {
  std::discrete_distribution<std::size_t> kind_dist(kKindWeights.begin(), kKindWeights.end());
  std::set<std::string> used;
  std::vector<std::string> headers;
  std::vector<std::vector<std::string>> values;
  for (int c = 0; c < cols; ++c) {
    const Kind kind = kKinds[kind_dist(rng)];
    const auto& names = headers_for(kind);
    std::string header = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
    // The ordinal generator keys its vocabulary off the base name.
    values.push_back(column_values(kind, header, rows, rng));
    std::string unique = header;
    for (int k = 2; used.count(unique); ++k) unique = header + "_" + std::to_string(k);
    used.insert(unique);
    headers.push_back(unique);
  }
  std::string csv;
  for (int c = 0; c < cols; ++c) csv += (c ? "," : "") + headers[static_cast<std::size_t>(c)];
  csv += "\n";
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (c) csv += ",";
      csv += values[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];
    }
    csv += "\n";
  }
  return csv;
}

Eigen::VectorXd measure_balance_direction() {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(kEmbeddingDim);
  b(kTypeOffset + static_cast<int>(TypeSlot::kQuantitative)) = 1.0;
  for (TypeSlot s : {TypeSlot::kNominal, TypeSlot::kOrdinal, TypeSlot::kTemporal,
                     TypeSlot::kBoolean, TypeSlot::kIdLike}) {
    b(kTypeOffset + static_cast<int>(s)) = -1.0;
  }
  return b;
}

}  // namespace

double PlantedUtility::value(const TableFeatures& features, const ColumnSet& columns) const {
  double lin = 0.0;
  double inter = 0.0;
  for (int c : columns) {
    const Embedding& e = features.columns.at(static_cast<std::size_t>(c)).vector;
    lin += linear.dot(e);
    inter += interaction.dot(e);
  }
  return lin + gamma * inter * inter;
}

json to_json(const PlantedUtility& u) {
  return {{"linear", std::vector<double>(u.linear.data(), u.linear.data() + u.linear.size())},
          {"interaction",
           std::vector<double>(u.interaction.data(), u.interaction.data() + u.interaction.size())},
          {"gamma", u.gamma},
          {"layout_version", kLayoutVersion}};
}

PlantedUtility planted_utility_from_json(const json& j) {
  PlantedUtility u;
  try {
    const auto lin = j.at("linear").get<std::vector<double>>();
    const auto inter = j.at("interaction").get<std::vector<double>>();
    if (lin.size() != static_cast<std::size_t>(kEmbeddingDim) || inter.size() != lin.size()) {
      throw Error(ErrorCode::kCorrupt, "utility vectors must have 96 entries");
    }
    u.linear = Eigen::Map<const Eigen::VectorXd>(lin.data(), kEmbeddingDim);
    u.interaction = Eigen::Map<const Eigen::VectorXd>(inter.data(), kEmbeddingDim);
    u.gamma = j.at("gamma").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kCorrupt, std::string("malformed utility: ") + e.what());
  }
  return u;
}

ChartType planted_chart_type(const DataTable& table, const ColumnSet& columns) {
  int temporal = 0;
  int dims = 0;
  for (int c : columns) {
    const DataType t = table.columns.at(static_cast<std::size_t>(c)).inferred_type;
    if (t == DataType::kTemporal) ++temporal;
    if (is_dimension(t)) ++dims;
  }
  const std::size_t n = columns.size();
  if (temporal > 0) return n <= 2 ? ChartType::kLine : ChartType::kArea;
  if (dims == 0) return n >= 2 ? ChartType::kScatter : ChartType::kBar;
  return n == 1 ? ChartType::kPie : ChartType::kBar;
}

SynthCorpus generate_synthetic_corpus(const SynthOptions& o) {
  if (o.tables < 0 || o.cols_min < 1 || o.cols_max < o.cols_min || o.rows_min < 2 ||
      o.rows_max < o.rows_min) {
    throw Error(ErrorCode::kConfig, "invalid synthetic corpus options");
  }
  SynthCorpus corpus;
  Rng urng(o.seed ^ 0x7e11ab1eULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < kEmbeddingDim; ++i) corpus.utility.linear(i) = normal(urng);
  {
    // Shift every column's linear term by a constant (each column has exactly
    // one active type slot) so about half the columns contribute positively.
    Rng pilot(o.seed ^ 0x9170fULL);
    std::vector<double> terms;
    for (int t = 0; t < 20; ++t) {
      const int cols = std::uniform_int_distribution<int>(o.cols_min, o.cols_max)(pilot);
      const int rows = std::uniform_int_distribution<int>(o.rows_min, o.rows_max)(pilot);
      const TableFeatures f = featurize_table(parse_csv(draw_csv(cols, rows, pilot), "pilot"));
      for (const ColumnEmbedding& e : f.columns) terms.push_back(corpus.utility.linear.dot(e.vector));
    }
    std::nth_element(terms.begin(), terms.begin() + static_cast<long>(terms.size() / 2), terms.end());
    const double shift = terms[terms.size() / 2];
    for (int s = 0; s <= static_cast<int>(TypeSlot::kIdLike); ++s) {
      corpus.utility.linear(kTypeOffset + s) -= shift;
    }
  }
  if (o.interaction) {
    corpus.utility.interaction = measure_balance_direction();
    corpus.utility.gamma = o.gamma;
  }
  Rng rng(o.seed);
  for (int t = 0; t < o.tables; ++t) {
    bool accepted = false;
    for (int attempt = 0; attempt < o.max_attempts && !accepted; ++attempt) {
      const int cols = std::uniform_int_distribution<int>(o.cols_min, o.cols_max)(rng);
      const int rows = std::uniform_int_distribution<int>(o.rows_min, o.rows_max)(rng);
      std::string csv = draw_csv(cols, rows, rng);
      char name[32];
      std::snprintf(name, sizeof(name), "table_%04d", t);
      const DataTable table = parse_csv(csv, name);
      const TableFeatures features = featurize_table(table);
      const auto subsets = column_subsets_up_to(table.num_columns());
      double best = -std::numeric_limits<double>::infinity();
      double second = best;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < subsets.size(); ++i) {
        const double v = corpus.utility.value(features, subsets[i]);
        if (v > best) {
          second = best;
          best = v;
          best_i = i;
        } else if (v > second) {
          second = v;
        }
      }
      if (subsets.size() > 1 && best - second < o.min_gap) continue;
      SynthTable st;
      st.file_name = std::string(name) + ".csv";
      st.csv = std::move(csv);
      st.entry.name = name;
      st.entry.csv_path = "tables/" + st.file_name;
      st.entry.charts.push_back({subsets[best_i], planted_chart_type(table, subsets[best_i])});
      corpus.tables.push_back(std::move(st));
      accepted = true;
    }
    if (!accepted) throw Error(ErrorCode::kConfig, "could not draw a table with a clear optimum");
  }
  return corpus;
}

void write_synthetic_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "tables");
  std::string jsonl;
  for (const SynthTable& t : corpus.tables) {
    write_file(dir / "tables" / t.file_name, t.csv);
    jsonl += to_json(t.entry).dump() + "\n";
  }
  write_file(dir / "ground_truth.jsonl", jsonl);
  write_file(dir / "utility.json", to_json(corpus.utility).dump(2) + "\n");
}

SubsetScorer planted_scorer(const PlantedUtility& utility) {
  auto u = std::make_shared<const PlantedUtility>(utility);
  return [u](const TableFeatures& features, const std::vector<ColumnSet>& subsets) {
    std::vector<double> out;
    out.reserve(subsets.size());
    for (const ColumnSet& s : subsets) out.push_back(u->value(features, s));
    return out;
  };
}

Eigen::VectorXd planted_mv_weights() {
  Eigen::VectorXd w(kChartEmbeddingDim);
  // s_data, p_type, size, diversity, overlap, novelty, coverage, parsimony,
  // duplicate
  w << 1.0, 1.0, 0.5, 1.0, -1.5, 1.0, 2.0, -6.0, -2.0;
  return w;
}

double planted_mv_utility(const Eigen::VectorXd& weights, const Eigen::MatrixXd& embeddings) {
  if (embeddings.cols() == 0) return -std::numeric_limits<double>::infinity();
  return (weights.transpose() * embeddings).sum();
}

MvSessionCorpus generate_mv_sessions(const MvSessionOptions& o, const ModelBundle& single) {
  if (o.sessions < 0 || o.final_min < 1 || o.final_max < o.final_min ||
      o.final_max > kMaxMvCharts || o.walk_min < 1 || o.walk_max < o.walk_min) {
    throw Error(ErrorCode::kConfig, "invalid session options");
  }
  MvSessionCorpus corpus;
  corpus.weights = planted_mv_weights();
  Rng rng(o.seed);
  for (int s = 0; s < o.sessions; ++s) {
    const int cols = std::uniform_int_distribution<int>(o.cols_min, o.cols_max)(rng);
    const int rows = std::uniform_int_distribution<int>(20, 40)(rng);
    const std::string csv = draw_csv(cols, rows, rng);
    char id[32];
    std::snprintf(id, sizeof(id), "s%04d", s);
    std::int64_t tick = 0;
    Session session(id, std::string("table_") + id, csv, [&tick] { return ++tick; });
    const DataTable& table = session.table();
    const ChartScorer chart_scorer = cached_chart_scorer(single, session.features());
    const auto utility = [&](const std::vector<ChartSpec>& charts) {
      return planted_mv_utility(corpus.weights, mv_embeddings(charts, cols, chart_scorer));
    };
    const MvScorer planted = [&](const std::vector<std::vector<ChartSpec>>& mvs) {
      std::vector<double> out;
      for (const auto& m : mvs) out.push_back(utility(m));
      return out;
    };
    PoolOptions po;
    const CandidatePool pool = enumerate_candidates(table, bundle_chart_scorer(single, session.features()), po);
    MVState final_mv;
    double best = -std::numeric_limits<double>::infinity();
    for (int n = o.final_min; n <= std::min<int>(o.final_max, static_cast<int>(pool.size())); ++n) {
      MVState candidate = recommend_mv(table, n, {}, pool, planted);
      const double u = utility(candidate.specs());
      if (u > best) {
        best = u;
        final_mv = std::move(candidate);
      }
    }
    const int n_final = static_cast<int>(final_mv.size());
    const double target = utility(final_mv.specs()) - o.min_gap;

    session.record(EventKind::kUploadTable, {{"name", table.name}});
    const int steps = std::uniform_int_distribution<int>(o.walk_min, o.walk_max)(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int step = 0, tries = 0; step < steps && tries < 200; ++tries) {
      const MVState& cur = session.current();
      const double roll = unit(rng);
      EventKind kind;
      nlohmann::json payload;
      std::vector<ChartSpec> next = cur.specs();
      if (cur.empty() || (roll < 0.6 && cur.size() < 6)) {
        const Candidate& c = pool.candidates[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        kind = EventKind::kAddChart;
        payload = {{"chart", {{"spec", to_json(c.spec)}}}};
        next.push_back(c.spec);
      } else {
        const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, cur.size() - 1)(rng);
        if (roll < 0.8 && cur.size() > 1) {
          kind = EventKind::kRemoveChart;
          payload = {{"position", pos}};
          next.erase(next.begin() + static_cast<long>(pos));
        } else {
          const ChartType t = kAllChartTypes[std::uniform_int_distribution<std::size_t>(0, kNumChartTypes - 1)(rng)];
          const ChartSpec spec = assign_encodings(table, cur.charts[pos].spec.columns, t);
          kind = EventKind::kChangeType;
          payload = {{"position", pos}, {"spec", to_json(spec)}};
          next[pos] = spec;
        }
      }
      if (utility(next) > target) continue;
      session.record(kind, payload);
      ++step;
    }
    session.record(EventKind::kRecommendMvRequest,
                   {{"n_charts", n_final}, {"result", to_json(final_mv)}});
    session.set_consent(true);
    corpus.logs.push_back(session.log());
  }
  return corpus;
}

}  // namespace mvforge
